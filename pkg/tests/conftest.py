"""Shared fixtures and the acceptance summary printed after the run."""

import numpy as np
import pytest
from scipy.linalg import expm, fractional_matrix_power, logm

from qcontract import linalg
from qcontract.monotone import AM, GM, HM, LM

#: Lines recorded by the acceptance tests, printed in the terminal summary.
ACCEPTANCE_LINES = {}


def record_acceptance(number, title, passed, detail=""):
    """Store and print one pass/fail line for an acceptance criterion."""
    status = "PASS" if passed else "FAIL"
    line = f"[{status}] criterion {number:2d}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]])
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


def isotropic(d, lam):
    """``lam Phi + (1 - lam) 1/d^2`` with ``Phi`` the normalized maximally entangled state."""
    return lam * linalg.max_entangled(d, normalized=True) + (1 - lam) * np.eye(d * d) / d**2


def random_hermitian(d, rng):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return a + a.conj().T


def oracle_J_matrix(f, sigma):
    """Closed forms of J_{f,sigma} as a superoperator on row-major vectors.

    Uses ``vec(A X B) = (A (x) B^T) vec(X)`` and avoids the eigenbasis
    weights: AM and GM are products with sigma and its square root, HM is
    the inverse of a Kronecker sum, and LM is the integral
    ``int_0^1 sigma^t X sigma^(1-t) dt`` by Gauss-Legendre quadrature.
    """
    d = sigma.shape[0]
    one = np.eye(d)
    if f is AM:
        return 0.5 * (np.kron(sigma, one) + np.kron(one, sigma.T))
    if f is GM:
        root = fractional_matrix_power(sigma, 0.5)
        return np.kron(root, root.T)
    if f is HM:
        inv = np.linalg.inv(sigma)
        return np.linalg.inv(0.5 * (np.kron(inv, one) + np.kron(one, inv.T)))
    if f is LM:
        log_sigma = logm(sigma)
        nodes, weights = np.polynomial.legendre.leggauss(60)
        total = np.zeros((d * d, d * d), dtype=complex)
        for x, w in zip(nodes, weights):
            t = 0.5 * (x + 1)
            total += 0.5 * w * np.kron(expm(t * log_sigma), expm((1 - t) * log_sigma).T)
        return total
    raise ValueError(f.id)


def oracle_J(f, sigma, x):
    """Apply the closed-form J_{f,sigma} to ``x``."""
    d = sigma.shape[0]
    return (oracle_J_matrix(f, sigma) @ np.asarray(x).reshape(-1)).reshape(d, d)


def oracle_eta(f, channel, sigma):
    """Contraction coefficient as a generalized eigenproblem on traceless Hermitians.

    Maximizes <E X, J^-1_{E sigma} E X> / <X, J^-1_sigma X> over the
    Gell-Mann coordinates, with J^-1 obtained by inverting the closed-form
    J as a matrix.
    """
    from scipy.linalg import eigh

    basis = linalg.gell_mann_basis(sigma.shape[0])
    out = channel(sigma)
    d_in, d_out = sigma.shape[0], out.shape[0]

    def j_inverse(state, d):
        inv = np.linalg.inv(oracle_J_matrix(f, state))
        return lambda x: (inv @ x.reshape(-1)).reshape(d, d)

    inv_in, inv_out = j_inverse(sigma, d_in), j_inverse(out, d_out)
    images = [channel(g) for g in basis]
    num = np.array([[np.trace(a.conj().T @ inv_out(b)).real for b in images] for a in images])
    den = np.array([[np.trace(a.conj().T @ inv_in(b)).real for b in basis] for a in basis])
    return float(eigh(0.5 * (num + num.T), 0.5 * (den + den.T), eigvals_only=True)[-1])


def oracle_mu_f(f, rho, d_a, d_b):
    """Variational maximal correlation over centered, unit-variance Hermitian observables.

    Builds the f-Gram matrices of the centered Hermitian operators on each
    side from the closed-form J and takes the top singular value of the
    whitened cross-moment matrix ``Tr[(X_i (x) Y_j) rho]``.
    """
    from scipy.linalg import null_space

    rho_a = linalg.partial_trace(rho, "A", (d_a, d_b))
    rho_b = linalg.partial_trace(rho, "B", (d_a, d_b))

    def centered_whitener(state, d):
        basis = linalg.gell_mann_basis(d, include_identity=True)
        jm = oracle_J_matrix(f, state)
        gram = np.array([[np.vdot(x.reshape(-1), jm @ y.reshape(-1)).real for y in basis]
                         for x in basis])
        mean = np.array([np.trace(state @ x).real for x in basis])
        null = null_space(mean[None, :])
        chol = np.linalg.cholesky(null.T @ gram @ null)
        return basis, null @ np.linalg.inv(chol).T

    ga, wa = centered_whitener(rho_a, d_a)
    gb, wb = centered_whitener(rho_b, d_b)
    cross = np.array([[np.trace(np.kron(x, y) @ rho).real for y in gb] for x in ga])
    return float(np.linalg.svd(wa.T @ cross @ wb, compute_uv=False)[0])


def classical_oracle_mu(p):
    """Square root of the second eigenvalue of the X -> Y -> X Markov kernel."""
    p = np.asarray(p, dtype=float)
    px, py = p.sum(axis=1), p.sum(axis=0)
    p = p[px > 0][:, py > 0]
    px, py = px[px > 0], py[py > 0]
    kernel = (p / px[:, None]) @ (p.T / py[:, None])
    vals = np.sort(np.abs(np.linalg.eigvals(kernel)))[::-1]
    return float(np.sqrt(vals[1])) if len(vals) > 1 else 0.0
