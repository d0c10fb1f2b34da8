"""Quantum maximal correlation coefficients.

For a bipartite state ``rho_AB`` and a normalized, symmetry-inducing
operator monotone ``f``,

.. math::

    \\mu_f(A:B)_\\rho = \\max |\\mathrm{Tr}[(X \\otimes Y)\\rho_{AB}]|

over Hermitian ``X, Y`` with ``Tr[rho_A X] = Tr[rho_B Y] = 0`` and unit
``L2_f`` norms.  Substituting ``X = J^-1/2_{f,rho_A}(X')`` turns this into
an operator-Schmidt problem for

.. math::

    \\tilde\\rho_f = (J^{-1/2}_{f,\\rho_A} \\otimes J^{-1/2}_{f,\\rho_B})(\\rho_{AB})

with the trivial pair ``(rho_A^1/2, rho_B^1/2)`` (value 1) projected out.
The power-function variant ``mu^Lin_k`` uses
``rho~_k = (rho_A^-(1-k)/2 (x) rho_B^-k/2) rho (rho_A^-k/2 (x) rho_B^-(1-k)/2)``
and optimizes over all linear operators, giving its second operator-Schmidt
coefficient.

Operator-Schmidt coefficients are computed by realigning the operator in
Hilbert-Schmidt orthonormal Hermitian product bases (normalized identity
plus generalized Gell-Mann matrices) and taking singular values.
"""

import dataclasses

import numpy as np

from qcontract import linalg
from qcontract.channels import apply_on_second, canonical_purification, f_coupling
from qcontract.contraction import contraction_coefficient
from qcontract.errors import (
    BandViolation,
    DimensionMismatch,
    DomainError,
    InvalidProjectors,
    NotADistribution,
    NotHermitian,
    NumericalError,
)
from qcontract.joperator import WeightedSpace
from qcontract.monotone import GM

RANGE_TOL = 1e-8
LAMBDA1_TOL = 1e-7


@dataclasses.dataclass(frozen=True)
class CorrelationReport:
    """Result of :func:`mu_f` or :func:`mu_lin_k`.

    Attributes:
        label: ``f`` identifier or ``"k=<k>"``.
        mu: The correlation coefficient in ``[0, 1]``.
        schmidt_spectrum: ``lambda1`` followed by the remaining Schmidt
            coefficients, descending.
        lambda1: Value of the trivial Schmidt pair (should be 1).
    """

    label: str
    mu: float
    schmidt_spectrum: np.ndarray
    lambda1: float

    def to_json(self):
        """JSON-serializable summary."""
        return {
            "label": self.label,
            "mu": self.mu,
            "lambda1": self.lambda1,
            "spectrum": [float(x) for x in self.schmidt_spectrum],
        }


def _check_dims(x, d_a, d_b):
    if x.shape != (d_a * d_b, d_a * d_b):
        raise DimensionMismatch(f"operator of shape {x.shape} is not on {d_a}x{d_b}")


def realign(x, d_a, d_b):
    """Coefficient matrix ``C_ab = Tr[(G_a (x) H_b) X]`` in Hermitian ONBs.

    Args:
        x: Operator on ``A (x) B``.
        d_a: Dimension of ``A``.
        d_b: Dimension of ``B``.

    Returns:
        numpy.ndarray: ``d_a**2 x d_b**2`` complex matrix (real when ``x``
        is Hermitian) whose singular values are the operator-Schmidt
        coefficients of ``x``.
    """
    x = linalg.as_matrix(x)
    _check_dims(x, d_a, d_b)
    ga = np.stack(linalg.gell_mann_basis(d_a, include_identity=True))
    gb = np.stack(linalg.gell_mann_basis(d_b, include_identity=True))
    t = x.reshape(d_a, d_b, d_a, d_b)
    return np.einsum("pki,qlj,ijkl->pq", ga, gb, t)


def _hermitian_coords(op, d):
    basis = linalg.gell_mann_basis(d, include_identity=True)
    return np.array([np.trace(g @ op).real for g in basis])


def _restrict(x, rho_a, rho_b, d_a, d_b):
    """Compress ``x`` to ``supp(rho_A) (x) supp(rho_B)``."""
    va = linalg.support_isometry(rho_a)
    vb = linalg.support_isometry(rho_b)
    v = np.kron(va, vb)
    return (
        v.conj().T @ x @ v,
        va.conj().T @ rho_a @ va,
        vb.conj().T @ rho_b @ vb,
        va.shape[1],
        vb.shape[1],
    )


def _marginals(x, d_a, d_b):
    return (
        linalg.partial_trace(x, "A", (d_a, d_b)),
        linalg.partial_trace(x, "B", (d_a, d_b)),
    )


def rho_tilde_k(k, rho_ab, d_a, d_b):
    """The operator ``rho~_k``.

    ``(rho_A^-(1-k)/2 (x) rho_B^-k/2) rho_AB (rho_A^-k/2 (x) rho_B^-(1-k)/2)``,
    with pseudoinverse powers (zero outside the marginal supports).

    Args:
        k: Exponent in ``[0, 1]``.
        rho_ab: Bipartite density operator.
        d_a: Dimension of ``A``.
        d_b: Dimension of ``B``.

    Returns:
        numpy.ndarray: Operator on ``A (x) B``.
    """
    if not 0 <= k <= 1:
        raise DomainError(f"k must lie in [0, 1], got {k}")
    rho = linalg.as_density(rho_ab).matrix
    _check_dims(rho, d_a, d_b)
    rho_a, rho_b = _marginals(rho, d_a, d_b)
    left = np.kron(linalg.psd_power(rho_a, -(1 - k) / 2), linalg.psd_power(rho_b, -k / 2))
    right = np.kron(linalg.psd_power(rho_a, -k / 2), linalg.psd_power(rho_b, -(1 - k) / 2))
    return left @ rho @ right


def mu_lin_k(k, rho_ab, d_a, d_b):
    """Linear maximal correlation ``mu^Lin_{f_k}`` for ``f_k(x) = x**k``.

    The second operator-Schmidt coefficient of ``rho~_k`` over linear
    operators with Hilbert-Schmidt inner products.

    Args:
        k: Exponent in ``[0, 1]``.
        rho_ab: Bipartite density operator.
        d_a: Dimension of ``A``.
        d_b: Dimension of ``B``.

    Returns:
        CorrelationReport: ``mu`` is the second singular value.

    Raises:
        NumericalError: If the leading coefficient is not 1 or ``mu``
            falls outside ``[0, 1]`` beyond rounding.
    """
    rho = linalg.as_density(rho_ab).matrix
    _check_dims(rho, d_a, d_b)
    rho_a, rho_b = _marginals(rho, d_a, d_b)
    rho_r, _, _, r_a, r_b = _restrict(rho, rho_a, rho_b, d_a, d_b)
    tilde = rho_tilde_k(k, rho_r, r_a, r_b)
    s = np.linalg.svd(realign(tilde, r_a, r_b), compute_uv=False)
    return _report(f"k={k:g}", s[0], s[1:])


def _report(label, lambda1, rest):
    rest = np.sort(np.asarray(rest, dtype=float))[::-1]
    lambda1 = float(lambda1)
    if abs(lambda1 - 1) > LAMBDA1_TOL:
        raise NumericalError(f"leading Schmidt coefficient {lambda1:.12g} differs from 1")
    mu = float(rest[0]) if rest.size else 0.0
    if mu < -RANGE_TOL or mu > 1 + RANGE_TOL:
        raise NumericalError(f"mu = {mu:.12g} outside [0, 1]")
    mu = min(max(mu, 0.0), 1.0)
    return CorrelationReport(label, mu, np.concatenate([[lambda1], rest]), lambda1)


def _require_f(f):
    if not (f.normalized and f.symmetry_inducing):
        raise BandViolation(f"{f.id} must be normalized and symmetry inducing")


def rho_tilde_f(f, x, d_a, d_b, marginals=None):
    """``(J^-1/2_{f,rho_A} (x) J^-1/2_{f,rho_B})(X)`` for full-rank marginals."""
    x = linalg.as_matrix(x)
    rho_a, rho_b = _marginals(x, d_a, d_b) if marginals is None else marginals
    sa = WeightedSpace(f, rho_a, -0.5)
    sb = WeightedSpace(f, rho_b, -0.5)
    u = np.kron(sa.eigenvectors, sb.eigenvectors)
    z = (u.conj().T @ x @ u).reshape(d_a, d_b, d_a, d_b)
    z = z * sa.weights[:, None, :, None] * sb.weights[None, :, None, :]
    return u @ z.reshape(d_a * d_b, d_a * d_b) @ u.conj().T


def _mu_f_core(f, x, d_a, d_b):
    rho_a, rho_b = _marginals(x, d_a, d_b)
    rho_a = linalg.as_density(rho_a).matrix
    rho_b = linalg.as_density(rho_b).matrix
    x, rho_a, rho_b, r_a, r_b = _restrict(x, rho_a, rho_b, d_a, d_b)
    tilde = rho_tilde_f(f, x, r_a, r_b, (rho_a, rho_b))
    c = realign(tilde, r_a, r_b)
    if np.max(np.abs(c.imag)) > 1e-8 * max(1.0, np.max(np.abs(c))):
        raise NumericalError("realigned matrix of a Hermitian operator is not real")
    c = c.real
    a = _hermitian_coords(linalg.psd_power(rho_a, 0.5), r_a)
    b = _hermitian_coords(linalg.psd_power(rho_b, 0.5), r_b)
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    trivial = a @ c @ b
    deflated = c - np.outer(a, a @ c)
    deflated = deflated - np.outer(deflated @ b, b)
    # deflation removes one direction on each side; drop its zero coefficient
    rest = np.linalg.svd(deflated, compute_uv=False)[:-1]
    return _report(f.id, trivial, rest)


def mu_f(f, rho_ab, d_a, d_b):
    """Maximal correlation coefficient ``mu_f(A:B)_rho``.

    The largest operator-Schmidt coefficient of ``rho~_f`` over Hermitian
    operators after projecting out the trivial pair
    ``(rho_A^1/2, rho_B^1/2)``.  For ``f >= GM`` this is the second
    Schmidt coefficient of ``rho~_f``.  Marginals are restricted to their
    supports first.

    Args:
        f: Normalized, symmetry-inducing
            :class:`~qcontract.monotone.MonotoneFn`.
        rho_ab: Bipartite density operator.
        d_a: Dimension of ``A``.
        d_b: Dimension of ``B``.

    Returns:
        CorrelationReport: ``lambda1`` is the value of the trivial pair.

    Raises:
        BandViolation: If ``f`` is not normalized or not symmetry inducing.
    """
    _require_f(f)
    rho = linalg.as_density(rho_ab).matrix
    _check_dims(rho, d_a, d_b)
    return _mu_f_core(f, rho, d_a, d_b)


def mu_f_coupling(f, h_ab, d_a, d_b):
    """``mu_f`` evaluated on a relaxed coupling (Hermitian, PSD marginals).

    Args:
        f: Normalized, symmetry-inducing monotone function.
        h_ab: Hermitian operator on ``A (x) B`` whose marginals are states.
        d_a: Dimension of ``A``.
        d_b: Dimension of ``B``.

    Returns:
        CorrelationReport: As in :func:`mu_f`.
    """
    _require_f(f)
    h = linalg.as_matrix(h_ab)
    _check_dims(h, d_a, d_b)
    if not linalg.is_hermitian(h):
        raise NotHermitian("a relaxed coupling must be Hermitian")
    return _mu_f_core(f, 0.5 * (h + h.conj().T), d_a, d_b)


def classical_mu(p_xy):
    """Hirschfeld-Gebelein-Renyi maximal correlation of a joint table.

    Args:
        p_xy: Nonnegative matrix summing to one.

    Returns:
        float: Second singular value of ``diag(p_X)^-1/2 P diag(p_Y)^-1/2``
        restricted to the supports of the marginals.

    Raises:
        NotADistribution: If entries are negative or do not sum to one.
    """
    p = np.asarray(p_xy, dtype=float)
    if p.ndim != 2 or p.size == 0:
        raise NotADistribution("joint table must be a non-empty matrix")
    if np.any(p < -1e-12) or abs(p.sum() - 1) > 1e-9:
        raise NotADistribution("entries must be nonnegative and sum to one")
    p = np.clip(p, 0, None)
    px, py = p.sum(axis=1), p.sum(axis=0)
    p = p[px > 0][:, py > 0]
    px, py = px[px > 0], py[py > 0]
    m = p / np.sqrt(np.outer(px, py))
    s = np.linalg.svd(m, compute_uv=False)
    return float(min(s[1], 1.0)) if s.size > 1 else 0.0


def classical_state(p_xy):
    """Embed a joint table as the diagonal state ``sum p(x,y)|xy><xy|``."""
    p = np.asarray(p_xy, dtype=float)
    return np.diag(p.reshape(-1)).astype(complex)


def gm_schmidt_spectrum(rho_ab, d_a, d_b, cutoff=1e-12):
    """Hermitian operator-Schmidt coefficients of ``rho~_GM``.

    ``rho~_GM = (rho_A (x) rho_B)^-1/4 rho_AB (rho_A (x) rho_B)^-1/4``.

    Args:
        rho_ab: Bipartite density operator.
        d_a: Dimension of ``A``.
        d_b: Dimension of ``B``.
        cutoff: Coefficients at or below this value are dropped.

    Returns:
        numpy.ndarray: Descending coefficients; the first is 1.
    """
    rho = linalg.as_density(rho_ab).matrix
    _check_dims(rho, d_a, d_b)
    tilde = rho_tilde_k(0.5, rho, d_a, d_b)
    s = np.linalg.svd(realign(0.5 * (tilde + tilde.conj().T), d_a, d_b).real, compute_uv=False)
    return s[s > cutoff]


def bipartite_tensor(rho, sigma, dims_rho, dims_sigma):
    """``rho_AB (x) sigma_A'B'`` reordered as a state on ``(AA') (x) (BB')``."""
    (da, db), (dc, dd) = dims_rho, dims_sigma
    t = np.kron(linalg.as_matrix(rho), linalg.as_matrix(sigma))
    t = t.reshape(da, db, dc, dd, da, db, dc, dd).transpose(0, 2, 1, 3, 4, 6, 5, 7)
    n = da * db * dc * dd
    return t.reshape(n, n)


@dataclasses.dataclass(frozen=True)
class TensorizationResult:
    """Result of :func:`tensorization_check`."""

    lhs: float
    rhs: float
    passed: bool


def tensorization_check(k, rho, sigma, dims_rho=(2, 2), dims_sigma=(2, 2), tol=1e-6):
    """Compare ``mu^Lin_k(rho (x) sigma)`` with ``max(mu^Lin_k(rho), mu^Lin_k(sigma))``.

    Args:
        k: Exponent in ``[0, 1]``.
        rho: State on ``A (x) B``.
        sigma: State on ``A' (x) B'``.
        dims_rho: ``(d_A, d_B)``.
        dims_sigma: ``(d_A', d_B')``.
        tol: Agreement tolerance.

    Returns:
        TensorizationResult: Both sides and whether they agree.
    """
    joint = bipartite_tensor(rho, sigma, dims_rho, dims_sigma)
    lhs = mu_lin_k(k, joint, dims_rho[0] * dims_sigma[0], dims_rho[1] * dims_sigma[1]).mu
    rhs = max(mu_lin_k(k, rho, *dims_rho).mu, mu_lin_k(k, sigma, *dims_sigma).mu)
    return TensorizationResult(lhs, rhs, abs(lhs - rhs) <= tol)


def _check_projector(p, d):
    p = linalg.as_matrix(p)
    if p.shape != (d, d):
        raise InvalidProjectors(f"projector of shape {p.shape}, expected {d}x{d}")
    if np.max(np.abs(p - p.conj().T)) > 1e-9 or np.max(np.abs(p @ p - p)) > 1e-9:
        raise InvalidProjectors("projectors must be Hermitian and idempotent")
    return p


def verify_decomposition(rho_ab, subspace_split, p, dims=None, tol=1e-9):
    """Verify a block decomposition certifying perfect correlation.

    Checks that ``rho = p rho0 + (1-p) rho1 + X + X^dagger`` with ``rho0``
    on ``A0 B0``, ``rho1`` on ``A1 B1`` and ``X`` mapping ``A1 B1`` to
    ``A0 B0``; equivalently ``rho`` lives on ``A0B0 + A1B1`` and puts
    weight ``p`` on ``A0B0``.  Then the measurements ``{Pi_A0, Pi_A1}`` and
    ``{Pi_B0, Pi_B1}`` produce perfectly correlated bits with bias ``p``.

    Args:
        rho_ab: Bipartite density operator.
        subspace_split: Projectors ``(Pi_A0, Pi_B0)``.
        p: Weight in ``(0, 1)``.
        dims: ``(d_A, d_B)``; inferred from the projectors if omitted.
        tol: Tolerance.

    Returns:
        bool: Whether the decomposition holds.

    Raises:
        InvalidProjectors: If the projectors are not orthogonal projectors.
        DomainError: If ``p`` is not in ``(0, 1)``.
    """
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    pa0, pb0 = (linalg.as_matrix(x) for x in subspace_split)
    d_a, d_b = dims if dims is not None else (pa0.shape[0], pb0.shape[0])
    pa0, pb0 = _check_projector(pa0, d_a), _check_projector(pb0, d_b)
    rho = linalg.as_density(rho_ab).matrix
    _check_dims(rho, d_a, d_b)
    pa1, pb1 = np.eye(d_a) - pa0, np.eye(d_b) - pb0
    q00, q11 = np.kron(pa0, pb0), np.kron(pa1, pb1)
    q = q00 + q11
    structured = np.max(np.abs(q @ rho @ q - rho)) <= tol
    probs = np.array(
        [
            [np.trace(np.kron(a, b) @ rho).real for b in (pb0, pb1)]
            for a in (pa0, pa1)
        ]
    )
    target = np.array([[p, 0.0], [0.0, 1 - p]])
    return bool(structured and np.max(np.abs(probs - target)) <= tol)


@dataclasses.dataclass(frozen=True)
class CorrespondenceResult:
    """Result of :func:`correspondence_check`."""

    sqrt_eta: float
    mu_on_coupling: float
    passed: bool


def correspondence_check(f, channel, sigma, tol=1e-6):
    """Compare ``sqrt(eta_{chi2_f}(E, sigma))`` with ``mu_f`` of a coupling.

    For ``f = GM`` the correlation side is evaluated on the state
    ``(id (x) E)(psi)``, with ``psi`` the canonical purification of
    ``sigma^T`` so that the system fed to ``E`` carries ``sigma``.  For
    other ``f`` it is evaluated on the relaxed coupling
    :func:`~qcontract.channels.f_coupling`.

    Args:
        f: Normalized, symmetry-inducing monotone function.
        channel: :class:`~qcontract.linalg.ChannelRep`.
        sigma: Full-rank density operator.
        tol: Agreement tolerance.

    Returns:
        CorrespondenceResult: Both sides and whether they agree.
    """
    sigma = linalg.as_density(sigma)
    eta = contraction_coefficient(f, channel, sigma).eta
    d_a, d_b = sigma.dim, channel.dim_out
    if f is GM:
        state = apply_on_second(channel, canonical_purification(sigma.matrix.T), d_a)
        mu = mu_f(GM, state, d_a, d_b).mu
    else:
        mu = mu_f_coupling(f, f_coupling(f, channel, sigma), d_a, d_b).mu
    root = float(np.sqrt(eta))
    return CorrespondenceResult(root, mu, abs(root - mu) <= tol)


__all__ = [
    "CorrelationReport",
    "CorrespondenceResult",
    "TensorizationResult",
    "bipartite_tensor",
    "classical_mu",
    "classical_state",
    "correspondence_check",
    "gm_schmidt_spectrum",
    "mu_f",
    "mu_f_coupling",
    "mu_lin_k",
    "realign",
    "rho_tilde_f",
    "rho_tilde_k",
    "tensorization_check",
    "verify_decomposition",
]
