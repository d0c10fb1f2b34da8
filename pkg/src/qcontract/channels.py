"""Canonical purifications, channel extraction, recovery and reversal maps.

The maps built here are generally not completely positive, so they are
returned as :class:`~qcontract.linalg.LinearMap` handles (Choi matrix plus
a two-sided Kraus form on demand).  For a channel ``E`` and a state
``sigma``:

* Petz recovery ``P(X) = sigma^1/2 E*(E(sigma)^-1/2 X E(sigma)^-1/2) sigma^1/2``,
* Heisenberg reversal ``R = J^-1_{f,E(sigma)} o E o J_{f,sigma}``,
* Schrodinger reversal ``S = J_{f,sigma} o E* o J^-1_{f,E(sigma)}``.

``S`` is the Hilbert-Schmidt adjoint of ``R``; for ``f = GM``, ``S`` is the
Petz map.
"""

import numpy as np

from qcontract import linalg
from qcontract.errors import BandViolation, DimensionMismatch, NotCPTP, RankDeficient
from qcontract.joperator import WeightedSpace
from qcontract.linalg import LinearMap

#: Alias used in the documentation for general (non-CP) linear maps.
LinearMapHandle = LinearMap


def canonical_purification(rho):
    """The canonical purification ``(rho^1/2 (x) 1) Phi+ (rho^1/2 (x) 1)``.

    Args:
        rho: Density operator on ``A``.

    Returns:
        numpy.ndarray: Pure state on ``A (x) A'``.  Its ``A`` marginal is
        ``rho``; its ``A'`` marginal is ``rho^T`` (the transpose in the
        stored basis), which equals ``rho`` when ``rho`` is real.
    """
    rho = linalg.as_density(rho)
    root = linalg.psd_power(rho.matrix, 0.5)
    # |psi> = sum_i rho^1/2 |i> (x) |i>, whose (a, i) component is root[a, i]
    vec = root.reshape(-1)
    return np.outer(vec, vec.conj())


def extract_channel(rho_ab, d_a, d_b, restrict_to_support=False):
    """Recover the unique channel ``E`` with ``(id (x) E)(psi^{rho_A}) = rho_AB``.

    The Choi matrix is ``(rho_A^-1/2 (x) 1) rho_AB (rho_A^-1/2 (x) 1)``.

    Args:
        rho_ab: Bipartite density operator on ``A (x) B``.
        d_a: Dimension of ``A``.
        d_b: Dimension of ``B``.
        restrict_to_support: If ``rho_A`` is singular, extract on its
            support and complete the channel by replacing inputs outside
            the support with ``rho_B``.  Otherwise a singular marginal
            raises :class:`RankDeficient`.

    Returns:
        ChannelRep: The extracted channel from ``A'`` to ``B``.

    Raises:
        RankDeficient: If ``rho_A`` is singular and ``restrict_to_support``
            is False.
        NotCPTP: If the reconstruction check fails (malformed input).
    """
    rho = linalg.as_density(rho_ab).matrix
    if rho.shape != (d_a * d_b, d_a * d_b):
        raise DimensionMismatch(f"state of shape {rho.shape} is not on {d_a}x{d_b}")
    rho_a = linalg.as_density(linalg.partial_trace(rho, "A", (d_a, d_b)))
    if not rho_a.is_full_rank() and not restrict_to_support:
        raise RankDeficient("marginal rho_A is singular; pass restrict_to_support=True")
    inv_root = linalg.psd_power(rho_a.matrix, -0.5)
    left = np.kron(inv_root, np.eye(d_b))
    choi = left @ rho @ left
    if not rho_a.is_full_rank():
        proj = linalg.support_projector(rho_a.matrix)
        rho_b = linalg.partial_trace(rho, "B", (d_a, d_b))
        choi = choi + np.kron(np.eye(d_a) - proj, rho_b)
    try:
        channel = linalg.ChannelRep.from_choi(0.5 * (choi + choi.conj().T), d_a, d_b)
    except NotCPTP as exc:
        raise NotCPTP(f"extracted map is not a channel: {exc}") from exc
    recon = apply_on_second(channel, canonical_purification(rho_a), d_a)
    err = float(np.max(np.abs(recon - rho)))
    if err > 1e-8:
        raise NotCPTP(f"channel reconstruction error {err:.3e}")
    return channel


def apply_on_second(channel, x, d_a):
    """Apply ``id_A (x) channel`` to an operator on ``A (x) A'``."""
    d_in, d_out = channel.dim_in, channel.dim_out
    x = linalg.as_matrix(x)
    if x.shape != (d_a * d_in, d_a * d_in):
        raise DimensionMismatch(f"operator of shape {x.shape} is not on {d_a}x{d_in}")
    t = x.reshape(d_a, d_in, d_a, d_in)
    out = np.zeros((d_a, d_out, d_a, d_out), dtype=complex)
    for k in channel.kraus:
        out += np.einsum("bi,xiyj,cj->xbyc", k, t, k.conj())
    return out.reshape(d_a * d_out, d_a * d_out)


def apply_local(x, dims, first=None, second=None):
    """Apply ``first (x) second`` (channels or ``None`` for identity)."""
    d_a, d_b = dims
    x = linalg.as_matrix(x)
    if second is not None:
        x = apply_on_second(second, x, d_a)
        d_b = second.dim_out
    if first is not None:
        swap = _swap(x, d_a, d_b)
        swap = apply_on_second(first, swap, d_b)
        x = _swap(swap, d_b, first.dim_out)
    return x


def _swap(x, d_a, d_b):
    t = x.reshape(d_a, d_b, d_a, d_b).transpose(1, 0, 3, 2)
    return t.reshape(d_a * d_b, d_a * d_b)


def petz_recovery(channel, sigma):
    """Petz recovery map of ``channel`` with respect to ``sigma``.

    Args:
        channel: :class:`~qcontract.linalg.ChannelRep`.
        sigma: Density operator on the input space.

    Returns:
        LinearMap: ``X -> sigma^1/2 E*(E(sigma)^-1/2 X E(sigma)^-1/2) sigma^1/2``
        (pseudoinverse powers on the support of ``E(sigma)``).
    """
    sigma = _input_state(channel, sigma)
    root = linalg.psd_power(sigma.matrix, 0.5)
    out_inv_root = linalg.psd_power(channel(sigma.matrix), -0.5)

    def fn(x):
        return root @ channel.adjoint_apply(out_inv_root @ x @ out_inv_root) @ root

    return LinearMap.from_function(fn, channel.dim_out, channel.dim_in)


def _input_state(channel, sigma):
    sigma = linalg.as_density(sigma)
    if sigma.dim != channel.dim_in:
        raise DimensionMismatch(f"state dimension {sigma.dim} vs channel input {channel.dim_in}")
    return sigma


def _spaces(f, channel, sigma):
    sigma = _input_state(channel, sigma)
    j_in = WeightedSpace(f, sigma, 1.0)
    j_out_inv = WeightedSpace(f, channel(sigma.matrix), -1.0)
    return j_in, j_out_inv


def heisenberg_reversal(f, channel, sigma):
    """Heisenberg time-reversal map ``J^-1_{f,E(sigma)} o E o J_{f,sigma}``.

    The map is unital on ``supp E(sigma)`` and satisfies
    ``Tr[E(sigma) R(X)] = Tr[sigma X]``.

    Args:
        f: :class:`~qcontract.monotone.MonotoneFn`.
        channel: :class:`~qcontract.linalg.ChannelRep`.
        sigma: Density operator on the input space.

    Returns:
        LinearMap: From the input space to the output space.
    """
    j_in, j_out_inv = _spaces(f, channel, sigma)

    def fn(x):
        return j_out_inv.apply(channel(j_in.apply(x)))

    return LinearMap.from_function(fn, channel.dim_in, channel.dim_out)


def schrodinger_reversal(f, channel, sigma):
    """Schrodinger time-reversal map ``J_{f,sigma} o E* o J^-1_{f,E(sigma)}``.

    Sends ``E(sigma)`` back to ``sigma``; equals the Petz map for ``f = GM``.

    Args:
        f: :class:`~qcontract.monotone.MonotoneFn`.
        channel: :class:`~qcontract.linalg.ChannelRep`.
        sigma: Density operator on the input space.

    Returns:
        LinearMap: From the output space back to the input space.
    """
    j_in, j_out_inv = _spaces(f, channel, sigma)

    def fn(y):
        return j_in.apply(channel.adjoint_apply(j_out_inv.apply(y)))

    return LinearMap.from_function(fn, channel.dim_out, channel.dim_in)


def f_coupling(f, channel, sigma):
    """The ``f``-coupling ``sum_ij P_f(l_i, l_j) |nu_i><nu_j| (x) E(|nu_i><nu_j|)``.

    This is the Choi operator of ``E o J_{f,sigma}`` taken in the eigenbasis
    ``{nu_i}`` of ``sigma`` (then rotated back by that basis).  Its
    marginals are ``sigma`` and ``E(sigma)``; for ``f = GM`` it is the
    quantum state ``(id (x) E)(psi)`` for a purification ``psi`` of ``sigma``.

    Args:
        f: Symmetry-inducing :class:`~qcontract.monotone.MonotoneFn`.
        channel: :class:`~qcontract.linalg.ChannelRep`.
        sigma: Density operator on the input space.

    Returns:
        numpy.ndarray: Hermitian operator on ``A (x) B``.

    Raises:
        BandViolation: If ``f`` is not symmetry inducing.
    """
    if not f.symmetry_inducing:
        raise BandViolation(f"{f.id} is not symmetry inducing")
    sigma = _input_state(channel, sigma)
    space = WeightedSpace(f, sigma, 1.0)
    u, pm = space.eigenvectors, space.perspective
    d, d_out = channel.dim_in, channel.dim_out
    h = np.zeros((d, d_out, d, d_out), dtype=complex)
    for i in range(d):
        for j in range(d):
            if pm[i, j] == 0:
                continue
            unit = np.outer(u[:, i], u[:, j].conj())
            h += pm[i, j] * np.einsum("xy,bc->xbyc", unit, channel(unit))
    h = h.reshape(d * d_out, d * d_out)
    return 0.5 * (h + h.conj().T)


def pinching(sigma, x, tol=1e-9):
    """Pinch ``x`` onto the eigenspaces of ``sigma``.

    Args:
        sigma: Density operator.
        x: Square matrix of the same size.
        tol: Eigenvalues closer than ``tol * lambda_max`` share an eigenspace.

    Returns:
        numpy.ndarray: ``sum_k Pi_k X Pi_k`` over eigenprojectors ``Pi_k``.
    """
    sigma = linalg.as_density(sigma)
    x = linalg.as_matrix(x)
    if x.shape != sigma.matrix.shape:
        raise DimensionMismatch(f"operator shape {x.shape} vs state shape {sigma.matrix.shape}")
    lam = sigma.spectrum.eigenvalues
    u = sigma.spectrum.eigenvectors
    labels = np.zeros(len(lam), dtype=int)
    for i in range(1, len(lam)):
        gap = lam[i - 1] - lam[i] > tol * max(lam[0], 1e-300)
        labels[i] = labels[i - 1] + int(gap)
    z = u.conj().T @ x @ u
    mask = labels[:, None] == labels[None, :]
    return u @ (z * mask) @ u.conj().T


__all__ = [
    "LinearMapHandle",
    "apply_local",
    "apply_on_second",
    "canonical_purification",
    "extract_channel",
    "f_coupling",
    "heisenberg_reversal",
    "petz_recovery",
    "pinching",
    "schrodinger_reversal",
]
