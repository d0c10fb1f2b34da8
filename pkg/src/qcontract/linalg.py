"""Dense complex linear algebra for finite-dimensional quantum systems.

Matrices are plain :class:`numpy.ndarray` objects of complex dtype.  This
module provides spectral decompositions, tensor products, partial traces,
the Choi/Kraus machinery for linear maps and channels, a few standard
channels and random generators, and JSON (de)serialization.

Choi convention: for a map ``E`` from ``d_in`` to ``d_out`` dimensions,

.. math::

    \\Omega_E = \\sum_{ij} |i\\rangle\\langle j| \\otimes E(|i\\rangle\\langle j|),

with the input system first, so ``E(X) = Tr_A[(X^T \\otimes 1) \\Omega_E]``.
Transposes are always taken in the basis in which matrices are stored.
"""

import dataclasses
import functools
import json

import numpy as np
import scipy.stats

from qcontract import tolerances
from qcontract.errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NotCPTP,
    NotDensity,
    NotHermitian,
    NotPSD,
    ParseError,
)


# ---------------------------------------------------------------------------
# basic predicates and decompositions
# ---------------------------------------------------------------------------


def as_matrix(m):
    """Return ``m`` as a 2-D complex array (accepts :class:`DensityOperator`)."""
    if isinstance(m, DensityOperator):
        return m.matrix
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got array of shape {arr.shape}")
    return arr


def _require_square(m, name="matrix"):
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")


def hermitian_residual(m):
    """Largest entrywise deviation ``max|M_ij - conj(M_ji)|``."""
    m = as_matrix(m)
    _require_square(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def is_hermitian(m, tol=None):
    """Check Hermiticity to ``herm_tol * ||M||_F``.

    Args:
        m: Square matrix.
        tol: Relative tolerance; defaults to the active ``herm_tol``.

    Returns:
        bool: True if ``m`` is Hermitian within tolerance.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    tol = tolerances.get().herm_tol if tol is None else tol
    return hermitian_residual(m) <= tol * max(np.linalg.norm(m), 1e-300)


@dataclasses.dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-decomposition ``M = V diag(eigenvalues) V^dagger``.

    Attributes:
        eigenvalues: Real eigenvalues sorted in descending order.
        eigenvectors: Unitary matrix whose columns are the eigenvectors.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        """Return ``V diag(lambda) V^dagger``."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def spectral_decompose(h):
    """Diagonalize a Hermitian matrix.

    Args:
        h: Hermitian matrix.

    Returns:
        SpectralDecomposition: Eigenvalues in descending order.

    Raises:
        NotHermitian: If ``h`` is not Hermitian within ``herm_tol``.
        ConvergenceFailure: If LAPACK fails to converge.
    """
    h = as_matrix(h)
    _require_square(h)
    if not is_hermitian(h):
        raise NotHermitian(
            f"matrix is not Hermitian (residual {hermitian_residual(h):.3e})"
        )
    sym = 0.5 * (h + h.conj().T)
    try:
        w, v = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc
    return SpectralDecomposition(w[::-1].copy(), v[:, ::-1].copy())


def check_psd(m):
    """Validate positive semidefiniteness and clip tiny negative eigenvalues.

    Args:
        m: Hermitian matrix.

    Returns:
        numpy.ndarray: The matrix with eigenvalues clipped at zero.

    Raises:
        NotPSD: If the smallest eigenvalue is below ``-psd_tol * ||M||_F``.
    """
    m = as_matrix(m)
    try:
        sd = spectral_decompose(m)
    except NotHermitian as exc:
        raise NotPSD(str(exc)) from exc
    scale = max(np.linalg.norm(m), 1e-300)
    if sd.eigenvalues[-1] < -tolerances.get().psd_tol * scale:
        raise NotPSD(f"smallest eigenvalue {sd.eigenvalues[-1]:.3e} is negative")
    if sd.eigenvalues[-1] >= 0:
        return 0.5 * (m + m.conj().T)
    clipped = SpectralDecomposition(np.clip(sd.eigenvalues, 0, None), sd.eigenvectors)
    return clipped.reconstruct()


def numerical_rank_cutoff(eigenvalues):
    """Absolute cutoff ``rank_tol * max(eigenvalues)`` below which values are zero."""
    top = float(np.max(eigenvalues)) if len(eigenvalues) else 0.0
    return tolerances.get().rank_tol * max(top, 0.0)


def hermitian_function(h, fn):
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    sd = spectral_decompose(h)
    return SpectralDecomposition(fn(sd.eigenvalues), sd.eigenvectors).reconstruct()


def psd_power(p, power):
    """Matrix power of a PSD matrix with the pseudoinverse convention.

    Eigenvalues below ``rank_tol * lambda_max`` are treated as exact zeros;
    for ``power < 0`` they map to zero (Moore-Penrose style).

    Args:
        p: Positive semidefinite matrix.
        power: Real exponent.

    Returns:
        numpy.ndarray: ``p ** power`` on the support of ``p``.
    """
    sd = spectral_decompose(p)
    lam = sd.eigenvalues
    cut = numerical_rank_cutoff(lam)
    mask = lam > cut
    out = np.zeros_like(lam)
    out[mask] = lam[mask] ** power
    if power == 0:
        out = mask.astype(float)
    return SpectralDecomposition(out, sd.eigenvectors).reconstruct()


def support_isometry(p):
    """Isometry ``V`` (columns) onto the numerical support of a PSD matrix."""
    sd = spectral_decompose(p)
    mask = sd.eigenvalues > numerical_rank_cutoff(sd.eigenvalues)
    return sd.eigenvectors[:, mask]


def support_projector(p):
    """Orthogonal projector onto the numerical support of a PSD matrix."""
    v = support_isometry(p)
    return v @ v.conj().T


def schatten_norm(m, q):
    """Schatten ``q``-norm via singular values (``q = np.inf`` allowed)."""
    s = np.linalg.svd(as_matrix(m), compute_uv=False)
    if np.isinf(q):
        return float(s[0]) if s.size else 0.0
    return float(np.sum(s**q) ** (1.0 / q))


def hs_inner(x, y):
    """Hilbert-Schmidt inner product ``Tr[X^dagger Y]``."""
    return complex(np.vdot(as_matrix(x), as_matrix(y)))


# ---------------------------------------------------------------------------
# density operators
# ---------------------------------------------------------------------------


class DensityOperator:
    """Validated density operator with a cached spectral decomposition.

    Args:
        matrix: Positive semidefinite matrix of unit trace.

    Raises:
        NotDensity: If the matrix is not Hermitian, PSD, or unit trace.
    """

    __slots__ = ("_matrix", "_spectrum")

    def __init__(self, matrix):
        m = np.array(as_matrix(matrix), dtype=complex)
        if m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise NotDensity(f"density operator must be square, got {m.shape}")
        try:
            m = check_psd(m)
        except NotPSD as exc:
            raise NotDensity(str(exc)) from exc
        tr = np.trace(m).real
        if abs(tr - 1.0) > tolerances.get().trace_tol:
            raise NotDensity(f"trace is {tr!r}, expected 1")
        m.setflags(write=False)
        self._matrix = m
        self._spectrum = None

    @property
    def matrix(self):
        """numpy.ndarray: Read-only matrix."""
        return self._matrix

    @property
    def dim(self):
        """int: Hilbert-space dimension."""
        return self._matrix.shape[0]

    @property
    def spectrum(self):
        """SpectralDecomposition: Cached eigen-decomposition."""
        if self._spectrum is None:
            self._spectrum = spectral_decompose(self._matrix)
        return self._spectrum

    @property
    def lambda_min(self):
        """float: Smallest eigenvalue."""
        return float(self.spectrum.eigenvalues[-1])

    def is_full_rank(self):
        """bool: Whether every eigenvalue exceeds the rank cutoff."""
        lam = self.spectrum.eigenvalues
        return bool(lam[-1] > numerical_rank_cutoff(lam))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._matrix, dtype=dtype)

    def __repr__(self):
        return f"DensityOperator(dim={self.dim})"


def as_density(rho):
    """Return ``rho`` as a :class:`DensityOperator`, validating if needed."""
    if isinstance(rho, DensityOperator):
        return rho
    return DensityOperator(rho)


def maximally_mixed(d):
    """The state ``1/d``."""
    return np.eye(d, dtype=complex) / d


def ket(index, d):
    """Computational basis vector ``|index>`` in dimension ``d``."""
    v = np.zeros(d, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec):
    """Rank-one operator ``|v><v|``."""
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(vec, vec.conj())


def max_entangled(d, normalized=False):
    """The operator ``Phi+ = sum_ij |ii><jj|`` (or its normalized state)."""
    v = np.eye(d, dtype=complex).reshape(-1)
    m = np.outer(v, v)
    return m / d if normalized else m


# ---------------------------------------------------------------------------
# tensor products and partial traces
# ---------------------------------------------------------------------------


def tensor(*ops):
    """Kronecker product of the given matrices, left to right."""
    return functools.reduce(np.kron, [as_matrix(o) for o in ops])


_KEEP = {"A": 0, "B": 1, 0: 0, 1: 1, "a": 0, "b": 1}


def partial_trace(m, keep, dims):
    """Partial trace of a bipartite operator.

    Args:
        m: Operator on ``A (x) B`` of size ``d_A d_B``.
        keep: Subsystem to keep: ``"A"``/``0`` or ``"B"``/``1``.
        dims: Pair ``(d_A, d_B)``.

    Returns:
        numpy.ndarray: Reduced operator on the kept subsystem.

    Raises:
        DimensionMismatch: If sizes do not factor as ``d_A d_B``.
    """
    m = as_matrix(m)
    d_a, d_b = (int(d) for d in dims)
    if m.shape != (d_a * d_b, d_a * d_b):
        raise DimensionMismatch(f"matrix of shape {m.shape} is not on {d_a}x{d_b}")
    if keep not in _KEEP:
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    t = m.reshape(d_a, d_b, d_a, d_b)
    if _KEEP[keep] == 0:
        return np.einsum("ibjb->ij", t)
    return np.einsum("aiaj->ij", t)


def partial_transpose(m, dims, which="A"):
    """Partial transpose of a bipartite operator on the given subsystem."""
    m = as_matrix(m)
    d_a, d_b = dims
    t = m.reshape(d_a, d_b, d_a, d_b)
    if _KEEP[which] == 0:
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(d_a * d_b, d_a * d_b)


def gell_mann_basis(d, include_identity=False):
    """Hilbert-Schmidt orthonormal generalized Gell-Mann matrices.

    The symmetric ``(|n><m| + |m><n|)/sqrt2``, antisymmetric
    ``-i(|n><m| - |m><n|)/sqrt2`` and diagonal
    ``(sum_{k<=n}|k><k| - n|n+1><n+1|)/sqrt(n(n+1))`` elements form an
    orthonormal basis of the traceless Hermitian operators.

    Args:
        d: Dimension.
        include_identity: If True, prepend ``1/sqrt(d)`` to obtain an
            orthonormal basis of all Hermitian operators.

    Returns:
        list[numpy.ndarray]: ``d**2 - 1`` (or ``d**2``) Hermitian matrices.
    """
    basis = []
    if include_identity:
        basis.append(np.eye(d, dtype=complex) / np.sqrt(d))
    for n in range(d):
        for m in range(n + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[n, m] = s[m, n] = 1 / np.sqrt(2)
            basis.append(s)
            a = np.zeros((d, d), dtype=complex)
            a[n, m] = -1j / np.sqrt(2)
            a[m, n] = 1j / np.sqrt(2)
            basis.append(a)
    for n in range(1, d):
        g = np.zeros((d, d), dtype=complex)
        g[np.arange(n), np.arange(n)] = 1.0
        g[n, n] = -n
        basis.append(g / np.sqrt(n * (n + 1)))
    return basis


# ---------------------------------------------------------------------------
# linear maps and channels
# ---------------------------------------------------------------------------


def _choi_tensor(choi, dim_in, dim_out):
    return as_matrix(choi).reshape(dim_in, dim_out, dim_in, dim_out)


def apply_choi(choi, x, dim_in, dim_out):
    """Apply the map with Choi matrix ``choi`` to ``x`` by Choi contraction."""
    x = as_matrix(x)
    if x.shape != (dim_in, dim_in):
        raise DimensionMismatch(f"input has shape {x.shape}, map expects {dim_in}")
    return np.einsum("ij,ibjc->bc", x, _choi_tensor(choi, dim_in, dim_out))


def choi_from_function(fn, dim_in):
    """Choi matrix ``sum_ij |i><j| (x) fn(|i><j|)`` of a linear function."""
    blocks = None
    for i in range(dim_in):
        for j in range(dim_in):
            unit = np.zeros((dim_in, dim_in), dtype=complex)
            unit[i, j] = 1.0
            out = as_matrix(fn(unit))
            if blocks is None:
                dim_out = out.shape[0]
                blocks = np.zeros((dim_in, dim_out, dim_in, dim_out), dtype=complex)
            blocks[i, :, j, :] = out
    d_out = blocks.shape[1]
    return blocks.reshape(dim_in * d_out, dim_in * d_out)


class LinearMap:
    """A linear map between operator spaces, stored by its Choi matrix.

    The map need not be completely positive.  Application uses Choi
    contraction; :meth:`kraus_pairs` gives the two-sided form
    ``X -> sum_k s_k A_k X B_k^dagger``.

    Args:
        choi: Choi matrix of size ``(dim_in * dim_out)``.
        dim_in: Input dimension.
        dim_out: Output dimension.
    """

    def __init__(self, choi, dim_in, dim_out):
        choi = np.array(as_matrix(choi), dtype=complex)
        if choi.shape != (dim_in * dim_out, dim_in * dim_out):
            raise DimensionMismatch(
                f"Choi shape {choi.shape} does not match dims ({dim_in}, {dim_out})"
            )
        choi.setflags(write=False)
        self._choi = choi
        self.dim_in = int(dim_in)
        self.dim_out = int(dim_out)

    @classmethod
    def from_function(cls, fn, dim_in, dim_out=None):
        """Build a map from a Python function acting on matrices."""
        choi = choi_from_function(fn, dim_in)
        d_out = choi.shape[0] // dim_in
        if dim_out is not None and dim_out != d_out:
            raise DimensionMismatch(f"function outputs dimension {d_out}, not {dim_out}")
        return cls(choi, dim_in, d_out)

    @property
    def choi(self):
        """numpy.ndarray: Read-only Choi matrix."""
        return self._choi

    @property
    def hermitian_preserving(self):
        """bool: True iff the Choi matrix is Hermitian within ``herm_tol``."""
        return is_hermitian(self._choi)

    def __call__(self, x):
        return apply_choi(self._choi, x, self.dim_in, self.dim_out)

    def adjoint_apply(self, y):
        """Apply the Hilbert-Schmidt adjoint map to ``y``."""
        y = as_matrix(y)
        if y.shape != (self.dim_out, self.dim_out):
            raise DimensionMismatch(f"input has shape {y.shape}, expected {self.dim_out}")
        t = _choi_tensor(self._choi, self.dim_in, self.dim_out)
        return np.einsum("bc,ibjc->ij", y, t.conj())

    def adjoint(self):
        """LinearMap: The Hilbert-Schmidt adjoint."""
        return LinearMap.from_function(self.adjoint_apply, self.dim_out, self.dim_in)

    def kraus_pairs(self):
        """Two-sided Kraus form from the SVD of the Choi matrix.

        Returns:
            list[tuple[numpy.ndarray, numpy.ndarray]]: Pairs ``(A_k, B_k)``
            with ``map(X) = sum_k A_k X B_k^dagger``.
        """
        u, s, vh = np.linalg.svd(self._choi)
        cut = tolerances.get().kraus_trunc_tol * (s[0] if s.size else 0.0)
        pairs = []
        for k in np.nonzero(s > cut)[0]:
            a = np.sqrt(s[k]) * u[:, k].reshape(self.dim_in, self.dim_out).T
            b = np.sqrt(s[k]) * vh[k].conj().reshape(self.dim_in, self.dim_out).T
            pairs.append((a, b))
        return pairs

    def __repr__(self):
        return f"{type(self).__name__}(dim_in={self.dim_in}, dim_out={self.dim_out})"


def kraus_from_choi(choi, dims):
    """Kraus operators of a completely positive map.

    Args:
        choi: PSD Choi matrix.
        dims: Pair ``(dim_in, dim_out)``.

    Returns:
        list[numpy.ndarray]: ``dim_out x dim_in`` Kraus operators; eigenvalues
        of the Choi matrix below ``kraus_trunc_tol * lambda_max`` are dropped.

    Raises:
        NotPSD: If the Choi matrix is not positive semidefinite.
        DimensionMismatch: If the size does not match ``dims``.
    """
    d_in, d_out = dims
    choi = as_matrix(choi)
    if choi.shape != (d_in * d_out, d_in * d_out):
        raise DimensionMismatch(f"Choi shape {choi.shape} does not match dims {dims}")
    check_psd(choi)
    sd = spectral_decompose(choi)
    lam = sd.eigenvalues
    cut = tolerances.get().kraus_trunc_tol * max(lam[0], 0.0)
    ops = []
    for k in np.nonzero(lam > cut)[0]:
        vec = sd.eigenvectors[:, k]
        ops.append(np.sqrt(lam[k]) * vec.reshape(d_in, d_out).T)
    return ops


def choi_from_kraus(kraus):
    """Choi matrix ``sum_k |K_k>><<K_k|`` of a Kraus list."""
    kraus = [as_matrix(k) for k in kraus]
    d_out, d_in = kraus[0].shape
    vecs = np.stack([k.T.reshape(-1) for k in kraus], axis=1)
    return vecs @ vecs.conj().T


class ChannelRep(LinearMap):
    """A completely positive trace-preserving map.

    Stores the Choi matrix and a derived Kraus list.  Construct with
    :meth:`from_choi` or :meth:`from_kraus`.

    Raises:
        NotCPTP: If the map is not completely positive or not trace
            preserving within tolerance.
    """

    def __init__(self, choi, dim_in, dim_out, kraus=None):
        super().__init__(choi, dim_in, dim_out)
        try:
            psd_choi = check_psd(self._choi)
        except NotPSD as exc:
            raise NotCPTP(f"Choi matrix is not PSD: {exc}") from exc
        tp = partial_trace(psd_choi, "A", (dim_in, dim_out))
        err = float(np.max(np.abs(tp - np.eye(dim_in))))
        if err > tolerances.get().tp_tol:
            raise NotCPTP(f"map is not trace preserving (error {err:.3e})")
        if kraus is None:
            kraus = kraus_from_choi(psd_choi, (dim_in, dim_out))
        self.kraus = tuple(np.array(k, dtype=complex) for k in kraus)
        for k in self.kraus:
            k.setflags(write=False)

    @classmethod
    def from_choi(cls, choi, dim_in, dim_out):
        """Build a channel from its Choi matrix."""
        return cls(choi, dim_in, dim_out)

    @classmethod
    def from_kraus(cls, kraus):
        """Build a channel from a list of Kraus operators."""
        kraus = [as_matrix(k) for k in kraus]
        if not kraus:
            raise NotCPTP("empty Kraus list")
        d_out, d_in = kraus[0].shape
        if any(k.shape != (d_out, d_in) for k in kraus):
            raise DimensionMismatch("Kraus operators have inconsistent shapes")
        return cls(choi_from_kraus(kraus), d_in, d_out, kraus=kraus)

    def __call__(self, x):
        return apply_channel(self, x)

    def adjoint_apply(self, y):
        """Heisenberg-picture action ``sum_k K_k^dagger Y K_k``."""
        y = as_matrix(y)
        if y.shape != (self.dim_out, self.dim_out):
            raise DimensionMismatch(f"input has shape {y.shape}, expected {self.dim_out}")
        return sum(k.conj().T @ y @ k for k in self.kraus)

    def power(self, n):
        """ChannelRep: ``n``-fold composition (requires ``dim_in == dim_out``)."""
        if self.dim_in != self.dim_out:
            raise DimensionMismatch("only endomorphisms can be iterated")
        out = identity_channel(self.dim_in)
        for _ in range(n):
            out = ChannelRep.from_choi(
                choi_of_composition([out, self]), self.dim_in, self.dim_out
            )
        return out


def apply_channel(channel, x):
    """Apply a channel through its Kraus operators.

    Args:
        channel: :class:`ChannelRep`.
        x: ``dim_in`` square matrix.

    Returns:
        numpy.ndarray: ``sum_k K_k X K_k^dagger``.

    Raises:
        DimensionMismatch: If ``x`` has the wrong size.
    """
    x = as_matrix(x)
    if x.shape != (channel.dim_in, channel.dim_in):
        raise DimensionMismatch(
            f"input has shape {x.shape}, channel expects {channel.dim_in}"
        )
    return sum(k @ x @ k.conj().T for k in channel.kraus)


def choi_of_composition(maps):
    """Choi matrix of a composition of linear maps.

    Args:
        maps: Sequence of :class:`LinearMap` (or callables with ``dim_in``
            and ``dim_out`` attributes), applied first to last.

    Returns:
        numpy.ndarray: Choi matrix of ``maps[-1] o ... o maps[0]``.

    Raises:
        DimensionMismatch: If consecutive dimensions do not chain.
    """
    maps = list(maps)
    if not maps:
        raise ValueError("need at least one map")
    for first, second in zip(maps, maps[1:]):
        if first.dim_out != second.dim_in:
            raise DimensionMismatch(
                f"cannot compose map to {first.dim_out} with map from {second.dim_in}"
            )

    def composite(x):
        for m in maps:
            x = m(x)
        return x

    return choi_from_function(composite, maps[0].dim_in)


# ---------------------------------------------------------------------------
# standard channels and random objects
# ---------------------------------------------------------------------------


def identity_channel(d):
    """The identity channel on dimension ``d``."""
    return ChannelRep.from_kraus([np.eye(d, dtype=complex)])


def unitary_channel(u):
    """Conjugation ``X -> U X U^dagger``."""
    return ChannelRep.from_kraus([as_matrix(u)])


def depolarizing_channel(lam, d):
    """``X -> lam X + (1 - lam) Tr[X] 1/d``, CPTP for ``-1/(d^2-1) <= lam <= 1``."""
    choi = lam * max_entangled(d) + (1 - lam) * np.eye(d * d, dtype=complex) / d
    return ChannelRep.from_choi(choi, d, d)


def replacer_channel(tau, d_in):
    """``X -> Tr[X] tau``."""
    tau = as_density(tau).matrix
    return ChannelRep.from_choi(np.kron(np.eye(d_in), tau), d_in, tau.shape[0])


def dephasing_channel(d, gamma=1.0):
    """Dephasing in the computational basis: off-diagonals scaled by ``1 - gamma``."""
    if not 0 <= gamma <= 1:
        raise ValueError("gamma must lie in [0, 1]")

    def fn(x):
        out = (1 - gamma) * x
        out[np.diag_indices(d)] = np.diag(x)
        return out

    return ChannelRep.from_choi(choi_from_function(fn, d), d, d)


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_unitary(d, seed=None):
    """Haar-random unitary."""
    return scipy.stats.unitary_group.rvs(d, random_state=_rng(seed))


def random_density(d, seed=None, rank=None):
    """Random density operator from the induced (Ginibre) measure."""
    rng = _rng(seed)
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_channel(d_in, d_out=None, seed=None, n_kraus=None):
    """Random channel from a Haar-random Stinespring isometry."""
    rng = _rng(seed)
    d_out = d_in if d_out is None else d_out
    n_kraus = d_in * d_out if n_kraus is None else n_kraus
    g = rng.normal(size=(d_out * n_kraus, d_in)) + 1j * rng.normal(size=(d_out * n_kraus, d_in))
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    kraus = [q[k * d_out:(k + 1) * d_out, :] for k in range(n_kraus)]
    return ChannelRep.from_kraus(kraus)


def random_isometry(d_in, d_out, seed=None):
    """Haar-random isometry ``V`` with ``V^dagger V = 1``."""
    rng = _rng(seed)
    g = rng.normal(size=(d_out, d_in)) + 1j * rng.normal(size=(d_out, d_in))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ---------------------------------------------------------------------------
# JSON I/O
# ---------------------------------------------------------------------------


def matrix_to_json(m):
    """Serialize a matrix as ``{"rows", "cols", "re", "im"}``."""
    m = as_matrix(m)
    return {
        "rows": m.shape[0],
        "cols": m.shape[1],
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_json(obj):
    """Parse ``{"rows", "cols", "re", "im"}`` (``im`` optional) into a matrix.

    Raises:
        ParseError: On missing fields or inconsistent shapes.
    """
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        rows, cols = int(obj.get("rows", re.shape[0])), int(obj.get("cols", re.shape[1]))
    except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
        raise ParseError(f"malformed matrix object: {exc}") from exc
    if re.shape != (rows, cols) or im.shape != (rows, cols):
        raise ParseError(f"matrix entries do not match declared shape ({rows}, {cols})")
    return re + 1j * im


def channel_to_json(channel):
    """Serialize a channel by its Choi matrix."""
    return {
        "dim_in": channel.dim_in,
        "dim_out": channel.dim_out,
        "choi": matrix_to_json(channel.choi),
    }


def channel_from_json(obj):
    """Parse a channel given by ``choi`` (with dims) or by ``kraus``.

    Raises:
        ParseError: On malformed structure.
        NotCPTP: If the parsed map is not a channel.
    """
    if not isinstance(obj, dict):
        raise ParseError("channel JSON must be an object")
    if "kraus" in obj:
        if not isinstance(obj["kraus"], list) or not obj["kraus"]:
            raise ParseError("'kraus' must be a non-empty list")
        return ChannelRep.from_kraus([matrix_from_json(k) for k in obj["kraus"]])
    try:
        d_in, d_out = int(obj["dim_in"]), int(obj["dim_out"])
        choi = matrix_from_json(obj["choi"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed channel object: {exc}") from exc
    return ChannelRep.from_choi(choi, d_in, d_out)


def load_json(path):
    """Read a JSON file, reporting syntax errors with line and column.

    Raises:
        ParseError: If the file is missing or not valid JSON.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


__all__ = [
    "ChannelRep",
    "DensityOperator",
    "LinearMap",
    "SpectralDecomposition",
    "apply_channel",
    "apply_choi",
    "as_density",
    "as_matrix",
    "channel_from_json",
    "channel_to_json",
    "check_psd",
    "choi_from_function",
    "choi_from_kraus",
    "choi_of_composition",
    "dephasing_channel",
    "depolarizing_channel",
    "gell_mann_basis",
    "hermitian_function",
    "hs_inner",
    "identity_channel",
    "is_hermitian",
    "is_supported",
    "kraus_from_choi",
    "load_json",
    "matrix_from_json",
    "matrix_to_json",
    "max_entangled",
    "partial_trace",
    "partial_transpose",
    "psd_power",
    "random_channel",
    "random_density",
    "random_isometry",
    "random_unitary",
    "replacer_channel",
    "schatten_norm",
    "spectral_decompose",
    "support_isometry",
    "support_projector",
    "tensor",
    "unitary_channel",
]


def is_supported(rho, sigma):
    """Whether ``rho << sigma``: the mass of ``rho`` outside ``supp(sigma)``
    is at most ``support_tol``."""
    rho = as_matrix(rho)
    proj = support_projector(as_matrix(sigma))
    outside = np.trace(rho @ (np.eye(rho.shape[0]) - proj)).real
    return bool(outside <= tolerances.get().support_tol)
