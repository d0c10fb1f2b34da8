"""Quantum chi-squared divergences and their contraction coefficients.

For an operator monotone ``f`` the divergence is

.. math::

    \\chi^2_f(\\rho\\|\\sigma) = \\langle \\rho-\\sigma,
        J^{-1}_{f,\\sigma}(\\rho-\\sigma)\\rangle ,

and the input-dependent contraction coefficient
``eta_{chi2_f}(E, sigma)`` equals the second largest eigenvalue of
``S_{f,E,sigma} o E`` acting on Hermitian operators with the starred inner
product ``<X, Y>* = Tr[X^dagger J^-1_{f,sigma}(Y)]``.  The largest
eigenvalue is 1, with eigenvector ``sigma``.

The coefficient is computed by building an orthonormal basis with
Gram-Schmidt (seeded with ``sigma^1/2`` and the generalized Gell-Mann
matrices), forming the standard matrix ``T_ij = <e_i, (S o E)(e_j)>*`` and
diagonalizing its symmetric part.
"""

import concurrent.futures
import dataclasses
import math
import os

import numpy as np

from qcontract import linalg, tolerances
from qcontract.channels import schrodinger_reversal
from qcontract.errors import (
    BandViolation,
    DimensionMismatch,
    DomainError,
    ImagResidualTooLarge,
    LinearDependence,
    NotFixedPoint,
    NumericalError,
    RankDeficient,
    SupportViolation,
)
from qcontract.joperator import WeightedSpace
from qcontract.monotone import HM, LM, ordering_check

INFINITY = math.inf


def _max_workers():
    try:
        return max(1, int(os.environ.get("QCONTRACT_THREADS", "1")))
    except ValueError:
        return 1


def chi2_f(f, rho, sigma):
    """Quantum chi-squared divergence ``<rho - sigma, J^-1_{f,sigma}(rho - sigma)>``.

    Args:
        f: :class:`~qcontract.monotone.MonotoneFn`.
        rho: Density operator.
        sigma: Density operator of the same dimension.

    Returns:
        float: The divergence, or ``math.inf`` if ``rho`` is not supported
        on ``supp(sigma)``.
    """
    rho = linalg.as_density(rho)
    sigma = linalg.as_density(sigma)
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"states of dimension {rho.dim} and {sigma.dim}")
    if not linalg.is_supported(rho.matrix, sigma.matrix):
        return INFINITY
    diff = rho.matrix - sigma.matrix
    value = WeightedSpace(f, sigma, -1.0).inner(diff, diff).real
    return max(float(value), 0.0)


# ---------------------------------------------------------------------------
# orthonormal basis
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class OrthonormalBasis:
    """Basis of ``Herm(A)`` orthonormal under ``<., .>*_{f,sigma}``.

    Attributes:
        elements: The basis operators in the stored basis.
        eigen_elements: The same operators written in ``sigma``'s eigenbasis.
        space: The :class:`WeightedSpace` for ``J^-1_{f,sigma}``.
        condition: ``max |G - 1|`` for the Gram matrix ``G``.
    """

    elements: tuple
    eigen_elements: tuple
    space: WeightedSpace
    condition: float

    def coordinates(self, x):
        """Coefficients ``<e_i, X>*`` of ``x`` in this basis."""
        z = self.space.to_eigenbasis(linalg.as_matrix(x))
        w = self.space.weights
        return np.array([np.sum(e.conj() * w * z) for e in self.eigen_elements])

    def combine(self, coeffs):
        """Operator ``sum_i c_i e_i``."""
        return sum(c * e for c, e in zip(coeffs, self.elements))


def _require_full_rank(sigma, what="sigma"):
    if not sigma.is_full_rank():
        raise RankDeficient(f"{what} must be full rank")


def get_onb(f, sigma):
    """Orthonormal basis of ``(Herm(A), <., .>*_{f,sigma})``.

    Modified Gram-Schmidt with one re-orthogonalization pass, applied to
    ``sigma^1/2`` followed by the generalized Gell-Mann matrices.  All
    arithmetic happens in ``sigma``'s eigenbasis, where ``J^-1`` is
    entrywise.

    Args:
        f: :class:`~qcontract.monotone.MonotoneFn`.
        sigma: Full-rank density operator.

    Returns:
        OrthonormalBasis: ``d**2`` operators; the first is proportional to
        ``sigma^1/2``.

    Raises:
        RankDeficient: If ``sigma`` is singular.
        LinearDependence: If a residual norm falls below ``gs_floor``.
        NumericalError: If the Gram matrix deviates from the identity by
            more than ``gs_tol``.
    """
    sigma = linalg.as_density(sigma)
    _require_full_rank(sigma)
    tol = tolerances.get()
    space = WeightedSpace(f, sigma, -1.0)
    w = space.weights
    seeds = [linalg.psd_power(sigma.matrix, 0.5)] + linalg.gell_mann_basis(sigma.dim)
    basis = []
    for seed in seeds:
        v = space.to_eigenbasis(seed)
        seed_norm = math.sqrt(np.sum(w * np.abs(v) ** 2))
        for _ in range(2):
            for e in basis:
                v = v - np.sum(e.conj() * w * v) * e
        norm = math.sqrt(max(np.sum(w * np.abs(v) ** 2), 0.0))
        if norm < tol.gs_floor * seed_norm:
            raise LinearDependence(f"Gram-Schmidt residual norm {norm:.3e} too small")
        basis.append(v / norm)
    stacked = np.stack([e.reshape(-1) for e in basis])
    gram = (stacked.conj() * w.reshape(-1)) @ stacked.T
    condition = float(np.max(np.abs(gram - np.eye(len(basis)))))
    if condition > tol.gs_tol:
        raise NumericalError(f"basis not orthonormal: deviation {condition:.3e}")
    elements = tuple(space.from_eigenbasis(e) for e in basis)
    return OrthonormalBasis(elements, tuple(basis), space, condition)


# ---------------------------------------------------------------------------
# contraction coefficient
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ContractionReport:
    """Result of :func:`contraction_coefficient`.

    Attributes:
        f_id: Identifier of the monotone function.
        eta: The contraction coefficient, clamped to ``[0, 1]``.
        lambda1: Largest eigenvalue of the standard matrix (should be 1).
        eigen_spectrum: All eigenvalues, descending.
        onb_condition: Deviation of the basis from orthonormality.
        imag_residual: Largest imaginary or antisymmetric part discarded
            from the standard matrix.
        sigma_overlap: Overlap of the top eigenspace with ``sigma``.
        standard_matrix: The symmetrized real standard matrix.
        eigenvectors: Its eigenvectors (columns, descending order).
        basis: The :class:`OrthonormalBasis` used.
    """

    f_id: str
    eta: float
    lambda1: float
    eigen_spectrum: np.ndarray
    onb_condition: float
    imag_residual: float
    sigma_overlap: float
    standard_matrix: np.ndarray = dataclasses.field(repr=False)
    eigenvectors: np.ndarray = dataclasses.field(repr=False)
    basis: OrthonormalBasis = dataclasses.field(repr=False)

    def to_json(self):
        """JSON-serializable summary."""
        return {
            "f": self.f_id,
            "eta": self.eta,
            "lambda1": self.lambda1,
            "spectrum": [float(x) for x in self.eigen_spectrum],
            "onb_condition": self.onb_condition,
            "imag_residual": self.imag_residual,
        }


def _check_channel_state(channel, sigma):
    sigma = linalg.as_density(sigma)
    if sigma.dim != channel.dim_in:
        raise DimensionMismatch(f"state dimension {sigma.dim} vs channel input {channel.dim_in}")
    return sigma


def standard_matrix(f, channel, sigma, basis=None):
    """Complex standard matrix ``T_ij = <e_i, (S o E)(e_j)>*_{f,sigma}``.

    Columns are evaluated action-wise and independently (in parallel when
    ``QCONTRACT_THREADS`` > 1).

    Args:
        f: :class:`~qcontract.monotone.MonotoneFn`.
        channel: :class:`~qcontract.linalg.ChannelRep`.
        sigma: Full-rank density operator.
        basis: Optional precomputed :class:`OrthonormalBasis`.

    Returns:
        tuple: ``(T, basis)``.
    """
    sigma = _check_channel_state(channel, sigma)
    basis = get_onb(f, sigma) if basis is None else basis
    recovery = schrodinger_reversal(f, channel, sigma)

    def column(e):
        return basis.coordinates(recovery(channel(e)))

    workers = _max_workers()
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(workers) as pool:
            cols = list(pool.map(column, basis.elements))
    else:
        cols = [column(e) for e in basis.elements]
    return np.stack(cols, axis=1), basis


def contraction_coefficient(f, channel, sigma):
    """Input-dependent contraction coefficient ``eta_{chi2_f}(E, sigma)``.

    Args:
        f: Symmetry-inducing :class:`~qcontract.monotone.MonotoneFn`.
        channel: :class:`~qcontract.linalg.ChannelRep`.
        sigma: Full-rank density operator on the channel input.

    Returns:
        ContractionReport: ``eta`` is the second largest eigenvalue of the
        symmetrized standard matrix.

    Raises:
        RankDeficient: If ``sigma`` is singular, or ``E(sigma)`` is singular
            and ``f`` is not support restricting.
        ImagResidualTooLarge: If the standard matrix is not real symmetric
            within ``imag_tol``.
        NumericalError: If the largest eigenvalue is not 1 or ``eta`` lies
            outside ``[0, 1]`` beyond ``eta_range_tol``.
    """
    tol = tolerances.get()
    sigma = _check_channel_state(channel, sigma)
    _require_full_rank(sigma)
    out_state = linalg.as_density(channel(sigma.matrix))
    if not out_state.is_full_rank() and not f.support_restricting:
        raise RankDeficient(
            f"E(sigma) is singular and {f.id} is not support restricting"
        )
    t, basis = standard_matrix(f, channel, sigma)
    imag_residual = float(
        max(np.max(np.abs(t.imag)), np.max(np.abs(t.real - t.real.T)))
    )
    if imag_residual > tol.imag_tol:
        raise ImagResidualTooLarge(
            f"standard matrix residual {imag_residual:.3e} exceeds {tol.imag_tol:g}"
        )
    sym = 0.5 * (t.real + t.real.T)
    vals, vecs = np.linalg.eigh(sym)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    lambda1 = float(vals[0])
    if abs(lambda1 - 1.0) > tol.eta_range_tol:
        raise NumericalError(f"largest eigenvalue {lambda1:.12g} differs from 1")
    eta = float(vals[1]) if len(vals) > 1 else 0.0
    if eta < -tol.eta_range_tol or eta > 1 + tol.eta_range_tol:
        raise NumericalError(f"eta = {eta:.12g} outside [0, 1]")
    eta = min(max(eta, 0.0), 1.0)
    sigma_coords = basis.coordinates(sigma.matrix).real
    top = vecs[:, vals >= lambda1 - tol.eta_range_tol]
    overlap = float(np.linalg.norm(top.T @ sigma_coords) / np.linalg.norm(sigma_coords))
    return ContractionReport(
        f_id=f.id,
        eta=eta,
        lambda1=lambda1,
        eigen_spectrum=vals.copy(),
        onb_condition=basis.condition,
        imag_residual=imag_residual,
        sigma_overlap=overlap,
        standard_matrix=sym,
        eigenvectors=vecs,
        basis=basis,
    )


# ---------------------------------------------------------------------------
# saturation, extremes and mixing
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class SaturationResult:
    """Result of :func:`dpi_saturated`.

    Attributes:
        saturated: Whether ``(S o E)(rho) = rho`` within tolerance.
        residual: ``||(S o E)(rho) - rho||_F``.
        recovered: ``(S o E)(rho)``.
    """

    saturated: bool
    residual: float
    recovered: np.ndarray = dataclasses.field(repr=False)

    def __bool__(self):
        return self.saturated


def dpi_saturated(f, channel, rho, sigma, tol=1e-8):
    """Certify equality in the data-processing inequality for ``chi2_f``.

    For 2-positive ``E`` and symmetry-inducing ``f``,
    ``chi2_f(E(rho)||E(sigma)) = chi2_f(rho||sigma)`` holds iff the
    Schrodinger reversal recovers ``rho``: ``(S o E)(rho) = rho``.

    Args:
        f: Symmetry-inducing :class:`~qcontract.monotone.MonotoneFn`.
        channel: :class:`~qcontract.linalg.ChannelRep`.
        rho: Density operator with ``rho << sigma``.
        sigma: Density operator.
        tol: Frobenius tolerance on the recovery residual.

    Returns:
        SaturationResult: Truth value, residual and recovered operator.

    Raises:
        SupportViolation: If ``rho`` is not supported on ``supp(sigma)``.
        BandViolation: If ``f`` is not symmetry inducing.
    """
    if not f.symmetry_inducing:
        raise BandViolation(f"{f.id} is not symmetry inducing")
    rho = linalg.as_density(rho)
    sigma = _check_channel_state(channel, sigma)
    if not linalg.is_supported(rho.matrix, sigma.matrix):
        raise SupportViolation("rho is not supported on supp(sigma)")
    recovered = schrodinger_reversal(f, channel, sigma)(channel(rho.matrix))
    residual = float(np.linalg.norm(recovered - rho.matrix))
    return SaturationResult(residual <= tol, residual, recovered)


@dataclasses.dataclass(frozen=True)
class ExtremeClassification:
    """Result of :func:`contraction_extreme_check`.

    Attributes:
        kind: ``"zero"``, ``"one"`` or ``"interior"``.
        eta: The contraction coefficient.
        witness: For ``"one"``, a traceless Hermitian ``X`` with
            ``(S o E)(X) = X``; otherwise ``None``.
    """

    kind: str
    eta: float
    witness: np.ndarray = dataclasses.field(default=None, repr=False)


def contraction_extreme_check(f, channel, sigma):
    """Classify ``eta_{chi2_f}(E, sigma)`` as zero, one, or interior.

    Args:
        f: :class:`~qcontract.monotone.MonotoneFn`.
        channel: :class:`~qcontract.linalg.ChannelRep`.
        sigma: Full-rank density operator.

    Returns:
        ExtremeClassification: With a fixed-point witness when ``eta = 1``.
    """
    gap = tolerances.get().eta_gap_tol
    report = contraction_coefficient(f, channel, sigma)
    if report.eta <= gap:
        return ExtremeClassification("zero", report.eta)
    if report.eta < 1 - gap:
        return ExtremeClassification("interior", report.eta)
    vals, vecs = report.eigen_spectrum, report.eigenvectors
    cluster = vecs[:, vals >= 1 - gap]
    s = report.basis.coordinates(linalg.as_density(sigma).matrix).real
    s = s / np.linalg.norm(s)
    candidates = cluster - np.outer(s, s @ cluster)
    best = np.argmax(np.linalg.norm(candidates, axis=0))
    coeffs = candidates[:, best] / np.linalg.norm(candidates[:, best])
    witness = report.basis.combine(coeffs)
    return ExtremeClassification("one", report.eta, 0.5 * (witness + witness.conj().T))


@dataclasses.dataclass(frozen=True)
class MixingReport:
    """Result of :func:`mixing_time_bound`.

    Attributes:
        n: Number of steps (``math.inf`` when no finite bound exists).
        eta: Contraction coefficient used.
        f_id: Identifier of the monotone function.
        metric: ``"trace_distance"`` or ``"relative_entropy"``.
        delta: Target accuracy.
        lambda_min: Smallest eigenvalue of the fixed point.
        contraction: The underlying :class:`ContractionReport`.
    """

    n: float
    eta: float
    f_id: str
    metric: str
    delta: float
    lambda_min: float
    contraction: ContractionReport = dataclasses.field(repr=False)

    @property
    def is_infinite(self):
        """bool: True when no finite bound exists."""
        return math.isinf(self.n)

    def to_json(self):
        """JSON-serializable summary (``n`` is ``"inf"`` when unbounded)."""
        return {
            "f": self.f_id,
            "n": "inf" if self.is_infinite else int(self.n),
            "eta": self.eta,
            "metric": self.metric,
            "delta": self.delta,
            "lambda_min": self.lambda_min,
        }


METRICS = ("trace_distance", "relative_entropy")


def in_relative_entropy_band(f):
    """Whether ``HM <= f <= LM`` and ``f`` is symmetry inducing."""
    return f.symmetry_inducing and ordering_check(HM, f) and ordering_check(f, LM)


def mixing_time_bound(f, channel, pi, delta, metric="trace_distance"):
    """Number of steps after which ``E^n(rho)`` is ``delta``-close to ``pi``.

    With ``eta = eta_{chi2_f}(E, pi)`` and ``lambda = lambda_min(pi)``:

    * ``trace_distance``: ``||E^n(rho) - pi||_1 <= sqrt(2/lambda) eta^(n/2)``,
      so ``n = ceil(log(2/(delta^2 lambda)) / log(1/eta))``.  Since the
      trace distance is half the 1-norm, this is conservative for it.
    * ``relative_entropy`` (``HM <= f <= LM``): ``D(E^n(rho)||pi)`` in nats
      is at most ``(2/lambda) eta^n``; in bits this is divided by ``ln 2``,
      so ``n = ceil(log(2/(delta lambda ln2)) / log(1/eta))`` with
      ``delta`` in bits.

    ``n`` is at least 1, ``eta = 0`` gives ``n = 1``, and
    ``eta >= 1 - eta_gap_tol`` gives ``math.inf``.

    Args:
        f: :class:`~qcontract.monotone.MonotoneFn`.
        channel: Channel with ``dim_in == dim_out``.
        pi: Full-rank fixed point of ``channel``.
        delta: Target accuracy, ``> 0``.
        metric: ``"trace_distance"`` or ``"relative_entropy"``.

    Returns:
        MixingReport: The bound and the data it was derived from.

    Raises:
        NotFixedPoint: If ``||E(pi) - pi||_F > fix_tol``.
        RankDeficient: If ``pi`` is singular.
        BandViolation: If ``metric`` is relative entropy and ``f`` lies
            outside ``[HM, LM]``.
        DomainError: If ``delta <= 0`` or the metric is unknown.
    """
    tol = tolerances.get()
    if metric not in METRICS:
        raise DomainError(f"metric must be one of {METRICS}, got {metric!r}")
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if channel.dim_in != channel.dim_out:
        raise DimensionMismatch("mixing requires a channel from a space to itself")
    pi = _check_channel_state(channel, pi)
    if np.linalg.norm(channel(pi.matrix) - pi.matrix) > tol.fix_tol:
        raise NotFixedPoint("E(pi) != pi")
    _require_full_rank(pi, "pi")
    if metric == "relative_entropy" and not in_relative_entropy_band(f):
        raise BandViolation(f"{f.id} is not between HM and LM")
    report = contraction_coefficient(f, channel, pi)
    eta, lam = report.eta, pi.lambda_min
    if eta >= 1 - tol.eta_gap_tol:
        n = INFINITY
    elif eta <= 0.0:
        n = 1
    else:
        if metric == "trace_distance":
            numerator = math.log(2.0 / (delta**2 * lam))
        else:
            numerator = math.log(2.0 / (delta * lam * math.log(2.0)))
        steps = numerator / math.log(1.0 / eta)
        n = max(1, math.ceil(steps - 1e-12))
    return MixingReport(n, eta, f.id, metric, float(delta), lam, report)


__all__ = [
    "ContractionReport",
    "ExtremeClassification",
    "INFINITY",
    "METRICS",
    "MixingReport",
    "OrthonormalBasis",
    "SaturationResult",
    "chi2_f",
    "contraction_coefficient",
    "contraction_extreme_check",
    "dpi_saturated",
    "get_onb",
    "in_relative_entropy_band",
    "mixing_time_bound",
    "standard_matrix",
]
