"""Reference quantum divergences, reported in bits.

* trace distance ``TD(rho, sigma) = 1/2 ||rho - sigma||_1``,
* relative entropy ``D(rho||sigma) = Tr[rho (log rho - log sigma)]``,
* sandwiched Renyi divergence

  .. math::

      \\tilde D_\\alpha(\\rho\\|\\sigma) = \\frac{1}{\\alpha-1}\\log
          \\mathrm{Tr}\\big[(\\sigma^{\\frac{1-\\alpha}{2\\alpha}}\\rho
          \\sigma^{\\frac{1-\\alpha}{2\\alpha}})^\\alpha\\big],

* max-divergence ``D_max(rho||sigma) = log ||sigma^-1/2 rho sigma^-1/2||_inf``.

Divergences that can be infinite return a :class:`DivergenceValue`
carrying the value (``math.inf`` as the infinity marker) and whether
``rho << sigma`` held.  All logarithms are base 2.
"""

import dataclasses
import math

import numpy as np

from qcontract import linalg
from qcontract.errors import DimensionMismatch, DomainError, NumericalError

NEGATIVE_TOL = 1e-10


@dataclasses.dataclass(frozen=True)
class DivergenceValue:
    """A divergence value with its support flag.

    Attributes:
        value: Nonnegative value in bits, or ``math.inf``.
        support_flag: Whether ``rho << sigma`` held.
    """

    value: float
    support_flag: bool

    @property
    def is_infinite(self):
        """bool: Whether the value is the infinity marker."""
        return math.isinf(self.value)

    def __float__(self):
        return float(self.value)


def _pair(rho, sigma):
    rho, sigma = linalg.as_density(rho), linalg.as_density(sigma)
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"states of dimension {rho.dim} and {sigma.dim}")
    return rho, sigma


def _finite(value, supported=True):
    if value < -NEGATIVE_TOL:
        raise NumericalError(f"divergence evaluated to {value:.3e} < 0")
    return DivergenceValue(max(float(value), 0.0), supported)


def trace_distance(rho, sigma):
    """Trace distance ``1/2 ||rho - sigma||_1`` from singular values.

    Args:
        rho: Density operator.
        sigma: Density operator.

    Returns:
        float: Value in ``[0, 1]``.
    """
    rho, sigma = _pair(rho, sigma)
    return 0.5 * linalg.schatten_norm(rho.matrix - sigma.matrix, 1)


def relative_entropy(rho, sigma):
    """Umegaki relative entropy in bits.

    Args:
        rho: Density operator.
        sigma: Density operator.

    Returns:
        DivergenceValue: ``math.inf`` if ``rho`` is not supported on
        ``supp(sigma)``.
    """
    rho, sigma = _pair(rho, sigma)
    if not linalg.is_supported(rho.matrix, sigma.matrix):
        return DivergenceValue(math.inf, False)
    p = rho.spectrum.eigenvalues
    p = p[p > linalg.numerical_rank_cutoff(p)]
    neg_entropy = float(np.sum(p * np.log(p)))
    lam, vecs = sigma.spectrum.eigenvalues, sigma.spectrum.eigenvectors
    keep = lam > linalg.numerical_rank_cutoff(lam)
    weights = np.einsum("ij,ik,kj->j", vecs.conj(), rho.matrix, vecs).real
    cross = float(np.sum(weights[keep] * np.log(lam[keep])))
    return _finite((neg_entropy - cross) / math.log(2))


def sandwiched_renyi(alpha, rho, sigma):
    """Sandwiched Renyi divergence of order ``alpha`` in bits.

    For ``alpha > 1`` the value is infinite unless ``rho << sigma``; for
    ``alpha < 1`` it is infinite only when ``rho`` and ``sigma`` have
    orthogonal supports.

    Args:
        alpha: Order in ``(0, 1)`` or ``(1, inf)``.
        rho: Density operator.
        sigma: Density operator.

    Returns:
        DivergenceValue: The divergence.

    Raises:
        DomainError: If ``alpha <= 0`` or ``alpha == 1``.
    """
    alpha = float(alpha)
    if alpha <= 0 or alpha == 1 or math.isinf(alpha):
        raise DomainError(f"alpha must lie in (0, 1) or (1, inf), got {alpha}")
    rho, sigma = _pair(rho, sigma)
    supported = linalg.is_supported(rho.matrix, sigma.matrix)
    if alpha > 1 and not supported:
        return DivergenceValue(math.inf, False)
    gamma = (1 - alpha) / (2 * alpha)
    s = linalg.psd_power(sigma.matrix, gamma)
    inner = s @ rho.matrix @ s
    ev = np.clip(linalg.spectral_decompose(0.5 * (inner + inner.conj().T)).eigenvalues, 0, None)
    q = float(np.sum(ev**alpha))
    if q <= 0:
        return DivergenceValue(math.inf, supported)
    value = math.log2(q) / (alpha - 1)
    return _finite(value, supported)


def d_max(rho, sigma):
    """Max-divergence ``log ||sigma^-1/2 rho sigma^-1/2||_inf`` in bits.

    Args:
        rho: Density operator.
        sigma: Density operator.

    Returns:
        DivergenceValue: ``math.inf`` if ``rho`` is not supported on
        ``supp(sigma)``.
    """
    rho, sigma = _pair(rho, sigma)
    if not linalg.is_supported(rho.matrix, sigma.matrix):
        return DivergenceValue(math.inf, False)
    s = linalg.psd_power(sigma.matrix, -0.5)
    top = linalg.spectral_decompose(s @ rho.matrix @ s).eigenvalues[0]
    return _finite(math.log2(top))


__all__ = [
    "DivergenceValue",
    "d_max",
    "relative_entropy",
    "sandwiched_renyi",
    "trace_distance",
]
