"""The operators ``J^p_{f,sigma}`` and the inner products they induce.

In the eigenbasis ``sigma = sum_i lambda_i |nu_i><nu_i|`` the operator acts
as a Hadamard (entrywise) product,

.. math::

    J^p_{f,\\sigma}(X) = U\\,[P_f(\\lambda_i,\\lambda_j)^p \\odot U^\\dagger X U]\\,U^\\dagger,

where ``P_f`` is the perspective of ``f``.  For ``p < 0`` entries with
``P_f = 0`` are mapped to zero (pseudoinverse).  ``p = 1`` gives the
``L2_f(sigma)`` inner product ``<X, Y>_{f,sigma} = Tr[X^dagger J(Y)]`` and
``p = -1`` its dual (starred) version.
"""

import warnings

import numpy as np

from qcontract import linalg
from qcontract.errors import BandViolation, DimensionMismatch, RankDeficientWarning
from qcontract.monotone import perspective_matrix

ALLOWED_POWERS = (-1.0, -0.5, 0.5, 1.0)


class WeightedSpace:
    """The handle ``(f, sigma, p)`` defining ``J^p_{f,sigma}``.

    The eigen-decomposition of ``sigma`` and the weight matrix
    ``P_f(lambda_i, lambda_j)^p`` are computed once at construction, so each
    application costs two basis changes.

    Args:
        f: :class:`~qcontract.monotone.MonotoneFn`.
        sigma: Density operator.
        power: One of ``-1, -0.5, 0.5, 1``.

    Raises:
        ValueError: If ``power`` is not an allowed exponent.
        NotDensity: If ``sigma`` is not a density operator.

    Warns:
        RankDeficientWarning: If ``power < 0``, ``sigma`` is singular and
            ``f`` is not support restricting, so boundary entries
            ``P_f(lambda, 0) = lambda f'(inf)`` get inverted.
    """

    def __init__(self, f, sigma, power=1.0):
        power = float(power)
        if power not in ALLOWED_POWERS:
            raise ValueError(f"power must be one of {ALLOWED_POWERS}, got {power}")
        self.f = f
        self.sigma = linalg.as_density(sigma)
        self.power = power
        sd = self.sigma.spectrum
        lam = sd.eigenvalues.copy()
        cut = linalg.numerical_rank_cutoff(lam)
        singular = lam <= cut
        lam[singular] = 0.0
        self.eigenvalues = lam
        self.eigenvectors = sd.eigenvectors
        self.rank_deficient = bool(np.any(singular))
        pm = perspective_matrix(f, lam)
        self.perspective = pm
        if power > 0:
            w = pm**power
        else:
            w = np.zeros_like(pm)
            nz = pm > 0
            w[nz] = pm[nz] ** power
            if self.rank_deficient and not f.support_restricting:
                warnings.warn(
                    f"J^{power:g} for {f.id} with singular sigma inverts boundary "
                    "entries P_f(lambda, 0) != 0",
                    RankDeficientWarning,
                    stacklevel=2,
                )
        self.weights = w
        v = self.eigenvectors[:, ~singular]
        self.support_projector = v @ v.conj().T

    @property
    def dim(self):
        """int: Dimension of the underlying space."""
        return self.sigma.dim

    def to_eigenbasis(self, x):
        """Matrix elements ``<nu_i|X|nu_j>``."""
        u = self.eigenvectors
        return u.conj().T @ x @ u

    def from_eigenbasis(self, z):
        """Inverse of :meth:`to_eigenbasis`."""
        u = self.eigenvectors
        return u @ z @ u.conj().T

    def _check(self, x):
        x = linalg.as_matrix(x)
        if x.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"operator of shape {x.shape} on a {self.dim}-dim space")
        return x

    def apply(self, x):
        """Apply ``J^p_{f,sigma}`` to ``x``."""
        x = self._check(x)
        return self.from_eigenbasis(self.weights * self.to_eigenbasis(x))

    def inner(self, x, y):
        """``Tr[X^dagger J^p(Y)]``."""
        x, y = self._check(x), self._check(y)
        xt, yt = self.to_eigenbasis(x), self.to_eigenbasis(y)
        return complex(np.sum(xt.conj() * self.weights * yt))

    def norm(self, x):
        """Induced norm ``sqrt(<X, X>)`` (real part, clipped at zero)."""
        return float(np.sqrt(max(self.inner(x, x).real, 0.0)))

    def __repr__(self):
        return f"WeightedSpace(f={self.f.id}, dim={self.dim}, power={self.power:g})"


def apply_J(space, x):
    """Apply ``J^p_{f,sigma}`` described by a :class:`WeightedSpace`.

    Args:
        space: :class:`WeightedSpace`.
        x: Square matrix of matching dimension.

    Returns:
        numpy.ndarray: ``U [P^p (.) (U^dagger X U)] U^dagger``.

    Raises:
        DimensionMismatch: If ``x`` has the wrong size.
    """
    return space.apply(x)


def inner_product(space, x, y):
    """Weighted inner product ``Tr[X^dagger J^p_{f,sigma}(Y)]``.

    Args:
        space: :class:`WeightedSpace`.
        x: Square matrix.
        y: Square matrix.

    Returns:
        complex: The inner product (real for Hermitian ``x, y`` when ``f``
        is symmetry inducing).
    """
    return space.inner(x, y)


def expectation(sigma, x):
    """Expectation ``Tr[sigma X]`` (the same for every normalized ``f``)."""
    sigma = linalg.as_matrix(sigma)
    x = linalg.as_matrix(x)
    if x.shape != sigma.shape:
        raise DimensionMismatch(f"operator shape {x.shape} vs state shape {sigma.shape}")
    return complex(np.trace(sigma @ x))


def covariance(f, sigma, x, y):
    """Non-commutative covariance ``<X - E[X] 1, J_{f,sigma}(Y - E[Y] 1)>``.

    Args:
        f: Normalized :class:`~qcontract.monotone.MonotoneFn`.
        sigma: Density operator.
        x: Square matrix.
        y: Square matrix.

    Returns:
        complex: The covariance.

    Raises:
        BandViolation: If ``f`` is not normalized.
    """
    if not f.normalized:
        raise BandViolation(f"{f.id} is not normalized")
    space = WeightedSpace(f, sigma, 1.0)
    eye = np.eye(space.dim)
    xc = linalg.as_matrix(x) - expectation(space.sigma, x) * eye
    yc = linalg.as_matrix(y) - expectation(space.sigma, y) * eye
    return space.inner(xc, yc)


def variance(f, sigma, x):
    """Non-commutative variance ``Cov_{f,sigma}(X, X)`` (real part).

    Args:
        f: Normalized :class:`~qcontract.monotone.MonotoneFn`.
        sigma: Density operator.
        x: Square matrix.

    Returns:
        float: The variance, nonnegative up to rounding.
    """
    return float(covariance(f, sigma, x, x).real)


__all__ = [
    "WeightedSpace",
    "apply_J",
    "covariance",
    "expectation",
    "inner_product",
    "variance",
]
