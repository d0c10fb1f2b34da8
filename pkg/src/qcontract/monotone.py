"""Operator monotone functions and their perspective functions.

The catalog contains the four classical means

* arithmetic ``AM(x) = (x + 1)/2``,
* geometric ``GM(x) = sqrt(x)``,
* harmonic ``HM(x) = 2x/(x + 1)``,
* logarithmic ``LM(x) = (x - 1)/log(x)`` (``LM(1) = 1``),

and the powers ``x**k`` for ``k`` in ``[0, 1]``.  On the positive reals
``HM <= GM <= LM <= AM``.

Each :class:`MonotoneFn` stores its boundary values ``f(0+)`` and
``f'(+inf)`` as exact metadata.  The perspective
``P_f(x, y) = y f(x/y)`` is extended to the boundary of the nonnegative
quadrant by ``P_f(0, y) = y f(0+)``, ``P_f(x, 0) = x f'(+inf)``, using
the convention ``0 * inf = 0``.
"""

import dataclasses

import numpy as np

from qcontract.errors import DomainError, ParseError

#: Sample points used to check flags and orderings.
DEFAULT_GRID = 2.0 ** np.arange(-8, 8.5, 0.5)

_LM_SERIES_RADIUS = 1e-4


def _am(x):
    return (x + 1.0) / 2.0


def _gm(x):
    return np.sqrt(x)


def _hm(x):
    return 2.0 * x / (x + 1.0)


def _lm(x):
    x = np.asarray(x, dtype=float)
    t = x - 1.0
    near = np.abs(t) < _LM_SERIES_RADIUS
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = t / np.log(x)
    series = 1 + t / 2 - t**2 / 12 + t**3 / 24 - 19 * t**4 / 720
    return np.where(near, series, direct)


def _power(k):
    def fn(x):
        return np.power(x, k)

    return fn


@dataclasses.dataclass(frozen=True)
class MonotoneFn:
    """An operator monotone function ``f: (0, inf) -> [0, inf)``.

    Attributes:
        id: Identifier, e.g. ``"GM"`` or ``"POWER(0.25)"``.
        fn: Vectorized evaluator on positive reals.
        f_zero_plus: The limit ``f(0+)`` (may be ``inf``).
        f_prime_inf: The limit ``f'(+inf)`` (may be ``inf``).
        normalized: ``f(1) = 1``.
        symmetry_inducing: ``f(x) = x f(1/x)``.
        support_restricting: ``f(0+) = 0`` and ``f'(+inf) = 0``.
        multiplicative: ``f(xy) = f(x) f(y)`` (only the powers).
        k: Exponent for power functions, else ``None``.
        verified: False for user-supplied functions, whose operator
            monotonicity cannot be checked numerically.
    """

    id: str
    fn: object = dataclasses.field(repr=False, compare=False)
    f_zero_plus: float
    f_prime_inf: float
    normalized: bool
    symmetry_inducing: bool
    support_restricting: bool
    multiplicative: bool = False
    k: float = None
    verified: bool = True

    def __call__(self, x):
        return evaluate(self, x)

    @property
    def name(self):
        """str: Lower-case command-line name (``gm``, ``power:0.25`` ...)."""
        if self.k is not None:
            return f"power:{self.k:g}"
        return self.id.lower()

    @classmethod
    def custom(cls, name, fn, f_zero_plus, f_prime_inf, grid=None):
        """Wrap a user-supplied function.

        Flags are computed numerically on ``grid``; the result is marked
        ``verified=False`` because operator monotonicity itself is not
        checkable numerically.

        Args:
            name: Identifier.
            fn: Vectorized evaluator on positive reals.
            f_zero_plus: Value of ``f(0+)``.
            f_prime_inf: Value of ``f'(+inf)``.
            grid: Sample points (defaults to ``2**-8 ... 2**8``).
        """
        grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
        vals = np.asarray(fn(grid), dtype=float)
        mirrored = grid * np.asarray(fn(1.0 / grid), dtype=float)
        return cls(
            id=name,
            fn=fn,
            f_zero_plus=float(f_zero_plus),
            f_prime_inf=float(f_prime_inf),
            normalized=bool(abs(float(fn(1.0)) - 1.0) <= 1e-12),
            symmetry_inducing=bool(np.all(np.abs(vals - mirrored) <= 1e-12 * np.maximum(1, np.abs(vals)))),
            support_restricting=(f_zero_plus == 0 and f_prime_inf == 0),
            verified=False,
        )


AM = MonotoneFn("AM", _am, 0.5, 0.5, True, True, False)
GM = MonotoneFn("GM", _gm, 0.0, 0.0, True, True, True)
HM = MonotoneFn("HM", _hm, 0.0, 0.0, True, True, True)
LM = MonotoneFn("LM", _lm, 0.0, 0.0, True, True, True)

#: The four standard means, in increasing order ``HM <= GM <= LM <= AM``.
CATALOG = (HM, GM, LM, AM)


def power(k):
    """The operator monotone power ``x**k`` for ``0 <= k <= 1``.

    Raises:
        DomainError: If ``k`` lies outside ``[0, 1]``.
    """
    k = float(k)
    if not 0.0 <= k <= 1.0:
        raise DomainError(f"power exponent must lie in [0, 1], got {k}")
    f0 = 1.0 if k == 0 else 0.0
    finf = 1.0 if k == 1 else 0.0
    return MonotoneFn(
        id=f"POWER({k:g})",
        fn=_power(k),
        f_zero_plus=f0,
        f_prime_inf=finf,
        normalized=True,
        symmetry_inducing=abs(k - 0.5) <= 1e-12,
        support_restricting=(f0 == 0 and finf == 0),
        multiplicative=True,
        k=k,
    )


def from_name(name):
    """Resolve a command-line name: ``am``, ``gm``, ``hm``, ``lm`` or ``power:<k>``.

    Raises:
        ParseError: If the name is not recognised.
    """
    key = name.strip().lower()
    table = {f.id.lower(): f for f in CATALOG}
    if key in table:
        return table[key]
    if key.startswith("power:"):
        try:
            k = float(key.split(":", 1)[1])
        except ValueError as exc:
            raise ParseError(f"bad power exponent in {name!r}") from exc
        try:
            return power(k)
        except DomainError as exc:
            raise ParseError(str(exc)) from exc
    raise ParseError(f"unknown monotone function {name!r}; use am|gm|hm|lm|power:<k>")


def evaluate(f, x):
    """Evaluate ``f`` at positive reals.

    Args:
        f: :class:`MonotoneFn`.
        x: Positive scalar or array.

    Returns:
        float or numpy.ndarray: ``f(x)``; ``LM`` uses its continuous
        extension at ``x = 1``.

    Raises:
        DomainError: If any ``x <= 0``.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("monotone functions are evaluated on x > 0 only")
    out = np.asarray(f.fn(arr), dtype=float)
    return float(out) if out.ndim == 0 else out


def _times(a, b):
    """Product with the convention ``0 * inf = 0``."""
    out = np.multiply(a, b)
    return np.where((np.asarray(a) == 0) | (np.asarray(b) == 0), 0.0, out)


def perspective(f, x, y):
    """Perspective function ``P_f(x, y)`` on the nonnegative quadrant.

    Args:
        f: :class:`MonotoneFn`.
        x: Nonnegative scalar or array.
        y: Nonnegative scalar or array (broadcast against ``x``).

    Returns:
        float or numpy.ndarray: ``y f(x/y)`` for ``x, y > 0``; ``y f(0+)``
        when ``x = 0``; ``x f'(+inf)`` when ``y = 0``.

    Raises:
        DomainError: If an argument is negative.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any(x < 0) or np.any(y < 0):
        raise DomainError("perspective is defined for x, y >= 0")
    out = np.zeros(x.shape, dtype=float)
    both = (x > 0) & (y > 0)
    if np.any(both):
        out[both] = y[both] * np.asarray(f.fn(x[both] / y[both]), dtype=float)
    xzero = (x == 0) & (y > 0)
    out[xzero] = _times(y[xzero], f.f_zero_plus)
    yzero = (y == 0) & (x > 0)
    out[yzero] = _times(x[yzero], f.f_prime_inf)
    return float(out) if out.ndim == 0 else out


def perspective_matrix(f, eigenvalues):
    """Matrix ``[P_f(lambda_i, lambda_j)]_{ij}`` for nonnegative eigenvalues."""
    lam = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, None)
    return perspective(f, lam[:, None], lam[None, :])


def ordering_check(f1, f2, grid=None):
    """Check ``f1 <= f2`` pointwise on a grid of positive reals.

    Args:
        f1: :class:`MonotoneFn`.
        f2: :class:`MonotoneFn`.
        grid: Positive sample points (defaults to ``2**-8 ... 2**8``).

    Returns:
        bool: True iff ``f1(x) <= f2(x) + 1e-12`` at every grid point.
    """
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    a = np.atleast_1d(evaluate(f1, grid))
    b = np.atleast_1d(evaluate(f2, grid))
    return bool(np.all(a <= b + 1e-12))


__all__ = [
    "AM",
    "CATALOG",
    "DEFAULT_GRID",
    "GM",
    "HM",
    "LM",
    "MonotoneFn",
    "evaluate",
    "from_name",
    "ordering_check",
    "perspective",
    "perspective_matrix",
    "power",
]
