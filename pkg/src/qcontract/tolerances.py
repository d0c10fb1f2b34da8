"""Numerical tolerances shared by all modules.

Defaults live in :data:`DEFAULT`.  They can be overridden for a block of
code with :func:`override`, which uses a context variable and is therefore
safe under threads and asyncio tasks::

    with override(rank_tol=1e-8):
        report = contraction_coefficient(GM, channel, sigma)
"""

import contextlib
import contextvars
import dataclasses


@dataclasses.dataclass(frozen=True)
class Tolerances:
    """Tolerance settings.

    Attributes:
        herm_tol: Relative Hermiticity tolerance (times ``||M||_F``).
        psd_tol: Relative tolerance on negative eigenvalues (times ``||M||_F``).
        recon_tol: Relative reconstruction tolerance for decompositions.
        tp_tol: Absolute tolerance for trace preservation checks.
        kraus_trunc_tol: Kraus eigenvalue cutoff, relative to the largest
            Choi eigenvalue.
        rank_tol: Eigenvalue cutoff relative to the largest eigenvalue;
            smaller eigenvalues count as zero.
        trace_tol: Absolute tolerance on unit trace of density operators.
        gs_tol: Maximum allowed deviation from orthonormality after
            Gram-Schmidt.
        gs_floor: Relative norm floor below which Gram-Schmidt declares
            linear dependence.
        imag_tol: Maximum imaginary/asymmetric residual tolerated in the
            standard matrix.
        eta_range_tol: Slack outside ``[0, 1]`` tolerated before clamping a
            contraction coefficient.
        eta_gap_tol: Distance from 1 under which a coefficient counts as 1.
        fix_tol: Frobenius tolerance for ``E(pi) = pi``.
        support_tol: Mass of ``rho`` outside ``supp(sigma)`` that still
            counts as ``rho << sigma``.
    """

    herm_tol: float = 1e-9
    psd_tol: float = 1e-9
    recon_tol: float = 1e-10
    tp_tol: float = 1e-8
    kraus_trunc_tol: float = 1e-10
    rank_tol: float = 1e-10
    trace_tol: float = 1e-9
    gs_tol: float = 1e-9
    gs_floor: float = 1e-12
    imag_tol: float = 1e-6
    eta_range_tol: float = 1e-7
    eta_gap_tol: float = 1e-7
    fix_tol: float = 1e-8
    support_tol: float = 1e-10


DEFAULT = Tolerances()

_current = contextvars.ContextVar("qcontract_tolerances", default=DEFAULT)


def get():
    """Return the tolerances active in the current context."""
    return _current.get()


@contextlib.contextmanager
def override(**changes):
    """Temporarily replace selected tolerances.

    Args:
        **changes: Field names of :class:`Tolerances` and their new values.

    Raises:
        ValueError: If a name is unknown or a value is not positive.
    """
    names = {f.name for f in dataclasses.fields(Tolerances)}
    for key, value in changes.items():
        if key not in names:
            raise ValueError(f"unknown tolerance {key!r}")
        if not value > 0:
            raise ValueError(f"tolerance {key} must be positive, got {value}")
    token = _current.set(dataclasses.replace(_current.get(), **changes))
    try:
        yield _current.get()
    finally:
        _current.reset(token)
