"""Randomized property suites behind the ``verify`` command.

Each suite draws random states and channels from a seeded generator and
checks inequalities or identities with a fixed slack.  A suite returns a
:class:`SuiteResult` listing how many checks ran and the first
counterexample, if any, in a JSON-serializable form.
"""

import dataclasses

import numpy as np

from qcontract import linalg
from qcontract.channels import apply_local, apply_on_second
from qcontract.contraction import chi2_f, contraction_coefficient
from qcontract.correlation import correspondence_check, gm_schmidt_spectrum, mu_f
from qcontract.divergences import sandwiched_renyi
from qcontract.errors import UnknownSuite
from qcontract.joperator import WeightedSpace, variance
from qcontract.monotone import AM, CATALOG, GM, HM, LM

SLACK = 1e-8


@dataclasses.dataclass
class SuiteResult:
    """Outcome of a suite run.

    Attributes:
        suite: Suite name.
        seed: Seed used.
        trials: Number of random trials.
        checks: Number of individual assertions evaluated.
        failures: Number of failed assertions.
        counterexample: First failure, serialized, or ``None``.
    """

    suite: str
    seed: int
    trials: int
    checks: int = 0
    failures: int = 0
    counterexample: dict = None

    @property
    def passed(self):
        """bool: True when no check failed."""
        return self.failures == 0

    def record(self, ok, name, **data):
        """Record one check and keep the first counterexample."""
        self.checks += 1
        if not ok:
            self.failures += 1
            if self.counterexample is None:
                self.counterexample = {"check": name, **_serialize(data)}

    def to_json(self):
        """JSON-serializable summary."""
        return {
            "suite": self.suite,
            "seed": self.seed,
            "trials": self.trials,
            "checks": self.checks,
            "failures": self.failures,
            "passed": self.passed,
            "counterexample": self.counterexample,
        }


def _serialize(data):
    out = {}
    for key, value in data.items():
        if isinstance(value, linalg.LinearMap):
            out[key] = linalg.channel_to_json(value)
        elif isinstance(value, np.ndarray) and value.ndim == 2:
            out[key] = linalg.matrix_to_json(value)
        elif isinstance(value, (float, np.floating)):
            out[key] = float(value)
        else:
            out[key] = value
    return out


def _dpi(result, rng):
    d = int(rng.integers(2, 4))
    channel = linalg.random_channel(d, seed=rng)
    rho = linalg.random_density(d, seed=rng)
    sigma = linalg.random_density(d, seed=rng)
    for f in CATALOG:
        before = chi2_f(f, rho, sigma)
        after = chi2_f(f, channel(rho), channel(sigma))
        result.record(
            after <= before * (1 + SLACK) + SLACK, f"chi2 global DPI ({f.id})",
            channel=channel, rho=rho, sigma=sigma, before=before, after=after,
        )
    herm = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    x = herm + herm.conj().T
    for f in CATALOG:
        lhs = variance(f, sigma, channel.adjoint_apply(x))
        rhs = variance(f, channel(sigma), x)
        result.record(
            lhs <= rhs + SLACK * max(1.0, abs(rhs)), f"variance DPI ({f.id})",
            channel=channel, sigma=sigma, x=x, lhs=lhs, rhs=rhs,
        )
    state = linalg.random_density(4, seed=rng)
    first, second = linalg.random_channel(2, seed=rng), linalg.random_channel(2, seed=rng)
    processed = apply_local(state, (2, 2), first, second)
    for f in (AM, LM, GM):
        before, after = mu_f(f, state, 2, 2).mu, mu_f(f, processed, 2, 2).mu
        result.record(after <= before + SLACK, f"mu local DPI ({f.id})",
                      state=state, before=before, after=after)
    one_sided = apply_on_second(second, state, 2)
    other = linalg.random_density(4, seed=rng)
    for f in CATALOG:
        before = chi2_f(f, state, other)
        after = chi2_f(f, one_sided, apply_on_second(second, other, 2))
        result.record(
            after <= before * (1 + SLACK) + SLACK, f"chi2 local DPI ({f.id})",
            channel=second, rho=state, sigma=other, before=before, after=after,
        )
    lam, omega = gm_schmidt_spectrum(state, 2, 2), gm_schmidt_spectrum(one_sided, 2, 2)
    omega = np.pad(omega, (0, max(0, len(lam) - len(omega))))
    lam = np.pad(lam, (0, max(0, len(omega) - len(lam))))
    result.record(bool(np.all(omega <= lam + SLACK)), "GM spectrum majorization",
                  state=state, channel=second)


def _ordering(result, rng):
    d = int(rng.integers(2, 4))
    rho = linalg.random_density(d, seed=rng)
    sigma = linalg.random_density(d, seed=rng)
    values = [chi2_f(f, rho, sigma) for f in (AM, LM, GM, HM)]
    ok = all(a <= b + 1e-9 for a, b in zip(values, values[1:]))
    result.record(ok, "chi2 ordering AM<=LM<=GM<=HM", rho=rho, sigma=sigma, values=values)
    state = linalg.random_density(4, seed=rng)
    mus = [mu_f(f, state, 2, 2).mu for f in (AM, LM, GM)]
    ok = all(a <= b + 1e-9 for a, b in zip(mus, mus[1:]))
    result.record(ok, "mu ordering AM<=LM<=GM", state=state, values=mus)


def _correspondence(result, rng):
    d = int(rng.integers(2, 4))
    channel = linalg.random_channel(d, seed=rng)
    sigma = linalg.random_density(d, seed=rng)
    for f in CATALOG:
        check = correspondence_check(f, channel, sigma)
        result.record(check.passed, f"correspondence ({f.id})", channel=channel,
                      sigma=sigma, sqrt_eta=check.sqrt_eta, mu=check.mu_on_coupling)


def _identities(result, rng):
    d = int(rng.integers(2, 4))
    rho = linalg.random_density(d, seed=rng)
    sigma = linalg.random_density(d, seed=rng)
    chi = chi2_f(GM, rho, sigma)
    renyi = sandwiched_renyi(2, rho, sigma).value
    result.record(abs(chi - (2**renyi - 1)) <= 1e-9 * max(1, chi), "chi2_GM = 2^D2 - 1",
                  rho=rho, sigma=sigma, chi=chi, renyi=renyi)
    for f in CATALOG:
        ratio = WeightedSpace(f, sigma, -1.0).apply(rho)
        var = variance(f, sigma, ratio)
        chi_f = chi2_f(f, rho, sigma)
        result.record(abs(var - chi_f) <= 1e-9 * max(1, chi_f), f"variance relation ({f.id})",
                      rho=rho, sigma=sigma, variance=var, chi2=chi_f)
    channel = linalg.random_channel(d, seed=rng)
    for f in CATALOG:
        report = contraction_coefficient(f, channel, sigma)
        result.record(abs(report.lambda1 - 1) <= 1e-7 and report.sigma_overlap >= 1 - 1e-6,
                      f"eigenstructure ({f.id})", channel=channel, sigma=sigma,
                      lambda1=report.lambda1, overlap=report.sigma_overlap)


SUITES = {
    "correspondence": _correspondence,
    "dpi": _dpi,
    "identities": _identities,
    "ordering": _ordering,
}


def run_suite(name, seed=0, trials=20):
    """Run a named suite deterministically.

    Args:
        name: One of :data:`SUITES`.
        seed: Seed for :func:`numpy.random.default_rng`.
        trials: Number of random trials.

    Returns:
        SuiteResult: Summary with the first counterexample.

    Raises:
        UnknownSuite: If ``name`` is not a known suite.
    """
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    rng = np.random.default_rng(seed)
    result = SuiteResult(name, int(seed), int(trials))
    for _ in range(trials):
        SUITES[name](result, rng)
    return result


__all__ = ["SUITES", "SuiteResult", "run_suite"]
