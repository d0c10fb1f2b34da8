import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import oracle_eta, oracle_J_matrix
from qcontract import linalg, tolerances
from qcontract.contraction import (
    INFINITY,
    chi2_f,
    contraction_coefficient,
    contraction_extreme_check,
    dpi_saturated,
    get_onb,
    in_relative_entropy_band,
    mixing_time_bound,
    standard_matrix,
)
from qcontract.divergences import sandwiched_renyi, trace_distance
from qcontract.errors import BandViolation, RankDeficient, SupportViolation
from qcontract.monotone import AM, CATALOG, GM, HM, LM, power


def test_chi2_examples(rng):
    sigma = linalg.random_density(3, seed=rng)
    for f in CATALOG:
        assert chi2_f(f, sigma, sigma) == pytest.approx(0.0, abs=1e-12)
        assert chi2_f(f, np.diag([0.5, 0.5]), np.diag([0.25, 0.75])) == pytest.approx(1 / 3)


@pytest.mark.parametrize("f", CATALOG, ids=lambda f: f.id)
def test_chi2_matches_closed_form_J(f, rng):
    rho, sigma = linalg.random_density(3, seed=rng), linalg.random_density(3, seed=rng)
    diff = rho - sigma
    mat = oracle_J_matrix(f, sigma)
    expected = np.vdot(diff.reshape(-1), np.linalg.solve(mat, diff.reshape(-1))).real
    assert chi2_f(f, rho, sigma) == pytest.approx(expected, rel=1e-8)


def test_chi2_gm_is_collision_divergence(rng):
    rho, sigma = linalg.random_density(3, seed=rng), linalg.random_density(3, seed=rng)
    renyi = sandwiched_renyi(2, rho, sigma).value
    assert chi2_f(GM, rho, sigma) == pytest.approx(2**renyi - 1, abs=1e-9)


def test_chi2_infinite_off_support():
    assert chi2_f(GM, np.diag([0.0, 1.0]), np.diag([1.0, 0.0])) == INFINITY


@pytest.mark.parametrize("f", CATALOG, ids=lambda f: f.id)
def test_onb_is_orthonormal(f, rng):
    sigma = linalg.random_density(3, seed=rng)
    basis = get_onb(f, sigma)
    assert len(basis.elements) == 9
    assert basis.condition <= 1e-10
    mat = oracle_J_matrix(f, sigma)
    inv = lambda x: np.linalg.solve(mat, x.reshape(-1))  # noqa: E731
    gram = np.array([[np.vdot(a.reshape(-1), inv(b)) for b in basis.elements]
                     for a in basis.elements])
    assert_allclose(gram, np.eye(9), atol=1e-8)
    for e in basis.elements:
        assert_allclose(e, e.conj().T, atol=1e-12)
    root = linalg.psd_power(sigma, 0.5)
    first = basis.elements[0]
    ratio = first[0, 0] / root[0, 0]
    assert_allclose(first, ratio * root, atol=1e-12)
    # the remaining elements are orthogonal to the first slot
    for e in basis.elements[1:]:
        assert abs(basis.space.inner(first, e)) < 1e-10


def test_onb_elements_after_first_are_traceless_for_maximally_mixed():
    for f in CATALOG:
        for e in get_onb(f, np.eye(3) / 3).elements[1:]:
            assert abs(np.trace(e)) < 1e-12


@pytest.mark.parametrize("f", CATALOG, ids=lambda f: f.id)
def test_non_top_eigenvectors_are_traceless(f, rng):
    channel = linalg.random_channel(3, seed=rng)
    sigma = linalg.random_density(3, seed=rng)
    report = contraction_coefficient(f, channel, sigma)
    top = report.basis.combine(report.eigenvectors[:, 0])
    assert_allclose(top / np.trace(top), sigma, atol=1e-8)
    for k in range(1, 9):
        assert abs(np.trace(report.basis.combine(report.eigenvectors[:, k]))) < 1e-8


def test_onb_maximally_mixed_is_rescaled_gell_mann():
    for f in CATALOG:
        basis = get_onb(f, np.eye(3) / 3)
        assert_allclose(basis.elements[0], np.eye(3) / 3, atol=1e-12)
        for e, g in zip(basis.elements[1:], linalg.gell_mann_basis(3)):
            assert_allclose(e, g / np.sqrt(3), atol=1e-12)


def test_onb_qubit_gram_identity():
    basis = get_onb(GM, np.eye(2) / 2)
    gram = np.array([[basis.space.inner(a, b) for b in basis.elements] for a in basis.elements])
    assert_allclose(gram, np.eye(4), atol=1e-10)


def test_onb_requires_full_rank():
    with pytest.raises(RankDeficient):
        get_onb(GM, np.diag([1.0, 0.0]))


def test_contraction_examples(rng):
    sigma = linalg.random_density(3, seed=rng)
    tau = linalg.random_density(2, seed=rng)
    depol = linalg.depolarizing_channel(0.7, 2)
    for f in CATALOG:
        assert contraction_coefficient(f, linalg.identity_channel(3), sigma).eta == pytest.approx(1.0)
        assert contraction_coefficient(f, linalg.replacer_channel(tau, 3), sigma).eta <= 1e-10
        assert contraction_coefficient(f, depol, np.eye(2) / 2).eta == pytest.approx(0.49, abs=1e-12)


@pytest.mark.parametrize("f", CATALOG, ids=lambda f: f.id)
def test_contraction_matches_generalized_eigenproblem(f, rng):
    for d_in, d_out in ((2, 2), (3, 3), (3, 2), (2, 3)):
        channel = linalg.random_channel(d_in, d_out, seed=rng)
        sigma = linalg.random_density(d_in, seed=rng)
        report = contraction_coefficient(f, channel, sigma)
        assert report.eta == pytest.approx(oracle_eta(f, channel, sigma), abs=1e-8)
        assert abs(report.lambda1 - 1) <= 1e-7
        assert report.sigma_overlap >= 1 - 1e-6


def test_contraction_is_monotone_in_f(rng):
    channel = linalg.random_channel(3, seed=rng)
    sigma = linalg.random_density(3, seed=rng)
    etas = [contraction_coefficient(f, channel, sigma).eta for f in CATALOG]
    assert all(a <= b + 1e-10 for a, b in zip(etas, etas[1:]))


def test_contraction_rank_deficient_output_with_am(rng):
    # full amplitude damping: E(sigma) = |0><0| is singular
    channel = linalg.ChannelRep.from_kraus([np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]])])
    assert_allclose(channel(np.eye(2) / 2), np.diag([1.0, 0.0]))
    with pytest.raises(RankDeficient):
        contraction_coefficient(AM, channel, np.eye(2) / 2)
    assert contraction_coefficient(GM, channel, np.eye(2) / 2).eta <= 1e-10


def test_standard_matrix_is_real_symmetric(rng):
    channel = linalg.random_channel(2, seed=rng)
    sigma = linalg.random_density(2, seed=rng)
    report = contraction_coefficient(LM, channel, sigma)
    t, _ = standard_matrix(LM, channel, sigma, report.basis)
    assert np.max(np.abs(t - t.conj().T)) < 1e-8
    assert report.imag_residual < 1e-6
    assert_allclose(report.standard_matrix, t.real, atol=1e-8)
    assert report.to_json()["eta"] == pytest.approx(report.eta)


def test_dpi_saturated_examples(rng):
    sigma = linalg.random_density(3, seed=rng)
    rho = linalg.random_density(3, seed=rng)
    unitary = linalg.unitary_channel(linalg.random_unitary(3, seed=rng))
    for f in CATALOG:
        result = dpi_saturated(f, unitary, rho, sigma)
        assert result.saturated and result.residual <= 1e-9
    replacer = linalg.replacer_channel(linalg.random_density(2, seed=rng), 3)
    result = dpi_saturated(GM, replacer, rho, sigma)
    assert not result.saturated
    assert_allclose(result.recovered, sigma, atol=1e-10)


def test_dpi_saturated_dephasing_cases(rng):
    channel = linalg.dephasing_channel(3)
    rho = np.diag(rng.dirichlet(np.ones(3)))
    sigma = np.diag(rng.dirichlet(np.ones(3)))
    for f in CATALOG:
        assert dpi_saturated(f, channel, rho, sigma).saturated
    off = linalg.random_density(3, seed=rng)
    for f in CATALOG:
        assert not dpi_saturated(f, channel, off, sigma).saturated


def test_dpi_saturated_preconditions():
    with pytest.raises(BandViolation):
        dpi_saturated(power(0.2), linalg.identity_channel(2), np.eye(2) / 2, np.eye(2) / 2)
    with pytest.raises(SupportViolation):
        dpi_saturated(GM, linalg.identity_channel(2), np.diag([0.0, 1.0]), np.diag([1.0, 0.0]))


def test_extreme_check_examples(rng):
    sigma = linalg.random_density(2, seed=rng)
    tau = linalg.random_density(2, seed=rng)
    assert contraction_extreme_check(GM, linalg.replacer_channel(tau, 2), sigma).kind == "zero"
    assert contraction_extreme_check(GM, linalg.depolarizing_channel(0.7, 2), sigma).kind == "interior"
    u = linalg.random_unitary(2, seed=rng)
    result = contraction_extreme_check(GM, linalg.unitary_channel(u), sigma)
    assert result.kind == "one"
    w = result.witness
    assert np.linalg.norm(w) > 1e-6
    assert_allclose(w, w.conj().T, atol=1e-12)


def test_mixing_examples():
    depol = linalg.depolarizing_channel(0.9, 2)
    report = mixing_time_bound(GM, depol, np.eye(2) / 2, 0.01)
    assert report.eta == pytest.approx(0.81)
    assert report.n == 51
    assert mixing_time_bound(GM, linalg.identity_channel(2), np.eye(2) / 2, 0.01).is_infinite
    replacer = linalg.replacer_channel(np.eye(2) / 2, 2)
    assert mixing_time_bound(GM, replacer, np.eye(2) / 2, 1e-6).n == 1


def test_mixing_relative_entropy(rng):
    depol = linalg.depolarizing_channel(0.9, 2)
    delta = 0.01
    report = mixing_time_bound(LM, depol, np.eye(2) / 2, delta, "relative_entropy")
    expected = math.ceil(math.log(2 / (delta * 0.5 * math.log(2))) / math.log(1 / 0.81))
    assert report.n == expected
    with pytest.raises(BandViolation):
        mixing_time_bound(AM, depol, np.eye(2) / 2, delta, "relative_entropy")
    assert in_relative_entropy_band(HM) and in_relative_entropy_band(GM)
    assert not in_relative_entropy_band(AM)


def test_mixing_bound_is_sound(rng):
    channel = linalg.random_channel(2, seed=rng)
    vals, vecs = np.linalg.eig(sum(np.kron(k, k.conj()) for k in channel.kraus))
    pi = vecs[:, np.argmin(np.abs(vals - 1))].reshape(2, 2)
    pi = pi / np.trace(pi)
    pi = 0.5 * (pi + pi.conj().T)
    delta = 0.05
    report = mixing_time_bound(GM, channel, pi, delta)
    power_n = channel.power(int(report.n))
    for _ in range(5):
        rho = linalg.random_density(2, seed=rng, rank=1)
        assert trace_distance(power_n(rho), pi) < delta


def test_tolerance_override_changes_gap():
    depol = linalg.depolarizing_channel(1 - 1e-9, 2)
    assert mixing_time_bound(GM, depol, np.eye(2) / 2, 0.01).is_infinite
    with tolerances.override(eta_gap_tol=1e-12):
        assert not mixing_time_bound(GM, depol, np.eye(2) / 2, 0.01).is_infinite


def test_threaded_standard_matrix_matches_serial(rng, monkeypatch):
    channel = linalg.random_channel(3, seed=rng)
    sigma = linalg.random_density(3, seed=rng)
    serial, _ = standard_matrix(LM, channel, sigma)
    monkeypatch.setenv("QCONTRACT_THREADS", "4")
    threaded, _ = standard_matrix(LM, channel, sigma)
    assert_allclose(threaded, serial, atol=1e-14)
