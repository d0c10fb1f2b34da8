import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import PAULI_X
from qcontract import linalg
from qcontract.channels import (
    apply_local,
    apply_on_second,
    canonical_purification,
    extract_channel,
    f_coupling,
    heisenberg_reversal,
    petz_recovery,
    pinching,
    schrodinger_reversal,
)
from qcontract.errors import BandViolation, RankDeficient
from qcontract.joperator import WeightedSpace
from qcontract.monotone import CATALOG, GM, HM, power


def test_canonical_purification_examples():
    assert_allclose(canonical_purification(np.eye(2) / 2),
                    linalg.max_entangled(2, normalized=True), atol=1e-12)
    zz = np.zeros((4, 4))
    zz[0, 0] = 1
    assert_allclose(canonical_purification(np.diag([1.0, 0.0])), zz, atol=1e-12)
    psi = canonical_purification(np.diag([0.75, 0.25]))
    vec = linalg.spectral_decompose(psi).eigenvectors[:, 0].reshape(2, 2)
    assert_allclose(np.linalg.svd(vec, compute_uv=False), [np.sqrt(0.75), np.sqrt(0.25)], atol=1e-12)


def test_canonical_purification_marginals(rng):
    rho = linalg.random_density(3, seed=rng)
    psi = canonical_purification(rho)
    assert_allclose(psi @ psi, psi, atol=1e-12)
    assert_allclose(linalg.partial_trace(psi, "A", (3, 3)), rho, atol=1e-12)
    assert_allclose(linalg.partial_trace(psi, "B", (3, 3)), rho.T, atol=1e-12)


def test_extract_channel_examples(rng):
    sigma = linalg.random_density(3, seed=rng)
    ident = extract_channel(canonical_purification(sigma), 3, 3)
    assert_allclose(ident.choi, linalg.identity_channel(3).choi, atol=1e-10)
    rho_a, rho_b = linalg.random_density(2, seed=rng), linalg.random_density(3, seed=rng)
    replacer = extract_channel(np.kron(rho_a, rho_b), 2, 3)
    assert_allclose(replacer.choi, linalg.replacer_channel(rho_b, 2).choi, atol=1e-10)


def test_extract_channel_round_trip(rng):
    for d_in, d_out in ((2, 2), (2, 3), (3, 2)):
        channel = linalg.random_channel(d_in, d_out, seed=rng)
        sigma = linalg.random_density(d_in, seed=rng)
        state = apply_on_second(channel, canonical_purification(sigma), d_in)
        recovered = extract_channel(state, d_in, d_out)
        assert_allclose(recovered.choi, channel.choi, atol=1e-8)


def test_extract_channel_singular_marginal(rng):
    state = np.kron(np.diag([1.0, 0.0]), linalg.random_density(2, seed=rng))
    with pytest.raises(RankDeficient):
        extract_channel(state, 2, 2)
    channel = extract_channel(state, 2, 2, restrict_to_support=True)
    assert_allclose(channel(np.diag([0.0, 1.0])), linalg.partial_trace(state, "B", (2, 2)), atol=1e-10)


def test_apply_local_matches_kron_of_kraus(rng):
    first, second = linalg.random_channel(2, seed=rng), linalg.random_channel(3, 2, seed=rng)
    x = linalg.random_density(6, seed=rng)
    expected = sum(
        np.kron(a, b) @ x @ np.kron(a, b).conj().T for a in first.kraus for b in second.kraus
    )
    assert_allclose(apply_local(x, (2, 3), first, second), expected, atol=1e-12)


def test_petz_examples(rng):
    sigma = linalg.random_density(3, seed=rng)
    u = linalg.random_unitary(3, seed=rng)
    p = petz_recovery(linalg.unitary_channel(u), sigma)
    assert_allclose(p.choi, linalg.unitary_channel(u.conj().T).choi, atol=1e-10)
    assert_allclose(petz_recovery(linalg.identity_channel(3), sigma).choi,
                    linalg.identity_channel(3).choi, atol=1e-10)
    tau = linalg.random_density(2, seed=rng)
    p = petz_recovery(linalg.replacer_channel(tau, 3), sigma)
    y = linalg.random_density(2, seed=rng)
    assert_allclose(p(y), sigma, atol=1e-10)


@pytest.mark.parametrize("f", CATALOG, ids=lambda f: f.id)
def test_reversal_maps(f, rng):
    channel = linalg.random_channel(3, 2, seed=rng)
    sigma = linalg.random_density(3, seed=rng)
    r = heisenberg_reversal(f, channel, sigma)
    s = schrodinger_reversal(f, channel, sigma)
    assert_allclose(r(np.eye(3)), np.eye(2), atol=1e-10)
    assert_allclose(s(channel(sigma)), sigma, atol=1e-10)
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    y = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.trace(y.conj().T @ r(x)) == pytest.approx(np.trace(s(y).conj().T @ x), abs=1e-10)
    assert np.trace(channel(sigma) @ r(x)) == pytest.approx(np.trace(sigma @ x), abs=1e-10)


def test_gm_reversals_are_petz(rng):
    channel = linalg.random_channel(3, seed=rng)
    sigma = linalg.random_density(3, seed=rng)
    petz = petz_recovery(channel, sigma)
    assert_allclose(schrodinger_reversal(GM, channel, sigma).choi, petz.choi, atol=1e-10)
    assert_allclose(heisenberg_reversal(GM, channel, sigma).choi, petz.adjoint().choi, atol=1e-10)


@pytest.mark.parametrize("f", CATALOG, ids=lambda f: f.id)
def test_unitary_reversal_is_inverse(f, rng):
    u = linalg.random_unitary(3, seed=rng)
    sigma = linalg.random_density(3, seed=rng)
    s = schrodinger_reversal(f, linalg.unitary_channel(u), sigma)
    assert_allclose(s.choi, linalg.unitary_channel(u.conj().T).choi, atol=1e-10)


def test_f_coupling_gm_is_quantum_state(rng):
    channel = linalg.random_channel(2, 3, seed=rng)
    sigma = linalg.random_density(2, seed=rng)
    h = f_coupling(GM, channel, sigma)
    # the purification sum_i sqrt(l_i) |v_i>|v_i> built on sigma's eigenbasis
    lam, v = np.linalg.eigh(sigma)
    vec = sum(np.sqrt(lam[i]) * np.kron(v[:, i], v[:, i]) for i in range(2))
    psi = np.outer(vec, vec.conj())
    assert_allclose(h, apply_on_second(channel, psi, 2), atol=1e-10)


@pytest.mark.parametrize("f", CATALOG, ids=lambda f: f.id)
def test_f_coupling_marginals(f, rng):
    channel = linalg.random_channel(3, 2, seed=rng)
    sigma = linalg.random_density(3, seed=rng)
    h = f_coupling(f, channel, sigma)
    assert_allclose(linalg.partial_trace(h, "A", (3, 2)), sigma, atol=1e-10)
    assert_allclose(linalg.partial_trace(h, "B", (3, 2)), channel(sigma), atol=1e-10)


def test_f_coupling_identity_is_choi_of_J(rng):
    sigma = linalg.random_density(2, seed=rng)
    for f in CATALOG:
        h = f_coupling(f, linalg.identity_channel(2), sigma)
        space = WeightedSpace(f, sigma, 1)
        v, weights = space.eigenvectors, space.perspective
        t = h.reshape(2, 2, 2, 2)
        for i in range(2):
            for j in range(2):
                unit = np.outer(v[:, i], v[:, j].conj())
                block = np.einsum("xbyc,xy->bc", t, unit.conj())
                assert_allclose(block, weights[i, j] * unit, atol=1e-10)
        assert_allclose(linalg.partial_trace(h, "B", (2, 2)), sigma, atol=1e-10)


def test_f_coupling_hm_is_psd(rng):
    for _ in range(10):
        channel = linalg.random_channel(2, 3, seed=rng)
        sigma = linalg.random_density(2, seed=rng)
        assert np.linalg.eigvalsh(f_coupling(HM, channel, sigma)).min() > -1e-12


def test_f_coupling_requires_symmetry():
    with pytest.raises(BandViolation):
        f_coupling(power(0.3), linalg.identity_channel(2), np.eye(2) / 2)


def test_pinching_examples(rng):
    sigma = linalg.random_density(3, seed=rng)
    x = sigma @ sigma + 2 * sigma
    assert_allclose(pinching(sigma, x), x, atol=1e-12)
    y = rng.normal(size=(3, 3))
    assert_allclose(pinching(np.eye(3) / 3, y), y, atol=1e-12)
    assert_allclose(pinching(np.diag([0.75, 0.25]), PAULI_X), np.zeros((2, 2)), atol=1e-12)
    degenerate = np.diag([0.4, 0.4, 0.2])
    z = np.arange(9.0).reshape(3, 3)
    expected = z.copy()
    expected[:2, 2] = 0
    expected[2, :2] = 0
    assert_allclose(pinching(degenerate, z), expected, atol=1e-12)
