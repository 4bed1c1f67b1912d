import numpy as np
import pytest

from boundsim.errors import EmptyCounts, NegativeWeight, OutOfRange, SingularSystem, ValidationError
from boundsim.expsim import (
    NoiseModel,
    TomographySet,
    anticorrelate_bob,
    expected_counts,
    mcp_from_counts,
    measurement_budget,
    oam_relabel,
    probabilities_from_counts,
    reconstruct,
    retroactive_mix,
    simulate_counts,
    simulate_mcp,
    simulate_tomography,
    spdc_state,
    tomography_settings,
)
from boundsim.mubs import conjugate_basis, mub_family
from boundsim.numkernel import fidelity
from boundsim.simplex import SimplexCoeffs, bell_state, coeffs_from_family, random_simplex, state_from_coeffs
from boundsim.witness import joint_prob_table, mcp

E = np.eye(3)


def test_budget_values():
    assert measurement_budget(3).as_tuple() == (225, 12, 36)
    assert measurement_budget(2).as_tuple() == (36, 6, 12)
    assert measurement_budget(5).as_tuple() == (2025, 30, 150)
    with pytest.raises(ValidationError):
        measurement_budget(1)


def test_background_only_mean():
    noise = NoiseModel(peak=1500, background=5)
    # |0> x |1> never fires for P00
    assert expected_counts(0, E[0], E[1], noise) == pytest.approx(5)
    draws = [simulate_counts(0, E[0], E[1], noise, setting_id=s) for s in range(2000)]
    assert np.mean(draws) == pytest.approx(5, abs=0.25)


def test_perfectly_correlated_mean():
    noise = NoiseModel(peak=1500, background=0)
    assert expected_counts(0, E[0], E[0], noise) == pytest.approx(1500)
    draws = [simulate_counts(0, E[0], E[0], NoiseModel(1500, 0, seed=s)) for s in range(1000)]
    assert abs(np.mean(draws) - 1500) <= 0.05 * 1500


def test_orthogonal_setting_without_background_is_silent():
    noise = NoiseModel(peak=1500, background=0)
    assert all(simulate_counts(0, E[0], E[2], noise, setting_id=s) == 0 for s in range(50))


def test_windows_scale_the_mean():
    assert expected_counts(0, E[0], E[0], NoiseModel(1500, 5, windows=3)) == pytest.approx(3 * 1505)


def test_draws_are_reproducible_and_order_independent():
    noise = NoiseModel(seed=11)
    a = simulate_mcp(3, noise)
    b = simulate_mcp(3, noise)
    assert all(np.array_equal(x.counts, y.counts) for x, y in zip(a, b))
    fam = mub_family(3)
    # record 2 is basis 0, outcomes (0, 2); redraw its Bell-state-4 count on its own
    assert a[2].basis == 0 and a[2].outcome == (0, 2)
    single = simulate_counts(4, fam.bases[0][0], conjugate_basis(fam.bases[0])[2], noise, setting_id=a[2].setting_id)
    assert single == a[2].counts[4]


def test_noise_and_ket_validation():
    with pytest.raises(ValidationError):
        NoiseModel(peak=-1)
    with pytest.raises(ValidationError):
        expected_counts(0, np.ones(3), E[0], NoiseModel())
    with pytest.raises(OutOfRange):
        expected_counts(9, E[0], E[0], NoiseModel())


def test_retroactive_mix_examples(rng):
    recs = simulate_mcp(3, NoiseModel(seed=2))
    vertex = np.zeros((3, 3))
    vertex[0, 0] = 1
    for r in retroactive_mix(recs, SimplexCoeffs(3, vertex)):
        assert r.mixed == r.counts[0]
    for r in retroactive_mix(recs, SimplexCoeffs(3, np.full((3, 3), 1 / 9))):
        assert r.mixed == pytest.approx(r.counts.mean(), rel=1e-12)
    bad = np.full((3, 3), 0.125)
    bad[0, 0] = -0.125  # sums to 1 but is not a mixture
    bad[0, 1] = 0.25
    with pytest.raises(NegativeWeight):
        retroactive_mix(recs, bad)


def test_retroactive_mix_is_linear(rng):
    recs = simulate_mcp(3, NoiseModel(background=0), expected=True)
    a, b = random_simplex(3, rng), random_simplex(3, rng)
    t = 0.3
    mix = SimplexCoeffs(3, t * a.c + (1 - t) * b.c)
    ma, mb, mm = (retroactive_mix(recs, c) for c in (a, b, mix))
    for x, y, z in zip(ma, mb, mm):
        assert z.mixed == pytest.approx(t * x.mixed + (1 - t) * y.mixed, abs=1e-9)


def test_noiseless_mixture_reproduces_joint_probabilities(featured):
    c = coeffs_from_family(featured)
    rho = state_from_coeffs(c)
    mixed = retroactive_mix(simulate_mcp(3, NoiseModel(background=0), expected=True), c)
    fam = mub_family(3)
    for k in range(4):
        gamma = np.zeros((3, 3))
        for r in mixed:
            if r.basis == k:
                gamma[r.outcome] = r.mixed
        P = probabilities_from_counts(gamma)
        assert np.abs(P - joint_prob_table(rho, fam.bases[k], conjugate_basis(fam.bases[k]))).max() <= 1e-9
    rep = mcp_from_counts(mixed, 3, "methods")
    assert rep.witness == pytest.approx(mcp(rho, labeling="methods").witness, abs=1e-9)


def test_probabilities_from_counts():
    assert np.allclose(probabilities_from_counts(np.full(9, 10)), 1 / 9)
    one = np.zeros(9)
    one[0] = 100
    assert np.array_equal(probabilities_from_counts(one), np.eye(9)[0])
    with pytest.raises(EmptyCounts):
        probabilities_from_counts(np.zeros(9))
    with pytest.raises(ValidationError):
        probabilities_from_counts([-1, 2])


def test_featured_c1_estimate_over_seeds(featured):
    c = coeffs_from_family(featured)
    est = np.array(
        [mcp_from_counts(retroactive_mix(simulate_mcp(3, NoiseModel(seed=s)), c), 3, "methods").correlations[0] for s in range(100)]
    )
    assert abs(est.mean() - 0.675) <= 0.02
    assert np.mean(np.abs(est - 0.675) <= 0.02) >= 0.95


def test_probabilities_converge_at_high_rate(featured):
    c = coeffs_from_family(featured)
    rho = state_from_coeffs(c)
    fam = mub_family(3)
    truth = np.array([joint_prob_table(rho, fam.bases[k], conjugate_basis(fam.bases[k])) for k in range(4)])
    ok = 0
    runs = 1000
    for s in range(runs):
        mixed = retroactive_mix(simulate_mcp(3, NoiseModel(peak=1e6, background=0, seed=s)), c)
        gamma = np.zeros((4, 3, 3))
        for r in mixed:
            gamma[r.basis][r.outcome] = r.mixed
        good = True
        for k in range(4):
            n = gamma[k].sum()
            p = truth[k]
            err = np.abs(probabilities_from_counts(gamma[k]) - p)
            good &= bool(np.all(err <= 3 * np.sqrt(p * (1 - p) / n)))
        ok += good
    assert ok >= 0.95 * runs


def test_tomography_settings():
    for d in (2, 3, 4):
        t = tomography_settings(d)
        assert t.n_side == d + 2 * d * (d - 1) == d + 4 * d * (d - 1) // 2
        assert t.n_pairs == measurement_budget(d).n_qst
        assert np.allclose(np.linalg.norm(t.kets, axis=1), 1)
    assert tomography_settings(3).n_side == 15 and tomography_settings(3).n_pairs == 225
    assert tomography_settings(2).n_pairs == 36


def test_noiseless_reconstruction(featured):
    t = tomography_settings(3)
    noise = NoiseModel(background=5)
    vertex = np.zeros((3, 3))
    vertex[0, 0] = 1
    for c in (coeffs_from_family(featured), SimplexCoeffs(3, vertex)):
        mixed = retroactive_mix(simulate_tomography(t, noise, expected=True), c)
        est = reconstruct(mixed, t, background=5)
        assert fidelity(est, state_from_coeffs(c)) >= 1 - 1e-6


def test_reconstruction_of_generic_state(rng, helpers):
    # counts generated straight from a non-Bell-diagonal state
    t = tomography_settings(3)
    rho = helpers.density(rng, 9)
    counts = [4500 * np.real(np.kron(a, b).conj() @ rho @ np.kron(a, b)) for _, a, b in t.pairs()]
    assert fidelity(reconstruct(counts, t), rho) >= 1 - 1e-9


def test_noisy_reconstruction_fidelity(featured):
    c = coeffs_from_family(featured)
    rho = state_from_coeffs(c)
    t = tomography_settings(3)
    fs = [fidelity(reconstruct(retroactive_mix(simulate_tomography(t, NoiseModel(seed=s)), c), t, background=5), rho) for s in range(20)]
    assert min(fs) >= 0.97


def test_reconstruction_errors():
    t = tomography_settings(3)
    short = TomographySet(3, t.kets[:3])
    with pytest.raises(SingularSystem):
        reconstruct(np.ones(9), short)
    with pytest.raises(ValidationError):
        reconstruct(np.ones(10), t)
    with pytest.raises(SingularSystem):
        reconstruct(np.zeros(225), t)


def test_oam_relabel():
    assert [oam_relabel(x) for x in (-1, 0, 1)] == [0, 1, 2]
    with pytest.raises(OutOfRange):
        oam_relabel(2)


def test_spdc_state_maps_onto_canonical_bell_state():
    psi = spdc_state()
    rho = anticorrelate_bob(np.outer(psi, psi.conj()))
    assert np.trace(rho @ bell_state(3, 0, 0)).real == pytest.approx(1, abs=1e-12)
