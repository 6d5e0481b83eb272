import numpy as np
import pytest
from scipy import stats
from scipy.integrate import quad

from gatelab.bipartite import BipartiteOperator, Dims, haar_unitary, make_rng, swap_operator
from gatelab.gates import diagonal_interaction
from gatelab.spectra import (
    circular_law_sample,
    cue_form_factor,
    evolve_steps,
    fd_bins,
    ks_mp,
    mp_cdf,
    mp_pdf,
    radial_ks,
    spectral_run,
    spectral_sample,
)


def _ks_by_hand(x, cdf):
    x = np.sort(x)
    n = len(x)
    f = cdf(x)
    i = np.arange(1, n + 1)
    return max(np.max(i / n - f), np.max(f - (i - 1) / n))


def test_mp_density_values():
    assert mp_pdf(4.0) == 0.0
    assert mp_pdf(-1.0) == 0.0 and mp_pdf(5.0) == 0.0
    assert mp_pdf(1.0) == pytest.approx(np.sqrt(3) / (2 * np.pi), abs=1e-12)
    assert mp_pdf(1.0) == pytest.approx(0.27566, abs=1e-5)


def test_mp_normalization_and_cdf():
    total = quad(mp_pdf, 0, 4, limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-10)
    for x in (0.1, 0.5, 1.0, 2.0, 3.5):
        assert mp_cdf(x) == pytest.approx(quad(mp_pdf, 0, x, limit=200)[0], abs=1e-10)
    assert mp_cdf(0.0) == 0.0 and mp_cdf(4.0) == pytest.approx(1.0, abs=1e-15)


def test_ks_matches_hand_computation():
    rng = make_rng(1)
    x = rng.uniform(0, 4, 500)
    assert ks_mp(x) == pytest.approx(_ks_by_hand(x, mp_cdf), abs=1e-14)
    z = circular_law_sample(300, rng)
    assert radial_ks(z) == pytest.approx(_ks_by_hand(np.abs(z), lambda r: np.clip(r, 0, 1) ** 2),
                                         abs=1e-14)


def test_radial_ks_on_unit_circle_is_maximal():
    # every |z| sits at the top of the support, so the sup distance reaches ~1 >= 1 - 1/d
    lam = np.linalg.eigvals(haar_unitary(50, make_rng(2)))
    assert radial_ks(lam) >= 1 - 1 / 50
    with pytest.raises(ValueError):
        radial_ks([])


def test_circular_law_sampler_self_consistent():
    z = circular_law_sample(2500, make_rng(3))
    assert np.all(np.abs(z) <= 1)
    assert radial_ks(z) < 0.04
    assert stats.kstest(np.angle(z), "uniform", args=(-np.pi, 2 * np.pi)).statistic < 0.04


@pytest.mark.parametrize("n,power,exact", [(8, 3, 3), (8, 20, 8), (5, 5, 5)])
def test_cue_form_factor(n, power, exact):
    mean, err = cue_form_factor(n, power, 10000, make_rng(n, power))
    assert abs(mean - exact) < 3 * err


def test_cue_form_factor_scalar_case():
    assert cue_form_factor(1, 7, 100, make_rng(0)) == (1.0, 0.0)
    with pytest.raises(ValueError):
        cue_form_factor(3, 1, 10, make_rng(0))


def test_swap_reshuffle_spectrum_unimodular():
    s = spectral_sample(swap_operator(5), "reshuffled")
    np.testing.assert_allclose(np.abs(s.eigenvalues), 1.0, atol=1e-12)


def test_scaled_singular_values_normalized():
    op = BipartiteOperator(Dims(6, 6), haar_unitary(36, make_rng(4)))
    for which in ("reshuffled", "partial-transpose"):
        s = spectral_sample(op, which)
        assert s.scaled_sq_singular.mean() == pytest.approx(1.0, abs=1e-6)
        assert np.all(s.scaled_sq_singular >= -1e-10)


def test_spectral_sample_deterministic_and_kind_checks():
    op = BipartiteOperator(Dims(4, 4), haar_unitary(16, make_rng(5)))
    a, b = spectral_sample(op, "partial-transpose"), spectral_sample(op, "partial-transpose")
    np.testing.assert_array_equal(a.scaled_sq_singular, b.scaled_sq_singular)
    with pytest.raises(ValueError):
        spectral_sample(BipartiteOperator(Dims(2, 3), haar_unitary(6, make_rng(0))), "reshuffled")
    with pytest.raises(ValueError):
        spectral_sample(op, "diagonal")


def test_evolve_steps_zero_and_one_are_bare_gate():
    op = diagonal_interaction(Dims(3, 3), 1.0, make_rng(6))
    got = dict(evolve_steps(op, [0, 1, 3], make_rng(7)))
    np.testing.assert_array_equal(got[0].mat, op.mat)
    np.testing.assert_array_equal(got[1].mat, op.mat)
    assert got[3].is_unitary()


def test_freedman_diaconis_bins():
    x = make_rng(8).uniform(0, 1, 1000)
    np.testing.assert_array_equal(fd_bins(x), np.histogram_bin_edges(x, bins="fd"))


@pytest.mark.slow
def test_haar_reshuffle_follows_mp_at_n50():
    op = BipartiteOperator(Dims(50, 50), haar_unitary(2500, make_rng(9)))
    assert spectral_sample(op, "reshuffled", eigenvalues=False).ks_mp < 0.05


@pytest.mark.slow
def test_spectral_radius_near_unit_disk_at_n20():
    for seed in range(10):
        op = BipartiteOperator(Dims(20, 20), haar_unitary(400, make_rng(10, seed)))
        s = spectral_sample(op, "reshuffled")
        assert np.max(np.abs(s.eigenvalues)) < 1 + 0.1


@pytest.mark.slow
def test_diag_step_two_shows_small_eigenvalue_excess():
    op = diagonal_interaction(Dims(50, 50), 1.0, make_rng(11))
    res = {s.step: s for s in spectral_run(op, [2, 4], kinds=("reshuffled",), seed=3)}
    assert res[2].ks_radial > res[4].ks_radial
