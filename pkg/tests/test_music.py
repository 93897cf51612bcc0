import math

import numpy as np
import pytest
import scipy.linalg

from reslimit.limits import compute_s_star
from reslimit.model import DiscreteMeasure, NoiseSpec, ProblemPriors, Scene, forward_image
from reslimit.multipole import coefficients, truncation_residual_bound
from reslimit.music import (
    build_data_matrix,
    dadT_sigma_n_bound,
    default_order,
    detect_source_number,
    detection_threshold,
    equispaced_measure,
    music_separation_requirement,
    recover_coefficients,
    separation_sweep,
)
from reslimit.reference import EXPERIMENT_1, EXPERIMENT_2, MOMENTS_1, MOMENTS_2, MOMENT_TOL

from conftest import GRID, basis


def test_noiseless_centred_source_has_single_coefficient():
    y = forward_image(DiscreteMeasure([0.0], [1.7]), GRID)
    theta = recover_coefficients(y, basis(8)).values
    assert theta[0] == pytest.approx(1.7, abs=1e-9)
    assert np.max(np.abs(theta[1:])) < 1e-9


def test_noiseless_recovery_within_truncation_bound():
    m = DiscreteMeasure([-0.2, 0.15], [1.0, -0.6])
    p = ProblemPriors(0.2, 1e-12, m.total_variation)
    for s in (4, 8, 12):
        theta = recover_coefficients(forward_image(m, GRID), basis(s)).values
        err = np.linalg.norm(theta - coefficients(m, s).values)
        # plus rounding at eps times the condition number
        cond = basis(s).singular_values[0] / basis(s).sigma_min
        assert err <= truncation_residual_bound(p, s) / basis(s).sigma_min + 1e-13 * cond


@pytest.mark.parametrize("sc,printed", [(EXPERIMENT_1, MOMENTS_1), (EXPERIMENT_2, MOMENTS_2)])
def test_experiment_moments(sc, printed):
    s = compute_s_star(sc.priors)
    mom = recover_coefficients(sc.scene(0).image(), basis(s)).moments
    for r, ref in enumerate(printed):
        if ref is not None:
            assert abs(mom[r] - ref) <= MOMENT_TOL, r


def test_data_matrix_structure():
    theta = coefficients(DiscreteMeasure([-0.3, 0.1, 0.4], [1.0, 2.0, -0.5]), 9)
    x = build_data_matrix(theta, 9)
    mom = theta.moments
    assert x.entries.shape == (5, 5)
    assert np.allclose(x.entries, scipy.linalg.hankel(mom[:5], mom[4:9]))
    for i in range(5):
        for j in range(5):
            assert x.entries[i, j] == mom[i + j]
    with pytest.raises(ValueError):
        build_data_matrix(theta, 8)


def test_data_matrix_of_single_source():
    m = DiscreteMeasure([0.5], [1.0])
    x = build_data_matrix(coefficients(m, 5), 5).entries
    d = -0.5
    assert np.allclose(x, np.array([[d ** (i + j) for j in range(3)] for i in range(3)]))


def test_threshold_examples():
    assert detection_threshold(5, 7.1e-6, basis(7).sigma_min) == pytest.approx(0.0227, abs=2e-4)
    assert detection_threshold(7, 1.38e-9, basis(10).sigma_min) == pytest.approx(0.0017, abs=2e-5)
    assert detection_threshold(5, 0.0, 0.3) == 0.0


@pytest.mark.parametrize("sc,sv", [
    (EXPERIMENT_1, (2.0375, 0.2738)),
    (EXPERIMENT_2, (3.0343, 0.3282, 0.0169)),
])
def test_experiment_detection(sc, sv):
    s_star = compute_s_star(sc.priors)
    res = detect_source_number(sc.scene(0).image(), basis(s_star), sc.s, sc.priors.sigma)
    assert res.estimated_n == sc.n
    assert np.allclose(res.singular_values[:sc.n], sv, atol=5e-3)
    assert res.singular_values[sc.n] < res.threshold


def test_zero_image_detects_nothing():
    res = detect_source_number(np.zeros(GRID.size), basis(8), 7, 1e-6)
    assert res.estimated_n == 0
    with pytest.raises(ValueError):
        detect_source_number(np.zeros(GRID.size), basis(4), 7, 1e-6)


def test_default_order_is_odd():
    assert default_order(8) == 7 and default_order(7) == 7 and default_order(10, cap=9) == 9


def test_separation_requirement_example():
    sm = basis(7).sigma_min
    req = music_separation_requirement(2, 0.5, 5, 7.1e-6, 1.0, sm)
    assert req.required == pytest.approx(0.4519, abs=2e-3)
    assert req.simplified >= req.required
    with pytest.raises(ValueError):
        music_separation_requirement(2, 0.5, 4, 7.1e-6, 1.0, sm)


def test_requirement_decreases_with_amplitude():
    vals = [music_separation_requirement(3, 1.0, 7, 1e-8, m, 0.05).required for m in (0.1, 0.5, 1.0, 4.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("n", range(2, 11))
def test_simplified_requirement_is_upper_estimate(n):
    for ratio in (1e-12, 1e-6, 1e-2):
        req = music_separation_requirement(n, 1.0, 2 * n + 1, ratio, 1.0, 1.0)
        assert req.simplified >= req.required


def test_dadT_single_source():
    res = dadT_sigma_n_bound(DiscreteMeasure([0.5], [2.0]), 1.0, 5)
    assert res.exact == pytest.approx(2.0 * (1 + 0.25 + 0.0625))
    assert res.bound is None


def test_dadT_bound_random():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        d = rng.uniform(0.5, 2)
        pos = np.sort(rng.uniform(-d, d, n))
        if np.min(np.diff(pos)) < 0.05:
            continue
        amps = rng.choice([-1, 1], n) * rng.uniform(0.5, 2, n)
        res = dadT_sigma_n_bound(DiscreteMeasure(pos, amps), d, 2 * n + 1)
        assert res.bound <= res.exact * (1 + 1e-9)


@pytest.mark.parametrize("n", [2, 3])
def test_dadT_sigma_n_scales_with_separation(n):
    seps = np.geomspace(0.005, 0.05, 6)
    vals = [dadT_sigma_n_bound(equispaced_measure(n, t), 1.0, 2 * n + 1).exact for t in seps]
    slope = np.polyfit(np.log(seps), np.log(vals), 1)[0]
    assert abs(slope - (2 * n - 2)) < 0.3


def test_singular_values_are_stable_under_noise():
    # Weyl: each singular value moves by at most the spectral norm of the perturbation
    m = DiscreteMeasure([-0.3, 0.3], [1.0, 1.0])
    b = basis(7)
    clean = build_data_matrix(recover_coefficients(forward_image(m, GRID), b), 7).entries
    for seed in range(5):
        y = Scene(m, GRID, NoiseSpec(1e-4, "gaussian", seed)).image()
        noisy = build_data_matrix(recover_coefficients(y, b), 7).entries
        gap = np.abs(np.linalg.svd(noisy, compute_uv=False) - np.linalg.svd(clean, compute_uv=False))
        assert np.all(gap <= np.linalg.norm(noisy - clean, 2) + 1e-15)


def test_detection_correct_above_requirement():
    rng = np.random.default_rng(21)
    done = 0
    while done < 100:
        n = 2 + done % 2
        d = rng.uniform(0.5, 1.0)
        p = ProblemPriors(d, 10 ** rng.uniform(-10, -5), float(n))
        s_star = compute_s_star(p)
        s = 2 * n + 1
        if s_star < s:
            continue
        req = music_separation_requirement(n, d, s, p.sigma, 1.0, basis(s_star).sigma_min).required
        if req * (n - 1) > 2 * d:
            continue
        sep = rng.uniform(req, 2 * d / (n - 1))
        span = sep * (n - 1)
        pos = rng.uniform(-d, d - span) + sep * np.arange(n)
        amps = rng.choice([-1.0, 1.0], n)
        scene = Scene(DiscreteMeasure(pos, amps), GRID, NoiseSpec(p.sigma, "uniform", done))
        res = detect_source_number(scene.image(), basis(s_star), s, p.sigma)
        assert res.estimated_n == n, (n, d, p.sigma, sep)
        done += 1


def test_separation_sweep_rows():
    p = EXPERIMENT_1.priors
    rows = separation_sweep([0.6, 0.05], 2, p, GRID, s=5, seeds=(1, 0))
    assert [(r.separation, r.seed) for r in rows] == [(0.05, 0), (0.05, 1), (0.6, 0), (0.6, 1)]
    assert rows[0].detected_n < 2 and rows[-1].detected_n == 2
