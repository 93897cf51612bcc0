import math

import numpy as np
import pytest

from reslimit.limits import (
    compute_s_star,
    construct_number_ambiguity,
    construct_support_ambiguity,
    limit_report,
    number_upper_bound,
    position_error_constant,
    rescale_scene,
    stability_bounds,
    super_resolution_factor,
    unscale_scene,
    verify_appendix_inequalities,
)
from reslimit.model import (
    DiscreteMeasure,
    NoiseSpec,
    ProblemPriors,
    SamplingGrid,
    Scene,
    forward_image,
    grid_norm,
    is_admissible,
)
from reslimit.multipole import truncation_residual_bound

from conftest import GRID, basis


@pytest.mark.parametrize("d,sigma,M,expected", [
    (1.0, 5.8e-5, 2.0, 8),
    (0.5, 7.1e-6, 3.0, 7),
    (0.5, 1.38e-9, 4.0, 10),
])
def test_s_star_reference(d, sigma, M, expected):
    assert compute_s_star(ProblemPriors(d, sigma, M)) == expected


def test_s_star_two_measure_tail():
    assert compute_s_star(ProblemPriors(1.0, 5.8e-5, 2.0), n_measures=2) == 9


def test_s_star_is_first_order_under_the_tail_threshold():
    rng = np.random.default_rng(5)
    for _ in range(50):
        p = ProblemPriors(rng.uniform(0.1, 3), 10 ** rng.uniform(-12, -1), rng.uniform(1, 5))
        for nm in (1, 2):
            s = compute_s_star(p, nm)
            assert truncation_residual_bound(p, s, nm) <= p.sigma * (1 + 1e-12)
            if s > 0:
                assert truncation_residual_bound(p, s - 1, nm) > p.sigma


def test_s_star_edge_cases():
    d, M = 0.5, 2.0
    assert compute_s_star(ProblemPriors(d, 2 * math.exp(d) * math.sqrt(math.pi) * M, M), n_measures=2) == 0
    assert compute_s_star(ProblemPriors(d, math.exp(d) * math.sqrt(math.pi) * M, M)) == 0
    with pytest.raises(ArithmeticError):
        compute_s_star(ProblemPriors(150.0, 1e-6, 1.0))


@pytest.mark.parametrize("n,priors,s,expected", [
    (2, ProblemPriors(1.0, 5.8e-5, 2.0), 8, 0.7597),
    (2, ProblemPriors(0.5, 7.1e-6, 3.0), 7, 0.1353),
    (3, ProblemPriors(0.5, 1.38e-9, 4.0), 10, 0.2083),
])
def test_number_upper_bound_reference(n, priors, s, expected):
    assert abs(number_upper_bound(n, priors, 1.0, basis(s).sigma_min) - expected) <= 1e-3


def test_bounds_scale_with_omega():
    p1 = ProblemPriors(1.0, 5.8e-5, 2.0)
    p3 = ProblemPriors(1.0, 5.8e-5, 2.0, omega=3.0)
    sm = basis(8).sigma_min
    assert number_upper_bound(2, p3, 1.0, sm) == pytest.approx(number_upper_bound(2, p1, 1.0, sm) / 3)
    b1, b3 = stability_bounds(2, p1, 1.0, 0.5, sm), stability_bounds(2, p3, 1.0, 0.5, sm)
    assert b3.separation == pytest.approx(b1.separation / 3)
    r1, r3 = limit_report(p1, 2, 1.0), limit_report(p3, 2, 1.0)
    for key in ("number_upper_bound", "stability_separation", "music_separation"):
        assert getattr(r3, key) == pytest.approx(getattr(r1, key) / 3)
    with pytest.raises(ValueError):
        number_upper_bound(1, p1, 1.0, sm)


def test_srf_and_constant():
    assert super_resolution_factor(math.pi) == 1.0
    direct = 7.73 * math.sqrt(7) * 3 * 8**3 / (4 * math.e * math.pi**3.5)
    assert position_error_constant(2, 1.0) == pytest.approx(direct, rel=1e-12)
    b = stability_bounds(2, ProblemPriors(1.0, 1e-6, 2.0), 1.0, math.pi, 0.1)
    assert b.srf == 1.0 and b.constant == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("d", [0.5, 1.0, 2.0])
def test_position_error_below_half_separation_at_threshold(n, d):
    for sigma in (1e-9, 1e-6, 1e-3):
        p = ProblemPriors(d, sigma, float(n))
        sep = stability_bounds(n, p, 1.0, 1.0, 0.05).separation
        err = stability_bounds(n, p, 1.0, sep, 0.05).position_error
        assert err < sep / 2


def _limit_params(rng, count, stability):
    from reslimit.limits import stability_bounds as sb
    out = []
    while len(out) < count:
        n = int(rng.integers(2, 5))
        p = ProblemPriors(rng.uniform(0.3, 3), 10 ** rng.uniform(-14, -2), n * rng.uniform(1, 2))
        s = compute_s_star(p)
        if not 1 <= s <= 40:
            continue
        sm = basis(s).sigma_min
        bound = sb(n, p, 1.0, 1.0, sm).separation if stability else number_upper_bound(n, p, 1.0, sm)
        if bound <= 2 * p.d / (n - 1):
            out.append((n, s))
    return out


def test_s_star_large_under_number_separation_condition():
    for n, s in _limit_params(np.random.default_rng(8), 40, stability=False):
        assert s >= 2 * n - 1


def test_s_star_large_under_stability_separation_condition():
    for n, s in _limit_params(np.random.default_rng(9), 40, stability=True):
        assert s >= 2 * n


def test_no_single_atom_explains_resolved_pair():
    rng = np.random.default_rng(12)
    done = 0
    while done < 20:
        d = rng.uniform(0.5, 1.0)
        p = ProblemPriors(d, 10 ** rng.uniform(-8, -4), 2.0)
        s = compute_s_star(p)
        sep = number_upper_bound(2, p, 1.0, basis(s).sigma_min)
        if sep > 2 * d:
            continue
        sep = rng.uniform(sep, 2 * d)
        centre = rng.uniform(-(d - sep / 2), d - sep / 2)
        truth = DiscreteMeasure([centre - sep / 2, centre + sep / 2], [1.0, 1.0])
        scene = Scene(truth, GRID, NoiseSpec(p.sigma, "uniform", done))
        y = scene.image()
        # best single atom at each trial position, amplitude by least squares clipped to M
        pos = np.linspace(-d, d, 2001)
        cols = np.sinc((GRID.points[:, None] - pos[None, :]) / np.pi)
        amp = np.clip(cols.T @ y / np.sum(cols**2, axis=0), -p.M, p.M)
        misfit = math.sqrt(GRID.spacing) * np.linalg.norm(cols * amp - y[:, None], axis=0)
        assert misfit.min() > p.sigma
        done += 1


# constructions

def test_number_ambiguity_example():
    pair = construct_number_ambiguity(2, 1e-4, 2.0)
    assert pair.target.n == 2 and pair.decoy.n == 1
    assert pair.target.min_separation == pytest.approx(pair.d_solved, rel=1e-12)
    assert pair.target.total_variation == pytest.approx(2.0)
    assert pair.decoy.total_variation <= 2.0
    assert pair.image_distance <= 1e-4
    d = pair.d_solved
    rhs = 2 / math.e * (2 / math.exp(d)) ** 0.5 * (1e-4 / 2) ** 0.5
    assert d == pytest.approx(rhs, rel=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_number_ambiguity_root_scaling(n):
    d1 = construct_number_ambiguity(n, 1e-8, 1.0).d_solved
    d2 = construct_number_ambiguity(n, 1e-8 * 2 ** (2 * n - 2), 1.0).d_solved
    assert d2 / d1 == pytest.approx(2.0, rel=0.10)


@pytest.mark.parametrize("n", [2, 3])
def test_decoy_is_admissible_for_target_image(n):
    pair = construct_number_ambiguity(n, 1e-4, 1.0)
    y = forward_image(pair.target, GRID)
    ok, misfit = is_admissible(pair.decoy, y, GRID, ProblemPriors(pair.d_solved, 1e-4, 1.0))
    assert ok and misfit == pytest.approx(pair.image_distance)
    assert not pair.multiple_roots


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_support_ambiguity(n):
    pair = construct_support_ambiguity(n, 1e-5, 1.0)
    tau = pair.d_solved / n
    assert np.allclose(pair.target.positions, -tau * np.arange(n, 0, -1))
    assert np.allclose(pair.decoy.positions, tau * np.arange(1, n + 1))
    assert np.allclose(pair.target.positions, -pair.decoy.positions[::-1])
    assert pair.target.total_variation == pytest.approx(1.0)
    assert pair.decoy.total_variation <= 1.0 + 1e-12
    assert pair.image_distance <= 1e-5


# cutoff-frequency scaling

def test_rescale_identity_and_psf_relation():
    scene = Scene(DiscreteMeasure([0.0], [1.0]), GRID, NoiseSpec(0.0))
    same = rescale_scene(scene, 1.0)
    assert np.array_equal(same.image(), scene.image())
    two = rescale_scene(scene, 2.0)
    assert two.grid.radius == 50 and two.grid.spacing == 1.0
    x = two.grid.points
    assert np.allclose(two.image(), math.sqrt(2) * np.sinc(2 * x / np.pi), atol=1e-15)


def test_rescale_preserves_misfits():
    rng = np.random.default_rng(2)
    truth = DiscreteMeasure([-0.3, 0.25], [1.0, 0.8])
    scene = Scene(truth, GRID, NoiseSpec(1e-3, "uniform", 4))
    for omega in (0.5, 2.0, 7.0):
        big = rescale_scene(scene, omega)
        for _ in range(5):
            c = DiscreteMeasure(rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2))
            c_omega = DiscreteMeasure(c.positions / omega, c.amplitudes)
            m1 = grid_norm(forward_image(c, scene.grid) - scene.image(), scene.grid)
            m2 = grid_norm(forward_image(c_omega, big.grid) - big.image(), big.grid)
            assert m2 == pytest.approx(m1, abs=1e-10)
        back = unscale_scene(big)
        assert np.allclose(back.measure.positions, truth.positions)
        assert back.grid.radius == pytest.approx(100.0)


# factorial inequalities

def test_inequality_examples():
    rows = {(r.name, r.index): r for r in verify_appendix_inequalities(range(2, 11))}
    lhs = 2 * math.sqrt(math.pi) * 1 * 2 / (2 * math.sqrt(5)) * (2 / math.e) ** 2
    assert math.exp(rows["number_tail", 2].lhs) == pytest.approx(lhs)
    assert lhs < 1
    st = rows["stirling_lower", 10]
    assert math.exp(st.lhs) == pytest.approx(3598695.6, rel=1e-7)
    assert math.exp(st.rhs) == pytest.approx(3628800, rel=1e-12)
    assert math.exp(rows["stirling_upper", 10].rhs) == pytest.approx(math.e * 10**10.5 * math.exp(-10))
    sep = rows["stability_separation", 2]
    assert math.exp(sep.lhs) == pytest.approx((4 * math.sqrt(7) * 6) ** (1 / 3))
    assert math.exp(sep.lhs) <= 6.24


def test_inequalities_hold_over_range():
    rows = verify_appendix_inequalities(range(2, 61))
    names = {r.name for r in rows}
    assert names == {"number_tail", "support_tail", "stability_separation", "position_constant",
                     "scaled_approximation", "stirling_lower", "stirling_upper"}
    assert all(r.holds for r in rows)
    assert len(rows) == 59 * 7


def test_limit_report_fields():
    r = limit_report(ProblemPriors(1.0, 5.8e-5, 2.0), 2, 1.0)
    assert r.s_star == 8 and r.music_s == 7
    assert r.number_upper_bound == pytest.approx(0.7597, abs=1e-3)
    assert r.srf == pytest.approx(math.pi / r.stability_separation)
    r = limit_report(ProblemPriors(1.0, 5.8e-5, 2.0), 4, 1.0)
    assert r.music_s is None and r.music_separation is None
    with pytest.raises(ArithmeticError):
        limit_report(ProblemPriors(0.5, 100.0, 1.0), 2, 1.0)
