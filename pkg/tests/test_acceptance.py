"""One test per acceptance criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also collected in the "acceptance criteria" terminal summary.
"""

import numpy as np
import pytest

from reslimit.limits import compute_s_star, construct_number_ambiguity, construct_support_ambiguity
from reslimit.model import forward_image, grid_norm
from reslimit.multipole import coefficients
from reslimit.music import detect_source_number, recover_coefficients, separation_sweep
from reslimit.reference import (
    COEFFICIENT_ERROR_FACTOR,
    DETECTION_PASS_RATE,
    EXPERIMENT_1,
    EXPERIMENT_2,
    REFERENCE,
    SCENARIOS,
    TRANSITION,
    TRANSITION_RATE,
    TWO_SOURCES,
    detection_ok,
    scenario_quantities,
)
from reslimit.suites import appendix_suite, approximation_suite, eta_suite, identity_suite, inverse_suite

from conftest import GRID, basis

pytestmark = pytest.mark.acceptance


@pytest.fixture(scope="module")
def quantities():
    return {sc.name: scenario_quantities(sc) for sc in SCENARIOS}


def _rows(quantity, quantities):
    out = []
    for q, sc, ref, tol, kind in REFERENCE:
        if q == quantity:
            got = quantities[sc.name][q]
            ok = got == ref if kind == "exact" else abs(got - ref) <= tol
            out.append((sc.name, got, ref, ok))
    return out


def test_criterion_01_s_star(quantities, criterion):
    rows = _rows("s_star", quantities)
    detail = ", ".join(f"{g} (ref {r})" for _, g, r, _ in rows)
    assert criterion(1, "s* regression", all(ok for *_, ok in rows), detail)


def test_criterion_02_number_bounds(quantities, criterion):
    rows = _rows("number_upper_bound", quantities)
    detail = ", ".join(f"{g:.5f} (ref {r})" for _, g, r, _ in rows)
    assert criterion(2, "number upper bounds within 1e-3", all(ok for *_, ok in rows), detail)


def test_criterion_03_thresholds(quantities, criterion):
    rows = _rows("threshold", quantities) + _rows("music_separation", quantities)
    detail = ", ".join(f"{g:.5g} (ref {r})" for _, g, r, _ in rows)
    assert criterion(3, "detection thresholds and separation requirement", all(ok for *_, ok in rows), detail)


def test_criterion_04_detection(criterion):
    seeds = range(100)
    rates = {}
    for sc in (EXPERIMENT_1, EXPERIMENT_2):
        b = basis(compute_s_star(sc.priors))
        hits = sum(detection_ok(detect_source_number(sc.scene(seed).image(), b, sc.s, sc.priors.sigma), sc)
                   for seed in seeds)
        rates[sc.name] = hits / len(seeds)
    ok = all(r >= DETECTION_PASS_RATE for r in rates.values())
    detail = ", ".join(f"{k}: {v:.0%}" for k, v in rates.items())
    assert criterion(4, "detection outcomes over 100 seeds", ok, detail)


def _transition(rows, n):
    """Smallest separation from which every sweep point detects n at the required rate."""
    seps = sorted({r.separation for r in rows})
    rate = {s: np.mean([r.detected_n == n for r in rows if r.separation == s]) for s in seps}
    good = [rate[s] >= TRANSITION_RATE for s in seps]
    for i, s in enumerate(seps):
        if all(good[i:]):
            return s
    return None


def test_criterion_05_phase_transition(criterion):
    seeds = range(20)
    found = {}
    for sc, top in ((EXPERIMENT_1, 0.6), (EXPERIMENT_2, 0.5)):
        seps = np.round(np.arange(0.05, top + 1e-9, 0.01), 10)
        rows = separation_sweep(seps, sc.n, sc.priors, GRID, s=sc.s, seeds=seeds)
        found[sc.name] = _transition(rows, sc.n)
    ok = all(v is not None and v <= TRANSITION[k] for k, v in found.items())
    detail = ", ".join(f"{k}: {v} (limit {TRANSITION[k]})" for k, v in found.items())
    assert criterion(5, "detection phase transition", ok, detail)


def test_criterion_06_constructions(criterion):
    worst = 0.0
    ok = True
    for build in (construct_number_ambiguity, construct_support_ambiguity):
        for n in (2, 3, 4):
            for sigma in (1e-3, 1e-5):
                pair = build(n, sigma, 1.0)
                diff = grid_norm(forward_image(pair.target, GRID) - forward_image(pair.decoy, GRID), GRID)
                worst = max(worst, diff / sigma)
                ok &= diff <= sigma
    assert criterion(6, "worst-case constructions", ok, f"max distance/sigma {worst:.4f}")


def test_criterion_07_identities(criterion):
    res = identity_suite(200)
    assert criterion(7, "Vandermonde identities", res.passed, f"{res.cases} cases, {res.failures} failures")


def test_criterion_08_oracles(criterion):
    results = [approximation_suite(50), eta_suite(50), inverse_suite(200)]
    ok = all(r.passed for r in results)
    detail = ", ".join(f"{r.name}: {r.failures}/{r.cases} failed, worst slack {r.worst:.3g}" for r in results)
    assert criterion(8, "bounds versus oracles", ok, detail)


def test_criterion_09_coefficient_contract(criterion):
    sc = EXPERIMENT_1
    s = compute_s_star(sc.priors)
    b = basis(s)
    exact = coefficients(sc.measure, s).values
    limit = COEFFICIENT_ERROR_FACTOR * sc.priors.sigma / b.sigma_min
    errs = [np.linalg.norm(recover_coefficients(sc.scene(seed).image(), b).values - exact) for seed in range(50)]
    ok = max(errs) <= limit
    assert criterion(9, "coefficient recovery contract", ok, f"max error {max(errs):.3g}, limit {limit:.3g}")


def test_criterion_10_inequalities(criterion):
    res = appendix_suite()
    assert criterion(10, "factorial inequalities for n, k in 2..60", res.passed,
                     f"{res.cases} rows, {res.failures} violations")
