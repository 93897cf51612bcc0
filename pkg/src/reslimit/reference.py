"""Published reference values and the end-to-end checks that reproduce them.

Every tolerance used by ``verify-paper`` and the acceptance suite lives in
`REFERENCE`.
"""

from dataclasses import dataclass

from .limits import compute_s_star, number_upper_bound
from .model import DiscreteMeasure, NoiseSpec, ProblemPriors, SamplingGrid, Scene
from .multipole import build_basis
from .music import detect_source_number, detection_threshold, music_separation_requirement

GRID = SamplingGrid(100.0, 2.0)


@dataclass(frozen=True)
class Scenario:
    name: str
    priors: ProblemPriors
    measure: DiscreteMeasure
    n: int
    s: int | None = None

    def scene(self, seed=0, grid=GRID):
        return Scene(self.measure, grid, NoiseSpec(self.priors.sigma, "uniform", seed))


TWO_SOURCES = Scenario("two-source example", ProblemPriors(1.0, 5.8e-5, 2.0),
                       DiscreteMeasure([-0.38, 0.38], [1.0, 1.0]), 2)
EXPERIMENT_1 = Scenario("experiment 1", ProblemPriors(0.5, 7.1e-6, 3.0),
                        DiscreteMeasure([-0.37, 0.37], [1.0, 1.0]), 2, 5)
EXPERIMENT_2 = Scenario("experiment 2", ProblemPriors(0.5, 1.38e-9, 4.0),
                        DiscreteMeasure([-0.4, 0.0, 0.4], [1.0, 1.0, 1.0]), 3, 7)
SCENARIOS = (TWO_SOURCES, EXPERIMENT_1, EXPERIMENT_2)

# (quantity, scenario, reference, tolerance, kind); kind is "exact", "abs" or "below"
REFERENCE = [
    ("s_star", TWO_SOURCES, 8, 0, "exact"),
    ("s_star", EXPERIMENT_1, 7, 0, "exact"),
    ("s_star", EXPERIMENT_2, 10, 0, "exact"),
    ("number_upper_bound", TWO_SOURCES, 0.7597, 1e-3, "abs"),
    ("number_upper_bound", EXPERIMENT_1, 0.1353, 1e-3, "abs"),
    ("number_upper_bound", EXPERIMENT_2, 0.2083, 1e-3, "abs"),
    ("threshold", EXPERIMENT_1, 0.0227, 2e-4, "abs"),
    ("threshold", EXPERIMENT_2, 0.0017, 2e-5, "abs"),
    ("music_separation", EXPERIMENT_1, 0.4519, 2e-3, "abs"),
    ("estimated_n", EXPERIMENT_1, 2, 0, "exact"),
    ("singular_value_1", EXPERIMENT_1, 2.0375, 5e-3, "abs"),
    ("singular_value_2", EXPERIMENT_1, 0.2738, 5e-3, "abs"),
    ("singular_value_3", EXPERIMENT_1, 1e-2, 0, "below"),
    ("estimated_n", EXPERIMENT_2, 3, 0, "exact"),
    ("singular_value_1", EXPERIMENT_2, 3.0343, 5e-3, "abs"),
    ("singular_value_2", EXPERIMENT_2, 0.3282, 5e-3, "abs"),
    ("singular_value_3", EXPERIMENT_2, 0.0169, 5e-3, "abs"),
]

# rescaled coefficients r! sqrt(2r+1) theta_r printed for the two experiments
MOMENTS_1 = [2.0, -1.5912e-6, 0.2738, -2.4e-5, 0.0379, -1.9e-4, 0.0129]
MOMENTS_2 = [3.0, None, 0.32, None, 0.0512, None, 0.0082, None, 0.0016, 0.001]
MOMENT_TOL = 5e-3

COEFFICIENT_ERROR_FACTOR = 2.0
DETECTION_PASS_RATE = 0.95
TRANSITION = {"experiment 1": 0.25, "experiment 2": 0.30}
TRANSITION_RATE = 0.90


@dataclass(frozen=True)
class CheckRow:
    quantity: str
    scenario: str
    computed: float
    reference: float
    tolerance: float
    kind: str

    @property
    def passed(self):
        if self.kind == "exact":
            return self.computed == self.reference
        if self.kind == "below":
            return self.computed < self.reference
        return abs(self.computed - self.reference) <= self.tolerance


def scenario_quantities(sc, seed=0, grid=GRID):
    """Every reference quantity for one scenario as a dict."""
    out = {}
    s_star = compute_s_star(sc.priors)
    basis = build_basis(grid, s_star)
    out["s_star"] = s_star
    out["sigma_min"] = basis.sigma_min
    out["number_upper_bound"] = number_upper_bound(sc.n, sc.priors, sc.measure.min_amplitude, basis.sigma_min)
    if sc.s is not None:
        out["threshold"] = detection_threshold(sc.s, sc.priors.sigma, basis.sigma_min)
        out["music_separation"] = music_separation_requirement(
            sc.n, sc.priors.d, sc.s, sc.priors.sigma, sc.measure.min_amplitude, basis.sigma_min).required
        res = detect_source_number(sc.scene(seed, grid).image(), basis, sc.s, sc.priors.sigma)
        out["detection"] = res
        out["estimated_n"] = res.estimated_n
        for i, v in enumerate(res.singular_values, start=1):
            out[f"singular_value_{i}"] = float(v)
    return out


def run_reference_checks(seed=0, grid=GRID):
    cache = {sc.name: scenario_quantities(sc, seed, grid) for sc in SCENARIOS}
    rows = []
    for quantity, sc, ref, tol, kind in REFERENCE:
        rows.append(CheckRow(quantity, sc.name, cache[sc.name][quantity], ref, tol, kind))
    for sc, printed in ((EXPERIMENT_1, MOMENTS_1), (EXPERIMENT_2, MOMENTS_2)):
        mom = cache[sc.name]["detection"].coefficients.moments
        for r, ref in enumerate(printed):
            if ref is not None:
                rows.append(CheckRow(f"moment_{r}", sc.name, float(mom[r]), ref, MOMENT_TOL, "abs"))
    return rows


def detection_ok(result, sc):
    """Whether one detection run meets the reference rows of its scenario."""
    got = {"estimated_n": result.estimated_n}
    got.update({f"singular_value_{i}": float(v) for i, v in enumerate(result.singular_values, start=1)})
    rows = [CheckRow(q, sc.name, got[q], ref, tol, kind)
            for q, scn, ref, tol, kind in REFERENCE if scn is sc and q in got]
    if not rows:
        raise ValueError("no detection reference for this scenario")
    return all(r.passed for r in rows)
