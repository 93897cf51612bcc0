"""Randomised validation suites pairing closed-form bounds with brute-force oracles."""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import vandermonde as vm
from .limits import verify_appendix_inequalities


@dataclass(frozen=True)
class SuiteResult:
    """Outcome of one suite.

    ``worst`` is the smallest slack seen: for lower bounds value/bound,
    for identities -log10 of the relative error minus the tolerance exponent.
    Positive means every case passed with room to spare.
    """

    name: str
    cases: int
    failures: int
    worst: float
    details: list = field(default_factory=list, repr=False)

    @property
    def passed(self):
        return self.failures == 0


def _nodes(rng, k, bound, min_gap):
    while True:
        d = np.sort(rng.uniform(-bound, bound, k))
        if k < 2 or np.diff(d).min() >= min_gap:
            return d


def _summary(name, details, ok_key="ok", slack_key="slack"):
    fails = sum(not d[ok_key] for d in details)
    worst = min(d[slack_key] for d in details) if details else math.inf
    return SuiteResult(name, len(details), fails, float(worst), details)


def _exact_det(rows):
    """Determinant of a small matrix of Fractions by fraction-exact elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def gram_det_ratio(nodes):
    """sqrt(det(V^T V) / det(U^T U)) evaluated exactly in rationals, then rounded."""
    d = [Fraction(float(x)) for x in nodes]
    k = len(d)

    def gram(rows):
        return [[sum(d[i] ** r * d[j] ** r for r in range(rows)) for j in range(k)] for i in range(k)]

    return math.sqrt(_exact_det(gram(k + 1)) / _exact_det(gram(k)))


def identity_suite(instances=200, max_k=8, bound=2.0, rtol=1e-8, seed=0):
    """Column-reduction last row and determinant-ratio identities on random node sets."""
    rng = np.random.default_rng(seed)
    details = []
    for i in range(instances):
        k = int(rng.integers(1, max_k + 1))
        d = _nodes(rng, k, bound, 1e-3)
        e = vm.elementary_symmetric_all(d)
        red = vm.reduce_vandermonde(d)
        expect = np.array([(-1) ** (k - j) * e[k + 1 - j] for j in range(1, k + 1)])
        err_red = np.linalg.norm(red.last_row - expect) / np.linalg.norm(expect)
        direct = gram_det_ratio(d)
        err_det = abs(direct - vm.det_ratio(d)) / vm.det_ratio(d)
        err = max(err_red, err_det)
        details.append({"case": i, "k": k, "reduction_error": err_red, "det_ratio_error": err_det,
                        "ok": err <= rtol, "slack": rtol / max(err, 1e-300)})
    return _summary("vandermonde identities", details)


def approximation_suite(instances=50, max_k=3, bound=1.0, resolution=41, seed=1):
    """Plain and scaled moment-approximation lower bounds against the grid oracle."""
    rng = np.random.default_rng(seed)
    details = []
    for i in range(instances):
        k = int(rng.integers(1, max_k + 1))
        t = _nodes(rng, k + 1, bound, 0.1)
        a = rng.uniform(0.5, 2.0, k + 1) * rng.choice([-1.0, 1.0], k + 1)
        m_min = float(np.abs(a).min())
        d_min = float(np.diff(t).min())
        for scaled in (False, True):
            val = vm.nonlinear_approx_oracle(t, a, k, 2 * k + 1, bound, scaled, resolution)
            lb = vm.approximation_lower_bound(k, bound, d_min, m_min, scaled)
            details.append({"case": i, "k": k, "scaled": scaled, "oracle": val, "bound": lb,
                            "ok": lb <= val * (1 + 1e-12), "slack": val / lb})
    return _summary("moment approximation bounds", details)


def eta_suite(instances=50, max_k=3, bound=1.0, resolution=101, seed=2):
    """xi(k) d_min^k against the minimised ||eta||_inf."""
    rng = np.random.default_rng(seed)
    details = []
    for i in range(instances):
        k = int(rng.integers(1, max_k + 1))
        t = _nodes(rng, k + 1, bound, 0.05)
        val = vm.min_eta_oracle(t, resolution)
        lb = vm.eta_lower_bound(k, float(np.diff(t).min()))
        details.append({"case": i, "k": k, "oracle": val, "bound": lb, "ok": lb <= val * (1 + 1e-12), "slack": val / lb})
    return _summary("eta lower bound", details)


def inverse_suite(instances=200, max_k=12, bound=1.0, seed=3):
    """Inverse-norm and smallest-singular-value chains for random Vandermonde matrices."""
    rng = np.random.default_rng(seed)
    details = []
    for i in range(instances):
        k = int(rng.integers(1, max_k + 1))
        d = _nodes(rng, k, bound, 1e-3)
        rows = int(rng.integers(k - 1, k + 6)) if k > 1 else int(rng.integers(0, 6))
        try:
            inv = vm.inverse_inf_norm_bound(d, bound)
            sv = vm.min_singular_bound(d, rows)
            ok = True
            slack = min(inv.product_bound / inv.exact, inv.separation_bound / inv.product_bound,
                        sv.square / sv.lower_bound, sv.exact / sv.square)
        except vm.BoundViolation:
            ok, slack = False, 0.0
        details.append({"case": i, "k": k, "rows": rows, "ok": ok, "slack": slack})
    return _summary("inverse and singular value chains", details)


def stability_suite(instances=30, max_k=3, bound=1.0, resolution=41, seed=4):
    """Probe sets fitting k targets within sigma must keep ||eta||_inf under the ceiling."""
    rng = np.random.default_rng(seed)
    details = []
    for i in range(instances):
        k = int(rng.integers(1, max_k + 1))
        t = _nodes(rng, k, bound, 0.2)
        a = rng.uniform(0.5, 2.0, k) * rng.choice([-1.0, 1.0], k)
        for scaled in (False, True):
            sigma = 10.0 ** rng.uniform(-4, -1) / (vm.row_scales(2 * k)[-1] if scaled else 1.0)
            chk = vm.stability_check(t, a, bound, sigma, scaled, resolution, seed=i)
            slack = chk.bound / chk.worst_eta if chk.worst_eta > 0 else math.inf
            details.append({"case": i, "k": k, "scaled": scaled, "feasible": chk.feasible,
                            "worst_eta": chk.worst_eta, "bound": chk.bound, "ok": chk.holds, "slack": slack})
    return _summary("stability ceiling", details)


def appendix_suite(n_range=range(2, 61), k_range=None):
    rows = verify_appendix_inequalities(n_range, k_range)
    details = [{"case": f"{r.name}[{r.index}]", "ok": r.holds, "slack": r.margin} for r in rows]
    return _summary("factorial inequalities", details)


SUITES = {
    "identities": identity_suite,
    "approximation": approximation_suite,
    "eta": eta_suite,
    "inverse": inverse_suite,
    "stability": stability_suite,
    "appendix": appendix_suite,
}


def run_suites(names=None):
    names = list(SUITES) if names is None else names
    return [SUITES[n]() for n in names]
