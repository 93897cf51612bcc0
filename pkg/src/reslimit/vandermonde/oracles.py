"""Brute-force searches over probe nodes, used to test the closed-form bounds.

Each search scans a coarse grid of sorted probe tuples (ties allowed, since
an infimum may sit where probes merge), keeps the best few cells and polishes
them with coordinate-wise golden-section passes followed by a bounded
Nelder-Mead run.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .core import (
    as_nodes,
    eta_vector,
    row_scales,
    scaled_vandermonde,
    stability_eta_bound,
    vandermonde_matrix,
)

GOLDEN = (math.sqrt(5) - 1) / 2


def _golden(fun, lo, hi, iters=40):
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fun(d)
    return (c, fc) if fc <= fd else (d, fd)


def _refine(objective, start, lo, hi, step, rounds=3):
    x = np.array(start, dtype=float)
    best = objective(x)
    for _ in range(rounds):
        for i in range(x.size):
            def f(t, i=i):
                y = x.copy()
                y[i] = t
                return objective(y)
            t, val = _golden(f, max(lo, x[i] - step), min(hi, x[i] + step))
            if val < best:
                best, x[i] = val, t
        step /= 2
    # coordinate moves stall on the kinks of max-type objectives; a simplex
    # polish lets all probes move together
    res = minimize(objective, x, method="Nelder-Mead", bounds=[(lo, hi)] * x.size,
                   options={"xatol": 1e-13, "fatol": 1e-16, "maxiter": 400 * x.size})
    if res.fun < best:
        best, x = float(res.fun), res.x
    return best, x


def _sorted_tuples(points, k):
    idx = np.array(list(itertools.combinations_with_replacement(range(points.size), k)), dtype=int)
    return points[idx]


@dataclass(frozen=True)
class SearchResult:
    value: float
    probes: np.ndarray


def _search(batch_objective, objective, candidates, lo, hi, step, keep=4):
    vals = batch_objective(candidates)
    order = np.argsort(vals, kind="stable")[:keep]
    best = SearchResult(float(vals[order[0]]), candidates[order[0]])
    for i in order:
        val, x = _refine(objective, candidates[i], lo, hi, step)
        if val < best.value:
            best = SearchResult(float(val), np.sort(x))
    return best


def min_eta_search(targets, resolution=101):
    """Minimise ||eta(targets, probes)||_inf over k = len(targets)-1 probes.

    Probes range over [t_1, t_{k+1}]. For k <= 3 every sorted grid tuple
    is scanned; for k = 4, 5 the scan places one probe in each gap between
    consecutive targets, where the minimiser lives.
    """
    t = as_nodes(targets)
    k = t.size - 1
    if k < 1:
        raise ValueError("need at least two targets")
    if k > 5:
        raise ValueError("min_eta_search handles at most 6 targets")
    lo, hi = float(t[0]), float(t[-1])

    def batch(p):
        return np.abs(np.prod(t[None, :, None] - p[:, None, :], axis=2)).max(axis=1)

    def single(p):
        return float(np.abs(eta_vector(t, p)).max())

    if k <= 3:
        grid = np.linspace(lo, hi, resolution)
        cands = _sorted_tuples(grid, k)
        step = (hi - lo) / (resolution - 1)
    else:
        per_gap = max(5, int(round(resolution ** (3 / k))))
        axes = [np.linspace(t[i], t[i + 1], per_gap) for i in range(k)]
        cands = np.array(list(itertools.product(*axes)))
        step = float(np.max(np.diff(t))) / (per_gap - 1)
    return _search(batch, single, cands, lo, hi, step)


def min_eta_oracle(targets, resolution=101):
    """Approximate min over probes of ||eta||_inf (see `min_eta_search`)."""
    return min_eta_search(targets, resolution).value


def _moment_matrix(nodes, rows, scaled):
    return scaled_vandermonde(nodes, rows) if scaled else vandermonde_matrix(nodes, rows - 1)


def _batched_residual(mats, v, rtol=1e-12):
    u, s, _ = np.linalg.svd(mats, full_matrices=False)
    keep = s > rtol * s[..., :1]
    coef = np.einsum("cri,r->ci", u, v) * keep
    resid = v[None, :] - np.einsum("cri,ci->cr", u, coef)
    return np.linalg.norm(resid, axis=1)


def _residual(mat, v):
    sol, *_ = np.linalg.lstsq(mat, v, rcond=None)
    return float(np.linalg.norm(mat @ sol - v))


def nonlinear_approx_search(target_nodes, target_amplitudes, q, rows, bound, scaled=False, resolution=41):
    """Minimise ||A(q) a - A* a*||_2 over q probe nodes in [-bound, bound].

    Amplitudes are solved exactly by least squares for every probe tuple.
    A has `rows` rows (powers 0..rows-1), divided by r! sqrt(2r+1) when
    `scaled` is true.
    """
    t = as_nodes(target_nodes, bound)
    amps = np.asarray(target_amplitudes, dtype=float)
    if q > 4 or t.size > 5:
        raise ValueError("nonlinear oracle handles at most 4 probes and 5 targets")
    v = _moment_matrix(t, rows, scaled) @ amps
    if q == 0:
        return SearchResult(float(np.linalg.norm(v)), np.zeros(0))
    grid = np.linspace(-bound, bound, resolution)
    cands = _sorted_tuples(grid, q)

    def batch(p):
        out = np.empty(p.shape[0])
        for start in range(0, p.shape[0], 20000):
            chunk = p[start:start + 20000]
            out[start:start + 20000] = _batched_residual(_stack(chunk, rows, scaled), v)
        return out

    def single(p):
        return _residual(_moment_matrix(p, rows, scaled), v)

    return _search(batch, single, cands, -bound, bound, 2 * bound / (resolution - 1))


def _stack(probes, rows, scaled):
    mats = probes[:, None, :] ** np.arange(rows)[None, :, None]
    if scaled:
        mats = mats / row_scales(rows)[None, :, None]
    return mats


def nonlinear_approx_oracle(target_nodes, target_amplitudes, q, rows, bound, scaled=False, resolution=41):
    """Approximate minimum of the moment-matching residual (see `nonlinear_approx_search`)."""
    return nonlinear_approx_search(target_nodes, target_amplitudes, q, rows, bound, scaled, resolution).value


@dataclass(frozen=True)
class StabilityCheck:
    feasible: int
    worst_eta: float
    bound: float

    @property
    def holds(self):
        return self.worst_eta < self.bound


def stability_check(target_nodes, target_amplitudes, bound, sigma, scaled=False, resolution=41,
                    cloud=2000, seed=0):
    """Scan k-probe tuples whose 2k-row moment residual is below `sigma`.

    Candidates are the sorted grid tuples plus `cloud` random perturbations
    of the targets (log-uniform scale 1e-4..1e-1 of the box), which keeps
    the feasible set non-empty for small sigma. Reports how many candidates
    are feasible, the largest ||eta||_inf among them and the closed-form
    ceiling it must stay under.
    """
    t = as_nodes(target_nodes, bound)
    amps = np.asarray(target_amplitudes, dtype=float)
    k = t.size
    rows = 2 * k
    v = _moment_matrix(t, rows, scaled) @ amps
    grid = np.linspace(-bound, bound, resolution)
    cands = _sorted_tuples(grid, k)
    if cloud:
        rng = np.random.default_rng(seed)
        scale = bound * 10.0 ** rng.uniform(-4, -1, (cloud, 1))
        near = np.clip(t[None, :] + scale * rng.standard_normal((cloud, k)), -bound, bound)
        cands = np.vstack([cands, np.sort(near, axis=1)])
    resid = _batched_residual(_stack(cands, rows, scaled), v)
    ok = resid < sigma
    worst = 0.0
    if ok.any():
        eta = np.abs(np.prod(t[None, :, None] - cands[ok][:, None, :], axis=2)).max(axis=1)
        worst = float(eta.max())
    d_min = float(np.diff(t).min()) if k > 1 else 1.0
    ceiling = stability_eta_bound(k, bound, d_min, float(np.abs(amps).min()), sigma, scaled)
    return StabilityCheck(int(ok.sum()), worst, float(ceiling))
