"""Resolution-limit calculus: s*, separation bounds, worst-case constructions.

All separation formulas take sigma_min(s*) as an input; compute it with
``multipole.build_basis(grid, s_star).sigma_min``.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq

from .model import DiscreteMeasure, SamplingGrid, Scene, forward_image, grid_norm
from .multipole import build_basis
from .vandermonde import lam, vandermonde_matrix, xi, zeta

S_STAR_CAP = 200


def compute_s_star(priors, n_measures=1, cap=S_STAR_CAP):
    """Smallest l with d^l/(l! sqrt(2l+1)) <= sigma / (n_measures e^d sqrt(pi) M).

    This is the number of multipoles whose coefficients stand above the
    noise. ``n_measures=2`` uses the tail of a difference of two measures.
    """
    d = priors.d
    rhs = priors.sigma / (n_measures * math.exp(d) * math.sqrt(math.pi) * priors.M)
    term = 1.0
    for l in range(cap + 1):
        if l:
            term *= d / l * math.sqrt((2 * l - 1) / (2 * l + 1))
        if term <= rhs:
            return l
    raise ArithmeticError(f"s* exceeds the cap {cap}; d={d} is too large for the noise level")


def number_upper_bound(n, priors, m_min, sigma_min):
    """Separation beyond which no admissible measure has fewer than n atoms.

    4.7 (1+d) (3 sigma / (sigma_min m_min))^(1/(2n-2)), divided by omega.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    ratio = 3 * priors.sigma / (sigma_min * m_min)
    return 4.7 * (1 + priors.d) * ratio ** (1 / (2 * n - 2)) / priors.omega


def position_error_constant(n, d):
    """C(n, d) = 7.73 sqrt(4n-1) (2n-1) (4+4d)^(2n-1) / (4 e pi^(2n-1/2))."""
    log_c = (math.log(7.73) + 0.5 * math.log(4 * n - 1) + math.log(2 * n - 1)
             + (2 * n - 1) * math.log(4 + 4 * d) - math.log(4 * math.e) - (2 * n - 0.5) * math.log(math.pi))
    return math.exp(log_c)


def super_resolution_factor(d_min, omega=1.0):
    return math.pi / (omega * d_min)


@dataclass(frozen=True)
class StabilityBounds:
    separation: float
    position_error: float
    constant: float
    srf: float


def stability_bounds(n, priors, m_min, d_min, sigma_min):
    """Support-stability separation requirement and position error bound.

    Above ``separation`` every admissible n-atom measure has each atom
    within ``position_error`` of a true one, where
    position_error = C(n,d) SRF^(2n-2) 3 sigma / (sigma_min m_min) / omega.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    ratio = 3 * priors.sigma / (sigma_min * m_min)
    sep = 6.24 * (1 + priors.d) * ratio ** (1 / (2 * n - 1)) / priors.omega
    c = position_error_constant(n, priors.d)
    srf = super_resolution_factor(d_min, priors.omega)
    err = c * srf ** (2 * n - 2) * ratio / priors.omega
    return StabilityBounds(sep, err, c, srf)


# worst-case constructions

@dataclass(frozen=True)
class ConstructionPair:
    """Two measures with nearly identical images.

    ``image_distance`` is sqrt(h) ||[target * f] - [decoy * f]||_2 on the
    verification grid.
    """

    target: DiscreteMeasure
    decoy: DiscreteMeasure
    d_solved: float
    image_distance: float
    sigma: float
    grid: SamplingGrid
    multiple_roots: bool = False


def _bisect(g, lo=1e-12, hi=50.0, scan=400):
    xs = np.geomspace(lo, hi, scan)
    vals = np.array([g(x) for x in xs])
    flips = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    if not flips.size:
        raise ArithmeticError("no root bracketed for the construction equation")
    i = flips[0]
    root = brentq(g, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return root, flips.size > 1


def _null_split(nodes, rows, n_target, m_star):
    # row scaling and node dilation leave the null space unchanged; working
    # on nodes/max|node| keeps the SVD well conditioned for tiny d
    a = vandermonde_matrix(nodes / np.max(np.abs(nodes)), rows - 1)
    _, _, vt = np.linalg.svd(a)
    w = vt[-1]
    if w[0] < 0:
        w = -w
    if np.min(np.abs(w)) < 1e-14 * np.max(np.abs(w)):
        raise ArithmeticError("null vector has a vanishing entry")
    left, right = w[:n_target], w[n_target:]
    if np.abs(left).sum() < np.abs(right).sum():
        # the node set is symmetric, so the mirrored vector is also null
        nodes, w = -nodes[::-1], w[::-1]
        left, right = w[:n_target], w[n_target:]
    scale = m_star / np.abs(left).sum()
    target = DiscreteMeasure(nodes[:n_target], left * scale)
    decoy = DiscreteMeasure(nodes[n_target:], -right * scale)
    return target, decoy


def _verify(target, decoy, grid, sigma):
    dist = grid_norm(forward_image(target, grid) - forward_image(decoy, grid), grid)
    if dist > sigma:
        raise ArithmeticError(f"construction image distance {dist:.3e} exceeds sigma={sigma:.3e}")
    return dist


DEFAULT_GRID = SamplingGrid(100.0, 2.0)


def construct_number_ambiguity(n, sigma, m_star, grid=DEFAULT_GRID):
    """An n-atom measure and an (n-1)-atom measure closer than sigma in image.

    Atoms sit on 2n-1 equispaced nodes in [-d, d]; d solves
    d/(n-1) = (2/e) ((2n-2)/e^d)^(1/(2n-2)) (sigma/m*)^(1/(2n-2)).
    Moment conditions are reflection invariant, so nodes are used as
    positions directly.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    p = 2 * n - 2

    def g(d):
        return d / (n - 1) - 2 / math.e * (p / math.exp(d)) ** (1 / p) * (sigma / m_star) ** (1 / p)

    d, multi = _bisect(g)
    nodes = d * np.arange(-(n - 1), n) / (n - 1)
    target, decoy = _null_split(nodes, 2 * n - 2, n, m_star)
    return ConstructionPair(target, decoy, d, _verify(target, decoy, grid, sigma), sigma, grid, multi)


def construct_support_ambiguity(n, sigma, m_star, grid=DEFAULT_GRID):
    """Two n-atom measures on {-n tau..-tau} and {tau..n tau} closer than sigma in image.

    tau = d/n with d/n = (2/e) ((2n-1)/e^(1+d))^(1/(2n-1)) (sigma/m*)^(1/(2n-1)).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    p = 2 * n - 1

    def g(d):
        return d / n - 2 / math.e * (p / math.exp(1 + d)) ** (1 / p) * (sigma / m_star) ** (1 / p)

    d, multi = _bisect(g)
    tau = d / n
    nodes = np.concatenate([-tau * np.arange(n, 0, -1), tau * np.arange(1, n + 1)])
    target, decoy = _null_split(nodes, 2 * n - 1, n, m_star)
    return ConstructionPair(target, decoy, d, _verify(target, decoy, grid, sigma), sigma, grid, multi)


# cutoff-frequency scaling

def rescale_scene(scene, omega):
    """Map a unit-cutoff scene to cutoff `omega`.

    Positions and grid shrink by omega, the point spread function becomes
    sin(omega x)/(sqrt(omega) x) and the noise is multiplied by sqrt(omega),
    which keeps every admissibility misfit unchanged.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    if scene.omega != 1:
        raise ValueError("rescale_scene expects a unit-cutoff scene")
    m = scene.measure
    grid = SamplingGrid(scene.grid.radius / omega, scene.grid.spacing / omega, omega)
    out = Scene(DiscreteMeasure(m.positions / omega, m.amplitudes), grid, scene.noise)
    before = grid_norm(scene.image(), scene.grid)
    after = grid_norm(out.image(), out.grid)
    if abs(before - after) > 1e-10 * max(1.0, before):
        raise ArithmeticError("rescaled image norm does not match")
    return out


def unscale_scene(scene):
    """Inverse of `rescale_scene`: return the equivalent unit-cutoff scene."""
    w = scene.omega
    m = scene.measure
    grid = SamplingGrid(scene.grid.radius * w, scene.grid.spacing * w)
    return Scene(DiscreteMeasure(m.positions * w, m.amplitudes), grid, scene.noise)


# bounds report

@dataclass(frozen=True)
class LimitReport:
    n: int
    s_star: int
    sigma_min_s_star: float
    number_upper_bound: float
    stability_separation: float
    position_error_constant: float
    position_error: float
    music_s: int | None
    music_separation: float | None
    d_min: float
    srf: float
    omega: float

    def as_dict(self):
        return asdict(self)


def limit_report(priors, n, m_min, grid=DEFAULT_GRID, d_min=None, s=None):
    """Evaluate every separation bound for one parameter set.

    Parameters
    ----------
    priors : ProblemPriors
    n : int
        Source number, at least 2.
    m_min : float
        Smallest source amplitude.
    grid : SamplingGrid
        Unit-cutoff grid used for sigma_min(s*).
    d_min : float, optional
        Separation at which the position error and SRF are evaluated;
        defaults to the support-stability separation.
    s : int, optional
        Odd data-matrix order for the detector requirement; defaults to the
        largest odd value <= s*. Skipped when s < 2n+1.
    """
    from .music import music_separation_requirement

    s_star = compute_s_star(priors)
    if s_star < 1:
        raise ArithmeticError("s* = 0: the noise swamps every multipole")
    sigma_min = build_basis(grid, s_star).sigma_min
    upper = number_upper_bound(n, priors, m_min, sigma_min)
    sep = stability_bounds(n, priors, m_min, 1.0, sigma_min).separation
    stab = stability_bounds(n, priors, m_min, sep if d_min is None else d_min, sigma_min)
    if s is None:
        s = s_star if s_star % 2 else s_star - 1
    music = None
    if s >= 2 * n + 1 and s % 2:
        music = music_separation_requirement(n, priors.d, s, priors.sigma, m_min, sigma_min).required
        music /= priors.omega
    else:
        s = None
    return LimitReport(n, s_star, sigma_min, upper, stab.separation, stab.constant, stab.position_error,
                       s, music, sep if d_min is None else d_min, stab.srf, priors.omega)


# numeric inequalities behind the constants

@dataclass(frozen=True)
class InequalityRow:
    name: str
    index: int
    lhs: float
    rhs: float
    holds: bool

    @property
    def margin(self):
        return self.rhs - self.lhs


def _lf(n):
    return math.lgamma(n + 1)


def _n_checks(n):
    """(name, log lhs, log rhs) triples of 'lhs <= rhs' statements at index n."""
    out = []
    if n >= 2:
        m = 2 * n - 2
        out.append(("number_tail", math.log(2 * math.sqrt(math.pi)) + m * math.log(n - 1) + math.log(m)
                    - _lf(m) - 0.5 * math.log(4 * n - 3) + m * math.log(2 / math.e), 0.0))
        m = 2 * n - 1
        out.append(("support_tail", math.log(2 * math.sqrt(math.pi)) + m * math.log(n) + math.log(m) - 1
                    - _lf(m) - 0.5 * math.log(4 * n - 1) + m * math.log(2 / math.e), 0.0))
        lhs = (math.log(4) + 0.5 * math.log(4 * n - 1) + _lf(2 * n - 1)
               - math.log(zeta(n)) - math.log(lam(n))) / (2 * n - 1)
        out.append(("stability_separation", lhs, math.log(6.24)))
        lhs = ((n - 1) * math.log(2) + _lf(2 * n - 1) + 0.5 * math.log(4 * n - 1)
               - math.log(zeta(n)) - _lf(n - 2))
        rhs = (math.log(7.73) + 0.5 * math.log(4 * n - 1) + math.log(2 * n - 1) + (2 * n - 1) * math.log(4)
               - math.log(4 * math.e) - 1.5 * math.log(math.pi))
        out.append(("position_constant", lhs, rhs))
    base = (n + 0.5) * math.log(n) - n
    out.append(("stirling_lower", 0.5 * math.log(2 * math.pi) + base, _lf(n)))
    out.append(("stirling_upper", _lf(n), 1 + base))
    return out


def _k_checks(k):
    out = []
    lhs = math.log(1.15) - 4 * k * math.log(2) - math.log(k)
    rhs = math.log(zeta(k + 1)) + math.log(xi(k)) - _lf(2 * k) - 0.5 * math.log(4 * k + 1)
    out.append(("scaled_approximation", lhs, rhs))
    return out


def verify_appendix_inequalities(n_range=range(2, 61), k_range=None):
    """Evaluate the factorial inequalities behind the bound constants.

    Checked for every n in `n_range` and k in `k_range` (defaults to
    `n_range`), in log domain:

    * number_tail: 2 sqrt(pi) (n-1)^(2n-2) (2n-2) / ((2n-2)! sqrt(4n-3)) (2/e)^(2n-2) <= 1
    * support_tail: 2 sqrt(pi) n^(2n-1) (2n-1) / (e (2n-1)! sqrt(4n-1)) (2/e)^(2n-1) <= 1
    * stability_separation: (4 sqrt(4n-1) (2n-1)! / (zeta(n) lambda(n)))^(1/(2n-1)) <= 6.24
    * position_constant: 2^(n-1) (2n-1)! sqrt(4n-1) / (zeta(n) (n-2)!)
      <= 7.73 sqrt(4n-1) (2n-1) 4^(2n-1) / (4 e pi^(3/2))
    * scaled_approximation: zeta(k+1) xi(k) / ((2k)! sqrt(4k+1)) >= 1.15 / (2^(4k) k)
    * stirling_lower/upper: sqrt(2 pi) n^(n+1/2) e^-n <= n! <= e n^(n+1/2) e^-n

    Returns
    -------
    list of InequalityRow
        ``lhs``/``rhs`` are natural logs of the two sides, with lhs <= rhs required.
    """
    rows = []
    k_range = n_range if k_range is None else k_range
    for idx, checks in [(n, _n_checks(n)) for n in n_range] + [(k, _k_checks(k)) for k in k_range]:
        for name, lhs, rhs in checks:
            rows.append(InequalityRow(name, idx, lhs, rhs, lhs <= rhs))
    return rows
