"""Measures, sampling grids, the forward imaging map and noise."""

import math
from dataclasses import dataclass, field

import numpy as np

from .psf import sinc

NOISE_MODELS = ("uniform", "gaussian")
NOISE_ALIASES = {"uniform-experiment": "uniform", "scaled-gaussian-clipped": "gaussian"}


@dataclass(frozen=True)
class DiscreteMeasure:
    """Point sources ``sum_j a_j delta_{y_j}``.

    Atoms are sorted by position on construction. Positions must be
    distinct and amplitudes nonzero.
    """

    positions: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        y = np.atleast_1d(np.asarray(self.positions, dtype=float))
        a = np.atleast_1d(np.asarray(self.amplitudes, dtype=float))
        if y.ndim != 1 or y.shape != a.shape:
            raise ValueError("positions and amplitudes must be 1-D of equal length")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(a))):
            raise ValueError("measure entries must be finite")
        order = np.argsort(y, kind="stable")
        y, a = y[order], a[order]
        if y.size > 1 and np.any(np.diff(y) <= 0):
            raise ValueError("positions must be distinct")
        if np.any(a == 0):
            raise ValueError("amplitudes must be nonzero")
        y.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "positions", y)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def empty(cls):
        return cls(np.zeros(0), np.zeros(0))

    def __len__(self):
        return self.positions.size

    @property
    def n(self):
        return self.positions.size

    @property
    def total_variation(self):
        return float(np.abs(self.amplitudes).sum())

    @property
    def min_amplitude(self):
        return float(np.abs(self.amplitudes).min()) if self.n else 0.0

    @property
    def min_separation(self):
        """Smallest gap between atoms, ``inf`` for fewer than two atoms."""
        if self.n < 2:
            return math.inf
        return float(np.diff(self.positions).min())

    @property
    def nodes(self):
        """Expansion nodes d_j = -y_j used by the multipole coefficients."""
        return -self.positions

    def scaled(self, factor):
        return DiscreteMeasure(self.positions, self.amplitudes * factor)

    def __add__(self, other):
        pos = np.concatenate([self.positions, other.positions])
        amp = np.concatenate([self.amplitudes, other.amplitudes])
        uniq, inv = np.unique(pos, return_inverse=True)
        summed = np.zeros(uniq.size)
        np.add.at(summed, inv, amp)
        keep = summed != 0
        return DiscreteMeasure(uniq[keep], summed[keep])


@dataclass(frozen=True)
class SamplingGrid:
    """Evenly spaced samples x_t = -R + (t-1) h, t = 1..N, N = floor(2R/h)+1.

    ``h`` must not exceed pi (the Shannon rate for the unit cutoff).
    ``omega`` rescales that limit for a problem with cutoff frequency omega.
    """

    radius: float
    spacing: float
    omega: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("grid radius must be positive")
        if not 0 < self.spacing <= math.pi / self.omega * (1 + 1e-12):
            raise ValueError("grid spacing must lie in (0, pi/omega]")

    @property
    def size(self):
        return int(math.floor(2 * self.radius / self.spacing + 1e-9)) + 1

    @property
    def points(self):
        return -self.radius + self.spacing * np.arange(self.size)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise level, generator (``"uniform"`` or ``"gaussian"``) and seed.

    ``uniform`` draws W(x_t) i.i.d. on (0, sigma/sqrt(2R)) as in the
    reference experiments. ``gaussian`` draws i.i.d. normals rescaled so
    that sqrt(h) ||W||_2 = sigma exactly. The longer names
    ``uniform-experiment`` and ``scaled-gaussian-clipped`` are accepted too.
    """

    sigma: float
    model: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ValueError("noise level must be nonnegative")
        object.__setattr__(self, "model", NOISE_ALIASES.get(self.model, self.model))
        if self.model not in NOISE_MODELS:
            raise ValueError(f"noise model must be one of {NOISE_MODELS}")


@dataclass(frozen=True)
class ProblemPriors:
    """A-priori information (d, sigma, M) and the cutoff frequency omega."""

    d: float
    sigma: float
    M: float
    omega: float = 1.0

    def __post_init__(self):
        for name in ("d", "sigma", "M", "omega"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"prior {name} must be positive, got {value}")


def psf_omega(x, omega=1.0):
    """f_omega(x) = sin(omega x) / (sqrt(omega) x)."""
    return math.sqrt(omega) * sinc(omega * np.asarray(x, dtype=float))


def forward_image(measure, grid, omega=None):
    """Noiseless samples ``[mu * f](x_t) = sum_j a_j f(x_t - y_j)``.

    Parameters
    ----------
    measure : DiscreteMeasure
    grid : SamplingGrid
    omega : float, optional
        Cutoff frequency; defaults to ``grid.omega``.
    """
    omega = grid.omega if omega is None else omega
    if measure.n and np.max(np.abs(measure.positions)) > grid.radius:
        raise ValueError("source positions must lie inside the sampled window")
    x = grid.points
    if not measure.n:
        return np.zeros_like(x)
    return psf_omega(x[:, None] - measure.positions[None, :], omega) @ measure.amplitudes


def grid_norm(values, grid):
    """sqrt(h) ||v||_2, the discrete L2 norm used by every misfit."""
    return math.sqrt(grid.spacing) * float(np.linalg.norm(values))


def generate_noise(grid, spec):
    """Draw a noise vector W with sqrt(h) ||W||_2 <= sigma.

    Deterministic in ``spec.seed``. If a draw overshoots the norm budget it
    is scaled down onto it.
    """
    n = grid.size
    if spec.sigma == 0:
        return np.zeros(n)
    rng = np.random.default_rng(spec.seed)
    if spec.model == "uniform":
        w = rng.uniform(0.0, spec.sigma / math.sqrt(2 * grid.radius), n)
    else:
        w = rng.standard_normal(n)
        w *= spec.sigma / grid_norm(w, grid)
    norm = grid_norm(w, grid)
    if norm > spec.sigma:
        w *= spec.sigma / norm * (1 - 1e-15)
    return w


def admissibility_misfit(candidate, image, grid):
    return grid_norm(forward_image(candidate, grid) - np.asarray(image, dtype=float), grid)


def is_admissible(candidate, image, grid, priors, slack=0.0):
    """Check whether `candidate` explains `image` under `priors`.

    Parameters
    ----------
    candidate : DiscreteMeasure
    image : array_like
        Measured samples on `grid`.
    grid : SamplingGrid
    priors : ProblemPriors
    slack : float
        Relative tolerance on the three inequality tests.

    Returns
    -------
    admissible : bool
        Support inside [-d, d], total variation at most M and misfit at
        most sigma.
    misfit : float
        sqrt(h) ||[candidate * f] - image||_2.
    """
    misfit = admissibility_misfit(candidate, image, grid)
    support_ok = candidate.n == 0 or np.max(np.abs(candidate.positions)) <= priors.d * (1 + slack) + 1e-12
    tv_ok = candidate.total_variation <= priors.M * (1 + slack)
    fit_ok = misfit <= priors.sigma * (1 + slack)
    return bool(support_ok and tv_ok and fit_ok), misfit


@dataclass(frozen=True)
class Scene:
    """A measure observed on a grid with optional noise: the CLI interchange unit."""

    measure: DiscreteMeasure
    grid: SamplingGrid
    noise: NoiseSpec = field(default_factory=lambda: NoiseSpec(0.0))

    @property
    def omega(self):
        return self.grid.omega

    def noise_vector(self):
        # noise is drawn on the unit-cutoff grid and carried through rescaling
        base = SamplingGrid(self.grid.radius * self.omega, self.grid.spacing * self.omega)
        return math.sqrt(self.omega) * generate_noise(base, self.noise)

    def image(self):
        return forward_image(self.measure, self.grid) + self.noise_vector()
