"""Multipole expansion of the image around the origin.

Taylor-expanding f(x - y_j) at y_j = 0 gives

    [mu * f](x) = sum_r c_r h_r(x),
    h_r = sqrt(2r+1) f^(r)(x),
    c_r = sum_j a_j d_j^r / (r! sqrt(2r+1)),   d_j = -y_j.
"""

import math
from dataclasses import dataclass

import numpy as np

from .psf import multipole_scale, sinc_derivative

MAX_ORDERS = 60


@dataclass(frozen=True)
class MultipoleBasis:
    """Grid-sampled multipoles h_0..h_{s-1} stacked as columns of H(s).

    Attributes
    ----------
    grid : SamplingGrid
    order_count : int
        s, the number of columns.
    matrix : ndarray, shape (N, s)
        Unscaled H(s).
    singular_values : ndarray
        Singular values of sqrt(h) H(s), decreasing.
    numerical_floor : float
        Resolution of the SVD, eps * max(N, s) * sigma_max. Values of
        ``sigma_min`` near this floor carry no information.
    """

    grid: object
    order_count: int
    matrix: np.ndarray
    singular_values: np.ndarray
    numerical_floor: float

    @property
    def sigma_min(self):
        return float(self.singular_values[-1])

    @property
    def scaled_matrix(self):
        return math.sqrt(self.grid.spacing) * self.matrix

    def truncated(self, s):
        """Basis made of the first `s` columns."""
        return _assemble(self.grid, self.matrix[:, :s])


def multipole_vector(grid, r):
    """h_r = sqrt(2r+1) f^(r)(x_t) on `grid`."""
    return math.sqrt(2 * r + 1) * sinc_derivative(r, grid.points)


def _assemble(grid, matrix):
    scaled = math.sqrt(grid.spacing) * matrix
    sv = np.linalg.svd(scaled, compute_uv=False)
    floor = np.finfo(float).eps * max(scaled.shape) * sv[0]
    return MultipoleBasis(grid, matrix.shape[1], matrix, sv, float(floor))


def build_basis(grid, s):
    """Sample the first `s` multipoles on `grid` and take the SVD.

    Parameters
    ----------
    grid : SamplingGrid
    s : int
        Number of multipoles, 1 <= s <= 60.

    Returns
    -------
    MultipoleBasis
    """
    s = int(s)
    if grid.omega != 1:
        raise ValueError("multipole bases are built on unit-cutoff grids; rescale the problem first")
    if s < 1:
        raise ValueError("need at least one multipole")
    if s > MAX_ORDERS:
        raise ValueError(f"at most {MAX_ORDERS} multipoles; beyond that sigma_min(s) is below double precision")
    cols = [multipole_vector(grid, r) for r in range(s)]
    return _assemble(grid, np.column_stack(cols))


def sigma_min_curve(grid, s_max):
    """(s, sigma_min(s), floor) for s = 1..s_max from one basis build."""
    full = build_basis(grid, s_max)
    rows = []
    for s in range(1, s_max + 1):
        b = full.truncated(s)
        rows.append((s, b.sigma_min, b.numerical_floor))
    return rows


@dataclass(frozen=True)
class CoefficientVector:
    """Multipole coefficients c_0..c_{s-1}.

    ``moments`` holds the rescaled values r! sqrt(2r+1) c_r, which for a
    discrete measure are the power moments sum_j a_j d_j^r.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    @property
    def moments(self):
        scale = np.array([multipole_scale(r) for r in range(self.values.size)])
        return self.values * scale

    @classmethod
    def from_moments(cls, moments):
        moments = np.asarray(moments, dtype=float)
        scale = np.array([multipole_scale(r) for r in range(moments.size)])
        return cls(moments / scale)


def coefficients(measure, s):
    """Exact multipole coefficients of `measure` up to order s-1."""
    d = measure.nodes
    powers = d[None, :] ** np.arange(s)[:, None] if measure.n else np.zeros((s, 0))
    return CoefficientVector.from_moments(powers @ measure.amplitudes)


def truncation_residual_bound(priors, s, n_measures=1):
    """Bound on the image energy beyond the first `s` multipoles.

    Returns ``n_measures * e^d sqrt(pi) M d^s / (s! sqrt(2s+1))``. With
    ``n_measures=1`` it bounds a single measure of total variation M; the
    difference of two such measures needs ``n_measures=2``.
    """
    d, M = priors.d, priors.M
    if s < 0:
        raise ValueError("s must be nonnegative")
    log_term = s * math.log(d) - math.lgamma(s + 1) - 0.5 * math.log(2 * s + 1) if s else 0.0
    return n_measures * math.exp(d) * math.sqrt(math.pi) * M * math.exp(log_term)


def limiting_gram(s):
    """Limit of h H(s)^T H(s) as the window radius grows.

    Entry (p, j) is (-1)^((p-j)/2) pi sqrt(2p+1) sqrt(2j+1) / (p+j+1) when
    p+j is even and zero otherwise.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    p = np.arange(s)[:, None]
    j = np.arange(s)[None, :]
    even = (p + j) % 2 == 0
    sign = np.where(((p - j) // 2) % 2 == 0, 1.0, -1.0)
    g = sign * np.pi * np.sqrt(2 * p + 1) * np.sqrt(2 * j + 1) / (p + j + 1)
    return np.where(even, g, 0.0)


def limiting_sigma_min(s):
    """sqrt of the smallest eigenvalue of ``limiting_gram(s)``."""
    return float(math.sqrt(max(np.linalg.eigvalsh(limiting_gram(s))[0], 0.0)))
