"""Source-number detection from the singular values of a moment Hankel matrix.

Pipeline: least-squares multipole coefficients from the image, a Hankel
matrix of the rescaled coefficients, and a count of singular values above
a noise threshold.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import DiscreteMeasure, Scene
from .multipole import CoefficientVector, build_basis
from .psf import multipole_scale
from .vandermonde import vandermonde_matrix, zeta

RANK_TOL = 1e-13


def recover_coefficients(image, basis):
    """Least-squares multipole coefficients of a sampled image.

    Solves min ||sqrt(h) H(s) theta - sqrt(h) Y||_2 with a pivoted QR
    factorisation.

    Parameters
    ----------
    image : array_like, shape (N,)
    basis : MultipoleBasis
        Built on the grid the image was sampled on.

    Returns
    -------
    CoefficientVector
    """
    y = np.asarray(image, dtype=float)
    if y.shape != (basis.matrix.shape[0],):
        raise ValueError("image length does not match the basis grid")
    if basis.sigma_min < RANK_TOL * basis.singular_values[0]:
        raise np.linalg.LinAlgError(
            f"multipole matrix is numerically rank deficient at s={basis.order_count}; use fewer multipoles")
    a = basis.scaled_matrix
    theta, _, rank, _ = scipy.linalg.lstsq(a, math.sqrt(basis.grid.spacing) * y, lapack_driver="gelsy")
    if rank < basis.order_count:
        raise np.linalg.LinAlgError("pivoted QR found a rank deficient multipole matrix; use fewer multipoles")
    return CoefficientVector(theta)


@dataclass(frozen=True)
class DataMatrix:
    order: int
    entries: np.ndarray

    @property
    def size(self):
        return self.entries.shape[0]


def build_data_matrix(theta, s):
    """m x m Hankel matrix X[i, j] = (i+j)! sqrt(2(i+j)+1) c_(i+j), m = (s+1)/2."""
    if s % 2 == 0 or s < 1:
        raise ValueError("data matrix order s must be odd")
    if s > len(theta):
        raise ValueError("s exceeds the number of recovered coefficients")
    mom = np.asarray(theta.values[:s]) * np.array([multipole_scale(r) for r in range(s)])
    m = (s + 1) // 2
    return DataMatrix(s, scipy.linalg.hankel(mom[:m], mom[m - 1:]))


def detection_threshold(s, sigma, sigma_min):
    """2 pi (s-1)! sqrt(2s-1) sigma / (sqrt(6) sigma_min)."""
    if s < 1 or s % 2 == 0:
        raise ValueError("s must be odd")
    return 2 * math.pi * multipole_scale(s - 1) * sigma / (math.sqrt(6) * sigma_min)


@dataclass(frozen=True)
class DetectionResult:
    estimated_n: int
    singular_values: np.ndarray
    threshold: float
    s_used: int
    coefficients: CoefficientVector

    def as_dict(self):
        return {
            "estimated_n": self.estimated_n,
            "singular_values": [float(v) for v in self.singular_values],
            "threshold": self.threshold,
            "s_used": self.s_used,
            "coefficients": [float(v) for v in self.coefficients.values],
            "moments": [float(v) for v in self.coefficients.moments],
        }


def default_order(s_star, cap=None):
    s = s_star if cap is None else min(s_star, cap)
    return s if s % 2 else s - 1


def detect_source_number(image, basis, s, sigma):
    """Estimate the number of sources behind `image`.

    Parameters
    ----------
    image : array_like
        Samples on ``basis.grid``.
    basis : MultipoleBasis
        Usually of order s*; its sigma_min enters the threshold.
    s : int
        Odd data-matrix order, at most ``basis.order_count``.
    sigma : float
        Noise level.

    Returns
    -------
    DetectionResult
        ``estimated_n`` counts singular values strictly above the threshold.
    """
    if s > basis.order_count:
        raise ValueError("s exceeds the multipole order of the basis")
    theta = recover_coefficients(image, basis)
    x = build_data_matrix(theta, s)
    sv = np.linalg.svd(x.entries, compute_uv=False)
    thr = detection_threshold(s, sigma, basis.sigma_min)
    return DetectionResult(int(np.sum(sv > thr)), sv, thr, s, theta)


@dataclass(frozen=True)
class SeparationRequirement:
    required: float
    simplified: float | None


def music_separation_requirement(n, d, s, sigma, m_min, sigma_min):
    """Separation that guarantees the detector returns n.

    required = (1+d) (4 pi n (s-1)! sqrt(2s-1) / (sqrt(6) zeta(n)^2))^(1/(2n-2))
               (sigma / (sigma_min m_min))^(1/(2n-2))

    ``simplified`` is the upper estimate
    4.75 (1+d) ((n+1)^3.2 sigma / (sigma_min m_min))^(1/(2n-2)), valid at
    s = 2n+1 and reported only there.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if s < 2 * n + 1:
        raise ValueError("data matrix order must satisfy s >= 2n+1")
    p = 1 / (2 * n - 2)
    const = 4 * math.pi * n * multipole_scale(s - 1) / (math.sqrt(6) * zeta(n) ** 2)
    ratio = sigma / (sigma_min * m_min)
    required = (1 + d) * const**p * ratio**p
    simplified = None
    if s == 2 * n + 1:
        simplified = 4.75 * (1 + d) * ((n + 1) ** 3.2 * ratio) ** p
    return SeparationRequirement(required, simplified)


@dataclass(frozen=True)
class SigmaNBound:
    exact: float
    bound: float | None


def dadT_sigma_n_bound(measure, d, s):
    """n-th singular value of D A D^T and its lower bound.

    D holds rows d_j^i (i = 0..(s-1)/2, d_j = -y_j) and A = diag(a_j). The
    bound m_min zeta(n)^2 d_min^(2n-2) / (n (1+d)^(2n-2)) needs n >= 2.
    """
    n = measure.n
    if s % 2 == 0 or s < 2 * n + 1:
        raise ValueError("need odd s >= 2n+1")
    dm = vandermonde_matrix(measure.nodes, (s - 1) // 2)
    x = dm @ np.diag(measure.amplitudes) @ dm.T
    exact = float(np.linalg.svd(x, compute_uv=False)[n - 1])
    if n < 2:
        return SigmaNBound(exact, None)
    bound = measure.min_amplitude * zeta(n) ** 2 * measure.min_separation ** (2 * n - 2) / (
        n * (1 + d) ** (2 * n - 2))
    if bound > exact * (1 + 1e-9):
        raise ArithmeticError(f"sigma_n bound {bound:.3e} exceeds the exact value {exact:.3e}")
    return SigmaNBound(exact, float(bound))


def equispaced_measure(n, separation, amplitude=1.0):
    """n unit sources centred on 0 with the given spacing."""
    pos = separation * (np.arange(n) - (n - 1) / 2)
    return DiscreteMeasure(pos, np.full(n, float(amplitude)))


@dataclass(frozen=True)
class SweepRow:
    separation: float
    seed: int
    sigma_n: float
    threshold: float
    detected_n: int


def separation_sweep(separations, n, priors, grid, s=None, seeds=(0,), noise_model="uniform", amplitude=1.0):
    """Detection outcome for equispaced n-source scenes over a separation range.

    Rows are sorted by (separation, seed). ``sigma_n`` is the n-th
    singular value of the data matrix.
    """
    from .limits import compute_s_star
    from .model import NoiseSpec

    s_star = compute_s_star(priors)
    basis = build_basis(grid, s_star)
    s = default_order(s_star) if s is None else s
    rows = []
    for sep in sorted(separations):
        meas = equispaced_measure(n, sep, amplitude)
        for seed in sorted(seeds):
            scene = Scene(meas, grid, NoiseSpec(priors.sigma, noise_model, seed))
            res = detect_source_number(scene.image(), basis, s, priors.sigma)
            rows.append(SweepRow(float(sep), int(seed), float(res.singular_values[n - 1]), res.threshold,
                                 res.estimated_n))
    return rows
