"""Vandermonde matrices, their combinatorial constants and norm bounds."""

import math
from dataclasses import dataclass

import numpy as np

from ..psf import multipole_scale


class BoundViolation(ArithmeticError):
    """A computed quantity falls on the wrong side of an analytic bound."""


def as_nodes(nodes, bound=None):
    """Validate a node set: finite, strictly increasing, inside [-bound, bound]."""
    d = np.atleast_1d(np.asarray(nodes, dtype=float))
    if d.ndim != 1 or not np.all(np.isfinite(d)):
        raise ValueError("nodes must be a finite 1-D sequence")
    if d.size > 1 and np.any(np.diff(d) <= 0):
        raise ValueError("nodes must be distinct and increasing")
    if bound is not None and d.size and np.max(np.abs(d)) > bound:
        raise ValueError("nodes exceed the stated bound")
    return d


def min_separation(nodes):
    nodes = np.sort(np.asarray(nodes, dtype=float))
    return float(np.diff(nodes).min()) if nodes.size > 1 else math.inf


# combinatorial constants

def zeta(m):
    """zeta(m) = min_i (i-1)! (m-i)!, the smallest node-gap product of m unit-spaced nodes."""
    if m < 1:
        raise ValueError("zeta is defined for m >= 1")
    k = m - 1
    if k % 2:
        return math.factorial((k + 1) // 2) * math.factorial((k - 1) // 2)
    return math.factorial(k // 2) ** 2


def xi(k):
    if k < 1:
        raise ValueError("xi is defined for k >= 1")
    if k == 1:
        return 0.5
    if k % 2:
        return math.factorial((k - 1) // 2) * math.factorial((k - 3) // 2) / 4
    return math.factorial((k - 2) // 2) ** 2 / 4


def lam(n):
    if n < 2:
        raise ValueError("lambda is defined for n >= 2")
    return 1.0 if n == 2 else xi(n - 2)


# matrix builders

def vandermonde_matrix(nodes, max_power):
    """(p+1) x k matrix with entry (i, j) = d_j^i."""
    nodes = np.atleast_1d(np.asarray(nodes, dtype=float))
    if max_power < 0:
        raise ValueError("max_power must be nonnegative")
    return nodes[None, :] ** np.arange(max_power + 1)[:, None]


def row_scales(s):
    return np.array([multipole_scale(r) for r in range(s)])


def scaled_vandermonde(nodes, rows):
    """`rows` x k matrix, row r equal to d_j^r / (r! sqrt(2r+1))."""
    if rows < 1:
        raise ValueError("need at least one row")
    return vandermonde_matrix(nodes, rows - 1) / row_scales(rows)[:, None]


def elementary_symmetric_all(nodes):
    """e_0..e_k of the nodes by the product-expansion recursion."""
    e = np.zeros(len(nodes) + 1)
    e[0] = 1.0
    for i, d in enumerate(np.asarray(nodes, dtype=float)):
        e[1:i + 2] = e[1:i + 2] + d * e[0:i + 1]
    return e


def elementary_symmetric(nodes, j):
    """Elementary symmetric polynomial e_j over unordered j-subsets of the nodes."""
    nodes = np.atleast_1d(np.asarray(nodes, dtype=float))
    if not 0 <= j <= nodes.size:
        raise ValueError("j must lie in 0..k")
    return float(elementary_symmetric_all(nodes)[j])


# column reduction

@dataclass(frozen=True)
class Reduction:
    """Identity-topped form of the (k+1) x k Vandermonde matrix.

    ``vandermonde @ G[0] @ ... @ G[-1] @ D @ Q[0] @ ... @ Q[-1] == reduced``.
    G are the forward column eliminations making the top block lower
    triangular, D normalises its diagonal, Q clear it back to identity.
    """

    vandermonde: np.ndarray
    reduced: np.ndarray
    forward: tuple
    diagonal: np.ndarray
    backward: tuple

    @property
    def last_row(self):
        return self.reduced[-1]

    def transform(self):
        k = self.reduced.shape[1]
        t = np.eye(k)
        for g in self.forward:
            t = t @ g
        t = t @ self.diagonal
        for q in self.backward:
            t = t @ q
        return t


def reduce_vandermonde(nodes):
    """Reduce [phi(d_1) ... phi(d_k)] (powers 0..k) by column additions.

    The last row of the result equals ((-1)^(k-j) e_(k+1-j)), j = 1..k,
    so that d^k = sum_j v_j d^(j-1) at every node.
    """
    nodes = as_nodes(nodes)
    k = nodes.size
    v = vandermonde_matrix(nodes, k)
    work = v.copy()
    forward = []
    for t in range(k - 1):
        g = np.eye(k)
        piv = work[t, t]
        if piv == 0:
            raise ZeroDivisionError("coincident nodes")
        g[t, t + 1:] = -work[t, t + 1:] / piv
        work = work @ g
        work[t, t + 1:] = 0.0
        forward.append(g)
    diag = np.diag(work)[:k]
    if np.any(diag == 0):
        raise ZeroDivisionError("coincident nodes")
    dmat = np.diag(1.0 / diag)
    work = work @ dmat
    backward = []
    for t in range(1, k):
        c = k - t
        q = np.eye(k)
        q[c, :c] = -work[c, :c]
        work = work @ q
        work[c, :c] = 0.0
        backward.append(q)
    return Reduction(v, work, tuple(forward), dmat, tuple(backward))


def det_ratio(nodes):
    """sqrt(det(V^T V) / det(U^T U)) with V powers 0..k, U powers 0..k-1.

    Evaluated through the identity sqrt(sum_j e_j^2).
    """
    nodes = as_nodes(nodes)
    return float(math.sqrt(np.sum(elementary_symmetric_all(nodes) ** 2)))


def projection_distance(base_nodes, v):
    """Distance from `v` (length k+1) to span{phi_k(w_1), ..., phi_k(w_k)}.

    Uses sqrt(det(Ahat^T Ahat) / det(A^T A)) with Ahat = [A, v].
    """
    base_nodes = as_nodes(base_nodes)
    k = base_nodes.size
    v = np.asarray(v, dtype=float)
    if v.shape != (k + 1,):
        raise ValueError("v must have length k+1")
    a = vandermonde_matrix(base_nodes, k)
    sign_a, log_a = np.linalg.slogdet(a.T @ a)
    if sign_a <= 0 or not np.isfinite(log_a):
        raise np.linalg.LinAlgError("base Vandermonde matrix is rank deficient")
    ahat = np.column_stack([a, v])
    # Ahat is square, so det(Ahat^T Ahat) = det(Ahat)^2
    sign_h, log_h = np.linalg.slogdet(ahat)
    if sign_h == 0:
        return 0.0
    return float(math.exp(log_h - 0.5 * log_a))


def eta_vector(targets, probes):
    """Component i is prod_q (t_i - p_q); probes may coincide."""
    t = np.atleast_1d(np.asarray(targets, dtype=float))
    p = np.atleast_1d(np.asarray(probes, dtype=float))
    return np.prod(t[:, None] - p[None, :], axis=1)


# closed-form bounds in Vandermonde space

def approximation_lower_bound(k, d, d_min, m_min, scaled=False):
    """Lower bound on min ||A(k) a - A* a*||_2 for k+1 targets, rows 0..2k.

    Plain rows: zeta(k+1) xi(k) m_min d_min^(2k) / (1+d)^(2k).
    Rows divided by r! sqrt(2r+1): 1.15 m_min d_min^(2k) / (2^(4k) k (1+d)^(2k)).
    """
    ratio = (d_min / (1 + d)) ** (2 * k)
    if scaled:
        return 1.15 * m_min * ratio / (2 ** (4 * k) * k)
    return zeta(k + 1) * xi(k) * m_min * ratio


def eta_lower_bound(k, d_min):
    """xi(k) d_min^k, the floor of ||eta||_inf for k+1 targets and k probes."""
    return xi(k) * d_min**k


def stability_eta_bound(k, d, d_min, m_min, sigma, scaled=False):
    """Ceiling on ||eta||_inf for k probes fitting k targets to within sigma (rows 0..2k-1)."""
    val = (1 + d) ** (2 * k - 1) * sigma / (zeta(k) * d_min ** (k - 1) * m_min)
    if scaled:
        val *= multipole_scale(2 * k - 1)
    return val


def sharpness_upper_bound(k, m_star, d_min):
    return 2 * m_star * k ** (2 * k) * d_min ** (2 * k)


@dataclass(frozen=True)
class SharpnessInstance:
    nodes: np.ndarray
    weights: np.ndarray
    target_nodes: np.ndarray
    target_amplitudes: np.ndarray
    probe_nodes: np.ndarray
    probe_amplitudes: np.ndarray
    value: float
    bound: float

    @property
    def m_star(self):
        return float(np.abs(self.target_amplitudes).sum())

    @property
    def d_min(self):
        return min_separation(self.target_nodes)


def sharpness_construction(k, d, m_star=1.0):
    """Near-optimal k-probe approximation of a (k+1)-atom target.

    The 2k+1 equispaced nodes in [-d, d] carry the null vector of the
    first 2k Vandermonde rows. Its k+1 largest entries form the target,
    the remaining k (negated) the probes, so the moment mismatch lives in
    the last row only.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    nodes = np.linspace(-d, d, 2 * k + 1)
    q = vandermonde_matrix(nodes, 2 * k)
    _, _, vt = np.linalg.svd(vandermonde_matrix(nodes / d, 2 * k - 1))
    w = vt[-1]
    if np.min(np.abs(w)) < 1e-14 * np.max(np.abs(w)):
        raise BoundViolation("null vector has a vanishing entry")
    order = np.argsort(-np.abs(w), kind="stable")
    tgt = np.sort(order[:k + 1])
    prb = np.sort(order[k + 1:])
    w = w * m_star / np.abs(w[tgt]).sum()
    target_a = w[tgt]
    probe_a = -w[prb]
    residual = q[:, tgt] @ target_a - q[:, prb] @ probe_a
    value = float(np.linalg.norm(residual))
    bound = sharpness_upper_bound(k, m_star, min_separation(nodes[tgt]))
    if value > bound * (1 + 1e-9):
        raise BoundViolation(f"sharpness value {value:.3e} exceeds {bound:.3e}")
    return SharpnessInstance(nodes, w, nodes[tgt], target_a, nodes[prb], probe_a, value, bound)


# inverse and singular value bounds

def lagrange_inverse(nodes):
    """Inverse of the square Vandermonde (rows 0..k-1) from Lagrange basis coefficients.

    Row i holds the monomial coefficients of
    L_i(x) = prod_{p != i} (x - d_p) / (d_i - d_p).
    """
    nodes = as_nodes(nodes)
    k = nodes.size
    inv = np.empty((k, k))
    for i in range(k):
        others = np.delete(nodes, i)
        # elementary_symmetric_all gives prod (1 + d x); flip signs for prod (x - d)
        e = elementary_symmetric_all(-others)
        coef = e[::-1]
        inv[i] = coef / np.prod(nodes[i] - others)
    return inv


@dataclass(frozen=True)
class InverseNormBounds:
    exact: float
    product_bound: float
    separation_bound: float


def inverse_inf_norm_bound(nodes, bound=None, rtol=1e-9):
    """||V^{-1}||_inf for the square Vandermonde and its two upper bounds.

    product_bound : max_i prod_{p != i} (1 + |d_p|) / |d_i - d_p|
    separation_bound : (1+d)^(k-1) / (zeta(k) d_min^(k-1)), d = max |d_i|
    unless `bound` is given.
    """
    nodes = as_nodes(nodes, bound)
    k = nodes.size
    if k > 12:
        raise ValueError("inverse bounds are evaluated for at most 12 nodes")
    d = float(np.max(np.abs(nodes))) if bound is None else float(bound)
    exact = float(np.abs(lagrange_inverse(nodes)).sum(axis=1).max())
    prods = []
    for i in range(k):
        others = np.delete(nodes, i)
        prods.append(np.prod((1 + np.abs(others)) / np.abs(nodes[i] - others)))
    product_bound = float(max(prods))
    dmin = min_separation(nodes) if k > 1 else 1.0
    separation_bound = (1 + d) ** (k - 1) / (zeta(k) * dmin ** (k - 1))
    if exact > product_bound * (1 + rtol) or product_bound > separation_bound * (1 + rtol):
        raise BoundViolation(f"inverse norm chain broken: {exact}, {product_bound}, {separation_bound}")
    return InverseNormBounds(exact, product_bound, float(separation_bound))


@dataclass(frozen=True)
class SingularValueBounds:
    exact: float
    square: float
    lower_bound: float


def min_singular_bound(nodes, rows, rtol=1e-9):
    """sigma_min of the Vandermonde with powers 0..rows and its lower bound.

    lower_bound = k^(-1/2) min_i prod_{p != i} |d_i - d_p| / (1 + |d_p|).
    ``square`` is sigma_min of the k x k leading block.
    """
    nodes = as_nodes(nodes)
    k = nodes.size
    if rows < k - 1:
        raise ValueError("need rows >= k-1")
    w = vandermonde_matrix(nodes, rows)
    exact = float(np.linalg.svd(w, compute_uv=False)[-1])
    square = float(np.linalg.svd(w[:k], compute_uv=False)[-1])
    prods = []
    for i in range(k):
        others = np.delete(nodes, i)
        prods.append(np.prod(np.abs(nodes[i] - others) / (1 + np.abs(others))))
    lower = float(min(prods) / math.sqrt(k))
    if lower > square * (1 + rtol) or square > exact * (1 + rtol):
        raise BoundViolation(f"singular value chain broken: {lower}, {square}, {exact}")
    return SingularValueBounds(exact, square, lower)
