"""Normalised adjacency spectra and Hoffman's ratio bound.

The eigensolver is self-contained: Householder reduction to tridiagonal form,
Sturm-sequence bisection for selected eigenvalues, and inverse iteration for
their eigenvectors.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .graph import Graph, build_inverse_graph
from .numtheory import require_prime

__all__ = [
    "CapacityError",
    "Extremes",
    "SpectralReport",
    "eigen_extremes",
    "eigenvalues",
    "graph_report",
    "hoffman_bound",
    "normalized_adjacency",
    "spectral_report",
    "tridiagonalize",
]

DENSE_MAX_N = 4000
SYMMETRY_TOL = 1e-12


class CapacityError(RuntimeError):
    pass


def normalized_adjacency(g: Graph, d: int | None = None) -> np.ndarray:
    """Adjacency scaled by 1/d with a zero diagonal (self-loops dropped)."""
    dmax = g.max_degree()
    if d is None:
        d = dmax
    if d < dmax or d <= 0:
        raise ValueError(f"d={d} is below the maximum degree {dmax}")
    a = np.zeros((g.n, g.n))
    for u, v in g.edges():
        a[u, v] = a[v, u] = 1.0 / d
    return a


def _check_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.size and np.max(np.abs(m - m.T)) > SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric")
    return m


def tridiagonalize(m: np.ndarray):
    """Householder reduction Q^T M Q = T.

    Returns ``(diag, off, reflectors)``; ``reflectors[k]`` is the unit vector
    acting on coordinates ``k+1:`` (None where no reflection was needed).
    """
    a = _check_symmetric(m).copy()
    n = a.shape[0]
    reflectors = []
    for k in range(n - 2):
        x = a[k + 1 :, k]
        norm = np.linalg.norm(x)
        if norm == 0.0 or not np.any(x[1:]):
            reflectors.append(None)
            continue
        alpha = -norm if x[0] >= 0 else norm
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        sub = a[k + 1 :, k + 1 :]
        p = sub @ v
        w = p - (v @ p) * v
        sub -= 2.0 * (np.outer(v, w) + np.outer(w, v))
        a[k + 1, k] = a[k, k + 1] = alpha
        a[k + 2 :, k] = 0.0
        a[k, k + 2 :] = 0.0
        reflectors.append(v)
    diag = np.diag(a).copy()
    off = np.diag(a, 1).copy() if n > 1 else np.zeros(0)
    return diag, off, reflectors


def _count_below(diag, off2, x: float) -> int:
    """Number of eigenvalues of the tridiagonal matrix strictly below x."""
    count = 0
    q = 1.0
    tiny = 1e-300
    for i in range(len(diag)):
        q = diag[i] - x - (off2[i - 1] / q if i else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0:
            count += 1
    return count


def _kth_eigenvalue(diag, off, k: int) -> float:
    """k-th smallest eigenvalue (0-based) by bisection."""
    off2 = [e * e for e in off]
    absoff = np.abs(off)
    radius = np.zeros(len(diag))
    radius[:-1] += absoff
    radius[1:] += absoff
    lo = float(np.min(diag - radius)) - 1e-12
    hi = float(np.max(diag + radius)) + 1e-12
    scale = max(abs(lo), abs(hi), 1.0)
    diag = [float(v) for v in diag]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi) or hi - lo <= 4e-16 * scale:
            break
        if _count_below(diag, off2, mid) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _solve_tridiagonal(sub, diag, sup, rhs):
    """Gaussian elimination with partial pivoting on a tridiagonal system."""
    n = len(diag)
    d = list(diag)
    dl = list(sub)
    du = list(sup)
    du2 = [0.0] * max(n - 2, 0)
    b = list(rhs)
    # zero pivots (shift equal to an eigenvalue) are nudged off zero as in
    # LAPACK's inverse iteration
    tiny = np.finfo(float).eps * max([1.0] + [abs(v) for v in diag] + [abs(v) for v in sub])
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if d[i] == 0.0:
                d[i] = tiny
            fact = dl[i] / d[i]
            d[i + 1] -= fact * du[i]
            b[i + 1] -= fact * b[i]
        else:
            fact = d[i] / dl[i]
            d[i] = dl[i]
            temp = d[i + 1]
            d[i + 1] = du[i] - fact * temp
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du2[i]
            du[i] = temp
            b[i], b[i + 1] = b[i + 1], b[i] - fact * b[i + 1]
    if d[n - 1] == 0.0:
        d[n - 1] = tiny
    x = [0.0] * n
    x[n - 1] = b[n - 1] / d[n - 1]
    if n > 1:
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i]
    return np.array(x)


def _tridiagonal_eigenvector(diag, off, lam: float, seed: int) -> np.ndarray:
    n = len(diag)
    if n == 1:
        return np.ones(1)
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(n)
    shifted = [float(v) - lam for v in diag]
    off = [float(e) for e in off]
    for _ in range(4):
        y = _solve_tridiagonal(off, shifted, off, y)
        y /= np.linalg.norm(y)
    return y


def _back_transform(y: np.ndarray, reflectors) -> np.ndarray:
    x = y.copy()
    for k in range(len(reflectors) - 1, -1, -1):
        v = reflectors[k]
        if v is not None:
            seg = x[k + 1 :]
            seg -= 2.0 * (v @ seg) * v
    return x


@dataclass
class Extremes:
    lambda_1: float
    lambda_2: float
    lambda_n: float
    vectors: np.ndarray
    residuals: tuple[float, float, float]

    def __iter__(self):
        return iter((self.lambda_1, self.lambda_2, self.lambda_n))


def eigen_extremes(m: np.ndarray) -> Extremes:
    """Largest, second largest and smallest eigenvalue of a symmetric matrix,
    with unit eigenvectors (columns) and residual norms ||Mv - lambda v||."""
    m = _check_symmetric(m)
    n = m.shape[0]
    if n == 0:
        raise ValueError("empty matrix")
    diag, off, refl = tridiagonalize(m)
    ks = (n - 1, max(n - 2, 0), 0)
    values = [_kth_eigenvalue(diag, off, k) for k in ks]
    vecs = np.zeros((n, 3))
    for j, lam in enumerate(values):
        v = _back_transform(_tridiagonal_eigenvector(diag, off, lam, seed=j), refl)
        vecs[:, j] = v / np.linalg.norm(v)
    # a repeated top eigenvalue must not return the same vector twice
    if n > 1 and abs(values[0] - values[1]) <= 1e-9 * max(1.0, abs(values[0])):
        v1, v2 = vecs[:, 0], vecs[:, 1]
        v2 = v2 - (v1 @ v2) * v1
        if np.linalg.norm(v2) > 1e-8:
            vecs[:, 1] = v2 / np.linalg.norm(v2)
    residuals = tuple(float(np.linalg.norm(m @ vecs[:, j] - values[j] * vecs[:, j])) for j in range(3))
    return Extremes(values[0], values[1], values[2], vecs, residuals)


def eigenvalues(m: np.ndarray) -> np.ndarray:
    """Full spectrum in decreasing order (bisection per eigenvalue; small n)."""
    diag, off, _ = tridiagonalize(m)
    n = len(diag)
    return np.array([_kth_eigenvalue(diag, off, k) for k in range(n - 1, -1, -1)])


def hoffman_bound(lambda_n):
    """Upper bound -lambda_n / (1 - lambda_n) on the independence ratio of a
    regular graph. Exact for Fraction input."""
    exact = isinstance(lambda_n, (Fraction, int))
    lam = Fraction(lambda_n) if exact else float(lambda_n)
    if lam >= 0:
        raise ValueError(f"smallest eigenvalue must be negative, got {lambda_n}")
    if lam < -1:
        if exact or lam < -1 - 1e-9:
            raise ValueError(f"smallest normalised eigenvalue must be >= -1, got {lambda_n}")
        lam = -1.0
    return -lam / (1 - lam)


@dataclass
class SpectralReport:
    n: int
    d: int
    lambda_1: float
    lambda_2: float
    lambda_n: float
    lam: float
    hoffman: float
    regular: bool
    max_residual: float
    p: int | None = None

    def to_json(self) -> str:
        return json.dumps({k: _fmt(v) for k, v in asdict(self).items()}, sort_keys=True)


def _fmt(v):
    return float(f"{v:.12g}") if isinstance(v, float) else v


def graph_report(g: Graph, d: int | None = None) -> SpectralReport:
    if g.n > DENSE_MAX_N:
        raise CapacityError(
            f"n={g.n} exceeds the dense solver limit {DENSE_MAX_N}; an iterative method is needed"
        )
    d = g.max_degree() if d is None else d
    ext = eigen_extremes(normalized_adjacency(g, d))
    degs = set(g.degrees())
    return SpectralReport(
        n=g.n,
        d=d,
        lambda_1=ext.lambda_1,
        lambda_2=ext.lambda_2,
        lambda_n=ext.lambda_n,
        lam=max(ext.lambda_2, -ext.lambda_n),
        hoffman=hoffman_bound(ext.lambda_n),
        regular=degs == {d},
        max_residual=max(ext.residuals),
    )


def spectral_report(p: int, max_n: int = DENSE_MAX_N) -> SpectralReport:
    require_prime(p)
    if p > max_n:
        raise CapacityError(f"p={p} exceeds the dense solver limit {max_n}; an iterative method is needed")
    report = graph_report(build_inverse_graph(p), d=3)
    report.p = p
    return report
