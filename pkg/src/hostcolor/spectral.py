"""Adjacency spectra: dense oracle, block-Krylov extreme eigenpairs, checks.

The iterative solver only needs ``A @ X``; everything else is small dense
linear algebra on the Krylov basis.  Most-negative pairs are computed as the
largest pairs of ``-A``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

import numpy as np

from .generators import PlantedInstance
from .graph import Coloring, Graph, edges_between, vertex_set
from .rng import as_rng

DENSE_CAP = 2048


class EigenSolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues sorted descending with unit eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def residuals(self, G: Graph) -> np.ndarray:
        A = G.adjacency_matrix()
        R = A @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return np.linalg.norm(R, axis=0)


def _fix_signs(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for j in range(V.shape[1]):
        col = V[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-10 * max(1.0, np.abs(col).max()))
        if len(nz) and col[nz[0]] < 0:
            V[:, j] = -col
    return V


def full_spectrum_dense(G: Graph, cap: int = DENSE_CAP) -> SpectralDecomposition:
    """All eigenpairs of the adjacency matrix via a dense symmetric solver."""
    if G.n > cap:
        raise ValueError(f"n={G.n} exceeds dense cap {cap}")
    w, V = np.linalg.eigh(G.dense_adjacency())
    return SpectralDecomposition(w[::-1].copy(), _fix_signs(V[:, ::-1]))


def _orthonormalize(W: np.ndarray, bases: list[np.ndarray], drop: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of W minus its projection on ``bases`` (CGS2)."""
    scale = max(float(np.abs(W).max(initial=0.0)), 1e-300)
    for _ in range(2):
        for B in bases:
            if B.shape[1]:
                W = W - B @ (B.T @ W)
    if W.shape[1] == 0:
        return W
    U, s, _ = np.linalg.svd(W, full_matrices=False)
    keep = s > drop * scale * math.sqrt(W.shape[0])
    U = U[:, keep]
    for B in bases:
        if B.shape[1] and U.shape[1]:
            U = U - B @ (B.T @ U)
    if U.shape[1]:
        U, _ = np.linalg.qr(U)
    return U


def _top_pairs(apply: Callable[[np.ndarray], np.ndarray], n: int, p: int, tol: float,
               budget: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Largest ``p`` eigenpairs of a symmetric operator by restarted block Krylov.

    Converged Ritz pairs are locked and projected out of later Krylov spaces.
    """
    locked_vals: list[float] = []
    L = np.zeros((n, 0))
    used = 0
    X = rng.standard_normal((n, min(n, p + 3)))
    while len(locked_vals) < p:
        room = n - L.shape[1]
        b = min(room, p - len(locked_vals) + 3)
        Q = _orthonormalize(X[:, :b], [L])
        if Q.shape[1] == 0:
            Q = _orthonormalize(rng.standard_normal((n, b)), [L])
        blocks, images = [Q], []
        depth = max(3, min(40, 240 // max(b, 1)))
        dim = Q.shape[1]
        for _ in range(depth):
            W = apply(blocks[-1])
            used += blocks[-1].shape[1]
            images.append(W)
            if dim >= room:
                break
            Qn = _orthonormalize(W, [L, *blocks])
            if Qn.shape[1] == 0:
                break
            blocks.append(Qn)
            dim += Qn.shape[1]
        if len(images) < len(blocks):
            images.append(apply(blocks[-1]))
            used += blocks[-1].shape[1]
        V = np.hstack(blocks)
        MV = np.hstack(images)
        T = V.T @ MV
        T = (T + T.T) / 2
        theta, Y = np.linalg.eigh(T)
        theta, Y = theta[::-1], Y[:, ::-1]
        U = V @ Y
        R = MV @ Y - U * theta
        res = np.linalg.norm(R, axis=0)
        newly = 0
        for i in range(len(theta)):
            if len(locked_vals) >= p:
                break
            if res[i] <= tol * max(1.0, abs(theta[i])):
                locked_vals.append(float(theta[i]))
                newly += 1
            else:
                break
        if newly:
            L = np.hstack([L, U[:, :newly]])
            L, _ = np.linalg.qr(L)
            # re-derive locked vectors as exact Ritz vectors of the locked span
            LM = apply(L)
            used += L.shape[1]
            w, Z = np.linalg.eigh((L.T @ LM + (L.T @ LM).T) / 2)
            L = L @ Z[:, ::-1]
            locked_vals = w[::-1].tolist()
        X = U[:, newly:]
        if X.shape[1] < b:
            X = np.hstack([X, rng.standard_normal((n, b - X.shape[1]))])
        if used > budget and len(locked_vals) < p:
            raise EigenSolverError(f"no convergence after {used} matrix applications")
    order = np.argsort(locked_vals)[::-1][:p]
    return np.asarray(locked_vals)[order], L[:, order]


def extreme_eigenpairs(G: Graph, num_low: int = 0, num_high: int = 0, tol: float = 1e-9,
                       seed=0, max_applications: int | None = None) -> SpectralDecomposition:
    """``num_high`` largest and ``num_low`` most negative adjacency eigenpairs.

    Output is sorted descending: the high pairs first, then the low pairs.
    The default budget is ``10 n`` matrix applications per requested pair.
    """
    n = G.n
    if n == 0:
        raise ValueError("graph has no vertices")
    if num_low < 0 or num_high < 0 or num_low + num_high > n:
        raise ValueError("need 0 <= num_low + num_high <= n")
    A = G.adjacency_matrix()
    rng = as_rng(seed)
    vals, vecs = [], []
    if num_high:
        budget = max_applications or 10 * n * num_high
        w, V = _top_pairs(lambda X: A @ X, n, num_high, tol, budget, rng)
        vals.append(w)
        vecs.append(V)
    if num_low:
        budget = max_applications or 10 * n * num_low
        w, V = _top_pairs(lambda X: -(A @ X), n, num_low, tol, budget, rng)
        vals.append(-w[::-1])
        vecs.append(V[:, ::-1])
    if not vals:
        return SpectralDecomposition(np.zeros(0), np.zeros((n, 0)))
    return SpectralDecomposition(np.concatenate(vals), _fix_signs(np.hstack(vecs)))


def bottom_eigenvectors(G: Graph, count: int, seed=0, dense_below: int = 0) -> SpectralDecomposition:
    """The ``count`` most negative pairs, ascending from the most negative."""
    if G.n <= max(dense_below, count + 1):
        full = full_spectrum_dense(G)
        return SpectralDecomposition(full.eigenvalues[::-1][:count].copy(),
                                     full.eigenvectors[:, ::-1][:, :count].copy())
    sd = extreme_eigenpairs(G, num_low=count, seed=seed)
    return SpectralDecomposition(sd.eigenvalues[::-1].copy(), sd.eigenvectors[:, ::-1].copy())


def lambda_expansion(G: Graph, seed=0) -> float:
    """max(lambda_2, |lambda_n|)."""
    if G.n < 2:
        raise ValueError("need n >= 2")
    if G.n <= 4:
        w = full_spectrum_dense(G).eigenvalues
        return float(max(w[1], abs(w[-1])))
    sd = extreme_eigenpairs(G, num_low=1, num_high=2, seed=seed)
    w = sd.eigenvalues
    return float(max(w[1], abs(w[2])))


def indicator_basis(P: Coloring) -> np.ndarray:
    """Unit vectors encoding the partition, as columns ``x_0 .. x_{k-1}``.

    ``x_0`` is the normalized all-ones vector.  For k = 3 the other two are
    the class patterns (2, -1, -1) and (0, 1, -1); otherwise a Helmert basis
    of the complement of the all-ones vector in R^k is used.
    """
    k = P.k
    if k == 3:
        patterns = np.array([[1.0, 1.0, 1.0], [2.0, -1.0, -1.0], [0.0, 1.0, -1.0]])
    else:
        patterns = np.zeros((k, k))
        patterns[0] = 1.0
        for j in range(1, k):
            patterns[j, :j] = 1.0
            patterns[j, j] = -float(j)
    cols = np.zeros((P.n, k))
    labels = P.assign - 1
    for j in range(k):
        v = patterns[j][labels]
        norm = np.linalg.norm(v)
        cols[:, j] = v / norm if norm > 0 else v
    return cols


@dataclass
class SpectrumReport:
    d: float
    mode: str
    lambda_1: float
    lambda_n_minus_1: float
    lambda_n: float
    middle_max: float
    host_lambda_hat: float
    window_top: tuple[float, float]
    window_bottom: tuple[float, float]
    middle_bound: float
    alignment_x: float
    alignment_y: float
    alignment_min: float
    flags: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def validate_planted_spectrum(inst: PlantedInstance, mode: str = "random-planting", *,
                              d: float | None = None, top_slack: float = 0.08,
                              bottom_slack: float = 0.08, middle_const: float = 6.0,
                              align_slack: float = 0.2, seed=0,
                              dense: bool | None = None) -> SpectrumReport:
    """Compare the spectrum of a planted 3-coloring instance with its predicted shape.

    Windows: lambda_1 in (2/3)d +- top_slack*d, the two lowest eigenvalues in
    -(1/3)d +- bottom_slack*d, all other eigenvalues within
    2*lam + middle_const*sqrt(d) (``random-planting``) or
    2*lam + middle_const*sqrt(d*lam) (``adversarial-planting``), where lam is
    the host's expansion.  Alignment is the norm of the projection of each
    partition vector onto the bottom two eigenvectors.
    """
    if inst.k != 3:
        raise ValueError("spectrum validation is defined for k = 3")
    if mode not in ("random-planting", "adversarial-planting"):
        raise ValueError(f"unknown mode {mode!r}")
    dd = float(d if d is not None else inst.d)
    G, n = inst.result, inst.n
    use_dense = n <= DENSE_CAP if dense is None else dense
    if use_dense:
        full = full_spectrum_dense(G)
        w, V = full.eigenvalues, full.eigenvectors
        lam1, lam_nm1, lam_n = w[0], w[-2], w[-1]
        middle = float(np.abs(w[1:-2]).max()) if n > 3 else 0.0
        bottom = V[:, -2:]
        hw = full_spectrum_dense(inst.host).eigenvalues
        host_lam = float(max(hw[1], abs(hw[-1])))
    else:
        sd = extreme_eigenpairs(G, num_low=3, num_high=2, seed=seed)
        w = sd.eigenvalues
        lam1, lam_nm1, lam_n = w[0], w[-2], w[-1]
        middle = float(max(abs(w[1]), abs(w[2])))
        bottom = sd.eigenvectors[:, -2:]
        host_lam = lambda_expansion(inst.host, seed=seed)
    basis = indicator_basis(inst.planted)
    ax = float(np.linalg.norm(bottom.T @ basis[:, 1]))
    ay = float(np.linalg.norm(bottom.T @ basis[:, 2]))
    eps = 1e-9 * max(1.0, dd)
    top = ((2 / 3 - top_slack) * dd - eps, (2 / 3 + top_slack) * dd + eps)
    bot = ((-1 / 3 - bottom_slack) * dd - eps, (-1 / 3 + bottom_slack) * dd + eps)
    if mode == "random-planting":
        mid_bound = 2 * host_lam + middle_const * math.sqrt(dd)
    else:
        mid_bound = 2 * host_lam + middle_const * math.sqrt(dd * host_lam)
    amin = 1 - align_slack - 1e-9
    flags = {
        "top": bool(top[0] <= lam1 <= top[1]),
        "bottom": bool(bot[0] <= lam_n <= bot[1] and bot[0] <= lam_nm1 <= bot[1]),
        "middle": bool(middle <= mid_bound + eps),
        "alignment": bool(ax >= amin and ay >= amin),
    }
    return SpectrumReport(dd, mode, float(lam1), float(lam_nm1), float(lam_n), middle, host_lam,
                          top, bot, float(mid_bound), ax, ay, amin, flags)


def mixing_discrepancy(G: Graph, S: Iterable[int], T: Iterable[int], d: int,
                       lam: float | None = None) -> dict:
    """Both sides of the expander mixing inequality for a d-regular graph."""
    if not G.is_regular(d):
        raise ValueError(f"graph is not {d}-regular")
    s, t = vertex_set(S, G.n), vertex_set(T, G.n)
    if lam is None:
        if G.n <= 300:
            w = full_spectrum_dense(G).eigenvalues
            lam = max(w[1], abs(w[-1]))
        else:
            lam = lambda_expansion(G)
    lhs = abs(edges_between(G, s, t) - d * len(s) * len(t) / G.n)
    rhs = float(lam) * math.sqrt(len(s) * len(t))
    return {"lhs": float(lhs), "rhs": rhs, "holds": bool(lhs <= rhs + 1e-9)}
