"""Least squares over the probability simplex.

Solves ``min_w ||A w - b||^2`` subject to ``w >= 0, sum(w) = 1`` with Wolfe's
minimum-norm-point algorithm. Writing ``p_j = A[:, j] - b`` turns the problem
into finding the point of minimum norm in ``conv{p_j}``; each major step adds
the vertex with the most negative directional derivative (a Frank-Wolfe step)
and the minor loop re-optimizes exactly over the affine hull of the active
set, so iterates are feasible by construction and termination is finite.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

MAX_ITER = 10_000
REL_TOL = 1e-12
_DROP = 1e-14


@dataclass(frozen=True)
class SimplexSolution:
    weights: np.ndarray
    objective: float
    gap: float
    iterations: int


def _affine_minimizer(P: np.ndarray) -> np.ndarray:
    """Coefficients (summing to one) of the min-norm point of aff(columns of P)."""
    if P.shape[1] == 1:
        return np.ones(1)
    # x = p0 + Q beta with Q spanning the affine directions; avoids a bordered Gram system
    p0 = P[:, 0]
    Q = P[:, 1:] - p0[:, None]
    beta = np.linalg.lstsq(Q, -p0, rcond=None)[0]
    return np.concatenate([[1.0 - beta.sum()], beta])


def simplex_lstsq(A: np.ndarray, b: np.ndarray, *, max_iter: int = MAX_ITER,
                  rel_tol: float = REL_TOL) -> SimplexSolution:
    """Minimize ``||A w - b||^2`` over the unit simplex.

    The returned ``gap`` is the Frank-Wolfe duality gap at the solution and
    bounds ``objective - min`` from above.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2:
        raise ValueError("A must be a 2-D matrix")
    if b.shape != (A.shape[0],):
        raise ValueError(f"b has shape {b.shape}, expected ({A.shape[0]},)")
    n = A.shape[1]
    if n == 0:
        raise ValueError("need at least one column")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ValueError("A and b must be finite")

    Pts = A - b[:, None]
    scale = max(float(np.max(np.sum(Pts * Pts, axis=0))), np.finfo(float).tiny)
    if n == 1:
        obj = float(Pts[:, 0] @ Pts[:, 0])
        return SimplexSolution(np.ones(1), obj, 0.0, 0)

    norms = np.sum(Pts * Pts, axis=0)
    j0 = int(np.argmin(norms))
    active = [j0]
    lam = np.ones(1)
    x = Pts[:, j0].copy()
    it = 0
    while it < max_iter:
        it += 1
        dots = Pts.T @ x
        j = int(np.argmin(dots))
        xx = float(x @ x)
        if xx - dots[j] <= rel_tol * scale or j in active:
            break
        active.append(j)
        lam = np.append(lam, 0.0)
        while True:
            it += 1
            S = Pts[:, active]
            alpha = _affine_minimizer(S)
            if np.all(alpha > _DROP):
                lam = alpha
                break
            neg = alpha <= _DROP
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(neg, lam / (lam - alpha), np.inf)
            theta = float(min(1.0, np.min(ratios)))
            lam = theta * alpha + (1.0 - theta) * lam
            keep = lam > _DROP
            if not np.any(keep):
                keep[np.argmax(lam)] = True
            active = [a for a, k in zip(active, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
            if it >= max_iter:
                break
        x = Pts[:, active] @ lam

    if it >= max_iter:
        log.warning("simplex_lstsq stopped at the iteration cap (%d)", max_iter)
    w = np.zeros(n)
    w[active] = np.maximum(lam, 0.0)
    w /= w.sum()
    r = A @ w - b
    obj = float(r @ r)
    grad_dots = Pts.T @ r
    gap = max(0.0, 2.0 * float(r @ r - np.min(grad_dots)))
    return SimplexSolution(w, obj, gap, it)
