"""Symmetric eigenvalues via cyclic Jacobi, the second eigenvalue of
regular graphs, and numeric verification of the mixing bound
|e(S,T) - d|S||T|/n| <= lambda sqrt(|S||T|(1-|S|/n)(1-|T|/n)).

The only floating point in the package lives here; edge counts stay exact
and are converted to floats at the comparison boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import PreconditionError
from .graph import Graph, vertex_mask

MIXING_SLACK = 1e-9
_DOMINANT_REL_TOL = 1e-9


@dataclass
class SpectralSummary:
    eigenvalues: list[float]  # sorted descending
    lam: float | None  # max |mu| over |mu| < d, regular graphs only
    residual: float
    sweeps: int


@dataclass
class MixingCheck:
    lhs: float
    rhs: float
    holds: bool


def adjacency_matrix(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u, v in g.edges():
        a[u, v] = 1.0
        a[v, u] = 1.0
    return a


def regular_degree(g: Graph) -> int | None:
    degs = g.degrees()[: g.n]
    if g.n and bool(np.all(degs == degs[0])):
        return int(degs[0])
    return None


def symmetric_eigenvalues(g: Graph, tol: float = 1e-10, cap: int = 2048, max_sweeps: int = 60) -> SpectralSummary:
    """Full spectrum by cyclic Jacobi rotations; off-diagonal norm <= tol."""
    if g.n > cap:
        raise PreconditionError(f"n={g.n} exceeds the dense eigensolver cap {cap}")
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    a = adjacency_matrix(g)
    evals, evecs, _, sweeps = _kernels.jacobi_eigh(a, tol, max_sweeps)
    order = np.argsort(-evals)
    evals_sorted = evals[order]
    vecs = evecs[:, order]
    residual = 0.0
    if g.n:
        resid_matrix = a @ vecs - vecs * evals_sorted[np.newaxis, :]
        residual = float(np.max(np.linalg.norm(resid_matrix, axis=0)))
    lam = None
    d = regular_degree(g)
    if d is not None:
        lam = _second_eigenvalue(evals_sorted, d)
    return SpectralSummary([float(x) for x in evals_sorted], lam, residual, sweeps)


def _second_eigenvalue(evals, d: int) -> float:
    cut = d * (1.0 - _DOMINANT_REL_TOL) if d > 0 else 0.0
    inside = [abs(float(x)) for x in evals if abs(float(x)) < cut]
    return max(inside, default=0.0)


def ordered_pair_edge_count(g: Graph, s, t) -> int:
    """|{(x, y) in S x T : {x,y} in E}|; overlapping S, T allowed."""
    s = sorted(set(int(v) for v in s))
    t_mask = vertex_mask(g, set(int(v) for v in t))
    rows = np.asarray(s, dtype=np.int64)
    return _kernels.count_edges(g.bits, rows, t_mask)


def mixing_check(g: Graph, s, t, lam: float) -> MixingCheck:
    """Evaluate the mixing inequality for one subset pair (non-strict,
    with a small numeric slack to absorb measure-zero boundary cases)."""
    d = regular_degree(g)
    if d is None:
        raise PreconditionError("mixing_check needs a regular graph")
    s = sorted(set(int(v) for v in s))
    t = sorted(set(int(v) for v in t))
    n = g.n
    e = ordered_pair_edge_count(g, s, t)
    lhs_exact = abs(Fraction(e) - Fraction(d * len(s) * len(t), n))
    lhs = float(lhs_exact)
    frac_s = len(s) / n
    frac_t = len(t) / n
    rhs = lam * math.sqrt(len(s) * len(t) * (1.0 - frac_s) * (1.0 - frac_t))
    return MixingCheck(lhs, rhs, lhs <= rhs + MIXING_SLACK)


def homogeneous_pair_spectral_bound(g: Graph, delta) -> bool:
    """Can a homogeneous pair with both sides of size ceil(delta n) exist?

    False once the mixing bound forces edges between any two such sets
    (d delta > lambda (1 - delta), beyond slack) while the degree bound
    d < delta n rules out complete pairs. True means "cannot rule out".
    """
    delta = Fraction(delta)
    d = regular_degree(g)
    if d is None:
        raise PreconditionError("spectral bound needs a regular graph")
    summary = symmetric_eigenvalues(g)
    lam = summary.lam if summary.lam is not None else 0.0
    mixing_excludes = d * float(delta) > lam * float(1 - delta) + MIXING_SLACK
    degree_excludes = Fraction(d) < delta * g.n
    return not (mixing_excludes and degree_excludes)


def spectral_report(g: Graph, tol: float = 1e-10) -> dict:
    summary = symmetric_eigenvalues(g, tol)
    return {
        "n": g.n,
        "d": regular_degree(g),
        "lambda": summary.lam,
        "residual": summary.residual,
        "sweeps": summary.sweeps,
        "eigenvalues": summary.eigenvalues,
    }
