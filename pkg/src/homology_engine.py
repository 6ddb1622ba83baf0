"""
matchex/src/homology_engine.py
──────────────────────────────
Exact integral reduced homology of a Complex.

Pipeline
--------
1. boundary_matrix     sparse augmented ∂_d : C_d → C_{d-1}, ∂_0 onto ∅
2. smith_normal_form   unit-pivot sparse elimination, then a dense
                       min-pivot reduction on what is left, then a
                       gcd/lcm pass into a divisibility chain
3. reduced_homology    β̃_i = f_i − rank ∂_i − rank ∂_{i+1},
                       torsion of H̃_i = invariant factors > 1 of ∂_{i+1}

betti_over_rationals is a second, independent rank computation
(fraction-free column echelon form) used to cross-check ranks.
"""

from __future__ import annotations
import logging
import time
from dataclasses import dataclass, field
from math import gcd
from typing import Optional, Sequence

import numpy as np

from src.complex_engine import Complex
from src.graph_loader import InvalidArgument

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════════════════
#  DATA CLASSES
# ══════════════════════════════════════════════════════════════════════════

@dataclass
class BoundaryMatrix:
    """Columns are d-faces, rows are (d-1)-faces; column j maps row index → coefficient."""
    d:       int
    n_rows:  int
    columns: list[dict[int, int]]

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.int64)
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                out[i, j] = v
        return out


@dataclass(frozen=True)
class SNFResult:
    diagonal: tuple[int, ...]   # nonzero invariant factors, each dividing the next
    rank:     int

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(x for x in self.diagonal if x > 1)


@dataclass(frozen=True)
class HomologyGroup:
    dim:     int
    rank:    int
    torsion: tuple[int, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def describe(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts)


@dataclass
class HomologyProfile:
    complex_name: str
    groups:       dict[int, HomologyGroup] = field(default_factory=dict)
    millis:       Optional[float]          = None

    def group(self, dim: int) -> HomologyGroup:
        return self.groups.get(dim, HomologyGroup(dim=dim, rank=0))

    def betti(self, dim: int) -> int:
        return self.group(dim).rank

    def torsion(self, dim: int) -> tuple[int, ...]:
        return self.group(dim).torsion

    @property
    def betti_numbers(self) -> dict[int, int]:
        return {d: g.rank for d, g in sorted(self.groups.items())}

    @property
    def nonzero_dims(self) -> list[int]:
        return [d for d, g in sorted(self.groups.items()) if not g.is_zero]

    @property
    def is_acyclic(self) -> bool:
        return not self.nonzero_dims

    @property
    def reduced_euler(self) -> int:
        return sum((-1) ** d * g.rank for d, g in self.groups.items())

    def connectivity(self) -> Optional[int]:
        """Largest c with H̃_i = 0 for all i <= c (homological, not homotopical); None if acyclic."""
        dims = self.nonzero_dims
        return dims[0] - 1 if dims else None

    def to_rows(self) -> list[dict]:
        """One row per dimension carrying nonzero homology."""
        return [
            {
                "complex": self.complex_name,
                "dim":     d,
                "betti":   self.groups[d].rank,
                "torsion": " ".join(str(t) for t in self.groups[d].torsion),
            }
            for d in self.nonzero_dims
        ]

    def describe(self) -> str:
        if self.is_acyclic:
            return f"{self.complex_name}: reduced homology vanishes"
        return "; ".join(f"H~_{d} = {self.groups[d].describe()}" for d in self.nonzero_dims)


# ══════════════════════════════════════════════════════════════════════════
#  BOUNDARY MATRICES
# ══════════════════════════════════════════════════════════════════════════

def boundary_matrix(K: Complex, d: int) -> BoundaryMatrix:
    """
    Augmented ∂_d.  Removing the i-th smallest edge index of a face carries
    sign (-1)^i; ∂_0 sends every vertex to ∅ with coefficient +1.
    """
    if d < 0:
        raise InvalidArgument(f"boundary dimension must be >= 0, got {d}")
    rows = K.faces(d - 1)
    cols = K.faces(d)
    row_of = {f: i for i, f in enumerate(rows)}
    columns: list[dict[int, int]] = []
    for face in cols:
        col: dict[int, int] = {}
        rest, sign = face, 1
        while rest:
            low = rest & -rest
            col[row_of[face ^ low]] = sign
            sign = -sign
            rest ^= low
        columns.append(col)
    return BoundaryMatrix(d=d, n_rows=len(rows), columns=columns)


# ══════════════════════════════════════════════════════════════════════════
#  SMITH NORMAL FORM
# ══════════════════════════════════════════════════════════════════════════

def _as_columns(matrix: BoundaryMatrix | Sequence[Sequence[int]]) -> list[dict[int, int]]:
    if isinstance(matrix, BoundaryMatrix):
        return [dict(c) for c in matrix.columns]
    rows = [[int(x) for x in row] for row in matrix]
    if not rows:
        return []
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InvalidArgument("matrix rows have different lengths")
    return [{i: rows[i][j] for i in range(len(rows)) if rows[i][j]} for j in range(width)]


def _eliminate_unit_pivots(columns: list[dict[int, int]]) -> tuple[int, list[dict[int, int]]]:
    """
    Repeatedly take a ±1 entry, clear its row with column operations and drop
    the row and column.  Each elimination is one invariant factor equal to 1.
    """
    alive = {j: col for j, col in enumerate(columns) if col}
    rows: dict[int, set[int]] = {}
    for j, col in alive.items():
        for r in col:
            rows.setdefault(r, set()).add(j)

    eliminated = 0
    progress = True
    while progress:
        progress = False
        for j in sorted(alive, key=lambda k: len(alive[k])):
            col = alive.get(j)
            if col is None:
                continue
            pivot_row = None
            for r, v in col.items():
                if v in (1, -1) and (pivot_row is None or len(rows[r]) < len(rows[pivot_row])):
                    pivot_row = r
            if pivot_row is None:
                continue

            unit = col[pivot_row]
            for k in list(rows[pivot_row]):
                if k == j:
                    continue
                other  = alive[k]
                factor = other[pivot_row] * unit
                for r, v in col.items():
                    value = other.get(r, 0) - factor * v
                    if value:
                        if r not in other:
                            rows[r].add(k)
                        other[r] = value
                    elif r in other:
                        del other[r]
                        rows[r].discard(k)
                if not other:
                    del alive[k]

            for r in col:
                rows[r].discard(j)
            del alive[j]
            eliminated += 1
            progress = True

    return eliminated, list(alive.values())


def _dense_diagonal(columns: list[dict[int, int]]) -> list[int]:
    """Min-|entry| pivoting on an exact object-dtype array; returns |pivots|."""
    if not columns:
        return []
    row_ids = sorted({r for col in columns for r in col})
    where   = {r: i for i, r in enumerate(row_ids)}
    A = np.zeros((len(row_ids), len(columns)), dtype=object)
    for j, col in enumerate(columns):
        for r, v in col.items():
            A[where[r], j] = v

    m, n = A.shape
    diag: list[int] = []
    for t in range(min(m, n)):
        sub = np.abs(A[t:, t:])
        nz  = np.argwhere(sub != 0)
        if not len(nz):
            break
        i, j = min(nz.tolist(), key=lambda ij: sub[ij[0], ij[1]])
        A[[t, t + i]] = A[[t + i, t]]
        A[:, [t, t + j]] = A[:, [t + j, t]]

        while True:
            p = A[t, t]
            for i in range(t + 1, m):
                if A[i, t]:
                    A[i, t:] -= (A[i, t] // p) * A[t, t:]
            for j in range(t + 1, n):
                if A[t, j]:
                    A[t:, j] -= (A[t, j] // p) * A[t:, t]
            col_rest = [(abs(A[i, t]), i, t) for i in range(t + 1, m) if A[i, t]]
            row_rest = [(abs(A[t, j]), t, j) for j in range(t + 1, n) if A[t, j]]
            if not col_rest and not row_rest:
                break
            _, i, j = min(col_rest + row_rest)
            if j == t:
                A[[t, i]] = A[[i, t]]
            else:
                A[:, [t, j]] = A[:, [j, t]]
        diag.append(abs(int(A[t, t])))
    return diag


def _divisibility_chain(diag: list[int]) -> list[int]:
    d = list(diag)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            if g != d[i]:
                d[i], d[j] = g, d[i] * d[j] // g
    return d


def smith_normal_form(matrix: BoundaryMatrix | Sequence[Sequence[int]]) -> SNFResult:
    """Nonzero invariant factors d_1 | d_2 | … | d_r of an integer matrix."""
    started = time.perf_counter()
    units, rest = _eliminate_unit_pivots(_as_columns(matrix))
    diag = _divisibility_chain([1] * units + _dense_diagonal(rest))
    if isinstance(matrix, BoundaryMatrix):
        logger.debug(
            "SNF of ∂_%d %s: %d unit pivots, %d left dense, rank %d in %.3fs",
            matrix.d, matrix.shape, units, len(rest), len(diag), time.perf_counter() - started,
        )
    return SNFResult(diagonal=tuple(diag), rank=len(diag))


# ══════════════════════════════════════════════════════════════════════════
#  REDUCED HOMOLOGY
# ══════════════════════════════════════════════════════════════════════════

def reduced_homology(K: Complex) -> HomologyProfile:
    """
    H̃_i(K; Z) for -1 <= i <= dim K.  The dimension -1 group appears only
    when it is nonzero, which happens exactly for K = {∅}.
    """
    if K.is_void:
        raise InvalidArgument("reduced homology of the void complex is not defined")
    started = time.perf_counter()
    top = K.dim

    # snf[d] describes ∂_d for 0 <= d <= top; ∂_{top+1} = 0
    snf = {d: smith_normal_form(boundary_matrix(K, d)) for d in range(0, top + 1)}
    def rank(d: int) -> int:
        return snf[d].rank if d in snf else 0

    groups: dict[int, HomologyGroup] = {}
    for i in range(-1, top + 1):
        f_i   = len(K.faces(i))
        betti = f_i - rank(i) - rank(i + 1)
        tors  = snf[i + 1].torsion if i + 1 in snf else ()
        group = HomologyGroup(dim=i, rank=betti, torsion=tors)
        if i == -1 and group.is_zero:
            continue
        groups[i] = group

    millis = (time.perf_counter() - started) * 1000
    profile = HomologyProfile(complex_name=K.name, groups=groups, millis=millis)
    logger.info("homology of %s: %s (%.0f ms)", K.name, profile.describe(), millis)
    return profile


# ══════════════════════════════════════════════════════════════════════════
#  RATIONAL CROSS-CHECK
# ══════════════════════════════════════════════════════════════════════════

def rank_over_rationals(B: BoundaryMatrix) -> int:
    """Fraction-free column reduction keyed by the lowest nonzero row."""
    pivots: dict[int, dict[int, int]] = {}
    for col in B.columns:
        vec = dict(col)
        while vec:
            low = max(vec)
            piv = pivots.get(low)
            if piv is None:
                content = 0
                for v in vec.values():
                    content = gcd(content, v)
                pivots[low] = {r: v // content for r, v in vec.items()}
                break
            a, b = piv[low], vec[low]
            merged = {r: a * v for r, v in vec.items()}
            for r, v in piv.items():
                merged[r] = merged.get(r, 0) - b * v
            vec = {r: v for r, v in merged.items() if v}
    return len(pivots)


def betti_over_rationals(K: Complex) -> dict[int, int]:
    """β̃_i over Q for -1 <= i <= dim K, dimension -1 kept only when nonzero."""
    if K.is_void:
        raise InvalidArgument("reduced homology of the void complex is not defined")
    top   = K.dim
    ranks = {d: rank_over_rationals(boundary_matrix(K, d)) for d in range(0, top + 1)}
    out: dict[int, int] = {}
    for i in range(-1, top + 1):
        b = len(K.faces(i)) - ranks.get(i, 0) - ranks.get(i + 1, 0)
        if i == -1 and b == 0:
            continue
        out[i] = b
    return out
