"""
matchex/src/morse_engine.py
───────────────────────────
Discrete Morse matchings on face posets.

Pipeline
--------
1. element_matching   pair σ∖{x} with σ∪{x} inside a plain face SET
2. run_schedule       apply element matchings label by label to the
                      shrinking residual set (sequence-of-element-matchings)
3. is_acyclic         alternating-path cycle search, layer by layer
4. summary            critical-cell counts and the CW / wedge reading

The explicit schedules for M_{n-2}(K_n) and M_{n-1}(K_{n,n}) are plain
label lists fed to the generic executor, next to the closed forms of
the critical cells and intermediate residuals they are known to leave.
"""

from __future__ import annotations
import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from pathlib import Path
from typing import Iterable, Iterator, Optional

from src.complex_engine import Complex, matching_complex
from src.graph_loader import (
    Face, Graph, InvalidArgument,
    complete_bipartite, complete_graph, face_from_indices, face_indices, read_text,
    subgraph_degrees,
)

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════════════════
#  DATA CLASSES
# ══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class Schedule:
    labels: tuple[int, ...]
    name:   str = ""

    def __post_init__(self):
        if any(x < 0 for x in self.labels):
            raise InvalidArgument(f"schedule labels must be edge indices, got {self.labels}")
        if len(set(self.labels)) != len(self.labels):
            dupes = sorted(x for x, c in Counter(self.labels).items() if c > 1)
            raise InvalidArgument(f"schedule repeats labels {dupes}")

    def __len__(self) -> int:
        return len(self.labels)

    def check_against(self, G: Graph) -> None:
        bad = [x for x in self.labels if x >= G.n_edges]
        if bad:
            raise InvalidArgument(f"labels {bad} are not edge indices of {G.name or 'the graph'}")

    def describe(self, G: Graph) -> list[str]:
        return [G.edge_label(x) for x in self.labels]


@dataclass(frozen=True, eq=False)
class MorseMatching:
    parent:   Complex
    pairs:    tuple[tuple[Face, Face], ...]
    critical: frozenset[Face]

    @cached_property
    def mate(self) -> dict[Face, Face]:
        out: dict[Face, Face] = {}
        for lower, upper in self.pairs:
            out[lower] = upper
            out[upper] = lower
        return out

    def is_partition(self) -> bool:
        """pairs ⊔ critical covers every face of the parent exactly once."""
        seen: list[Face] = [f for pair in self.pairs for f in pair]
        seen.extend(self.critical)
        return len(seen) == len(set(seen)) and set(seen) == set(self.parent.face_set)


@dataclass(frozen=True)
class MorseSummary:
    c:             dict[int, int]
    cw_cells:      dict[int, int]
    empty_paired:  bool
    single_dim:    Optional[int] = None
    wedge_count:   Optional[int] = None
    contractible:  bool          = False

    @property
    def reduced_euler(self) -> int:
        """Σ (-1)^d c_d over raw critical cells, the empty face counted in dimension -1."""
        return sum((-1) ** d * k for d, k in self.c.items())

    @property
    def euler(self) -> int:
        """Σ (-1)^d over the cells of the CW model; equals χ(K)."""
        return sum((-1) ** d * k for d, k in self.cw_cells.items())

    def to_dict(self) -> dict:
        return {
            "critical_by_dim": {str(d): k for d, k in sorted(self.c.items())},
            "cw_cells_by_dim": {str(d): k for d, k in sorted(self.cw_cells.items())},
            "empty_paired":    self.empty_paired,
            "single_dim":      self.single_dim,
            "wedge_count":     self.wedge_count,
            "contractible":    self.contractible,
        }


@dataclass(frozen=True)
class AcyclicityResult:
    acyclic: bool
    cycle:   tuple[tuple[Face, Face], ...] = field(default=())

    def __bool__(self) -> bool:
        return self.acyclic


# ══════════════════════════════════════════════════════════════════════════
#  ELEMENT MATCHINGS / SCHEDULE EXECUTION
# ══════════════════════════════════════════════════════════════════════════

def element_matching(
    faces: Iterable[Face],
    x: int,
    width: Optional[int] = None,
) -> tuple[list[tuple[Face, Face]], set[Face]]:
    """
    M_x restricted to `faces`: every (σ∖{x}, σ∪{x}) with BOTH members in the set.
    Returns (pairs sorted by lower face, residual set).
    """
    if x < 0 or (width is not None and x >= width):
        raise InvalidArgument(f"element {x} outside the {width}-element vertex set")
    S   = faces if isinstance(faces, (set, frozenset)) else set(faces)
    bit = 1 << x
    pairs = sorted((f, f | bit) for f in S if not f & bit and f | bit in S)
    residual = set(S)
    for lower, upper in pairs:
        residual.discard(lower)
        residual.discard(upper)
    return pairs, residual


def iter_schedule(K: Complex, sched: Schedule) -> Iterator[tuple[int, list[tuple[Face, Face]], set[Face]]]:
    """Yield (label, pairs of this step, residual after this step) for every label."""
    sched.check_against(K.parent)
    residual: set[Face] = set(K.face_set)
    for x in sched.labels:
        pairs, residual = element_matching(residual, x, K.parent.n_edges)
        yield x, pairs, residual


def run_schedule(K: Complex, sched: Schedule) -> MorseMatching:
    started = time.perf_counter()
    pairs: list[tuple[Face, Face]] = []
    residual: set[Face] = set(K.face_set)
    for _, step_pairs, residual in iter_schedule(K, sched):
        pairs.extend(step_pairs)
    M = MorseMatching(parent=K, pairs=tuple(pairs), critical=frozenset(residual))
    logger.info(
        "schedule %s on %s: %d pairs, %d critical in %.3fs",
        sched.name or "custom", K.name, len(pairs), len(residual), time.perf_counter() - started,
    )
    return M


# ══════════════════════════════════════════════════════════════════════════
#  ACYCLICITY
# ══════════════════════════════════════════════════════════════════════════

def _validate_matching(K: Complex, M: MorseMatching) -> None:
    seen: set[Face] = set()
    for lower, upper in M.pairs:
        if lower not in K or upper not in K:
            raise InvalidArgument(f"pair ({lower:#x}, {upper:#x}) is not made of faces of {K.name}")
        diff = upper ^ lower
        if upper & lower != lower or diff.bit_count() != 1:
            raise InvalidArgument(f"pair ({lower:#x}, {upper:#x}) is not a covering relation")
        if lower in seen or upper in seen:
            raise InvalidArgument(f"face in pair ({lower:#x}, {upper:#x}) is matched twice")
        seen.add(lower)
        seen.add(upper)


def is_acyclic(K: Complex, M: MorseMatching) -> AcyclicityResult:
    """
    Alternating cycles μ(a_1) ≻ a_1 ≺ μ(a_2) ≻ a_2 ≺ … live inside one pair of
    consecutive dimensions.  Per layer, nodes are matched pairs and there is an
    arc b → b' (b' ≠ b) when lower(b') is a facet of upper(b).  On failure the
    witness lists pairs (a_i, μ(a_i)) with a_i ⊂ μ(a_{i+1}) cyclically.
    """
    _validate_matching(K, M)

    by_lower: dict[Face, Face] = {lower: upper for lower, upper in M.pairs}
    layers: dict[int, list[tuple[Face, Face]]] = {}
    for lower, upper in M.pairs:
        layers.setdefault(upper.bit_count(), []).append((lower, upper))

    for size in sorted(layers):
        nodes = sorted(layers[size])

        def successors(lower: Face, upper: Face) -> list[Face]:
            out, rest = [], upper
            while rest:
                low = rest & -rest
                facet = upper ^ low
                if facet != lower and facet in by_lower:
                    out.append(facet)
                rest ^= low
            return out

        colour: dict[Face, int] = {}     # 1 = on stack, 2 = done
        for root, _ in nodes:
            if root in colour:
                continue
            colour[root] = 1
            path  = [root]
            stack = [iter(successors(root, by_lower[root]))]
            while stack:
                nxt = next(stack[-1], None)
                if nxt is None:
                    colour[path.pop()] = 2
                    stack.pop()
                    continue
                state = colour.get(nxt)
                if state == 1:
                    loop  = path[path.index(nxt):]
                    cycle = tuple((a, by_lower[a]) for a in reversed(loop))
                    logger.debug("alternating cycle of length %d in layer %d", len(cycle), size)
                    return AcyclicityResult(acyclic=False, cycle=cycle)
                if state is None:
                    colour[nxt] = 1
                    path.append(nxt)
                    stack.append(iter(successors(nxt, by_lower[nxt])))
    return AcyclicityResult(acyclic=True)


# ══════════════════════════════════════════════════════════════════════════
#  SUMMARY
# ══════════════════════════════════════════════════════════════════════════

def summary(M: MorseMatching) -> MorseSummary:
    """
    Raw critical counts keep the empty face in dimension -1.  The CW model
    adds one 0-cell when ∅ is paired; when every raw critical cell then sits in
    one dimension d, K is a wedge of that many d-spheres.
    """
    c = Counter(f.bit_count() - 1 for f in M.critical)
    empty_paired = M.parent.includes_empty and 0 not in M.critical

    cw = Counter({d: k for d, k in c.items() if d >= 0})
    if empty_paired:
        cw[0] += 1

    single_dim = wedge_count = None
    contractible = False
    if empty_paired:
        dims = set(c)
        if not dims:
            contractible = True
            wedge_count  = 0
        elif len(dims) == 1:
            single_dim  = dims.pop()
            wedge_count = c[single_dim]

    return MorseSummary(
        c            = dict(sorted(c.items())),
        cw_cells     = dict(sorted(cw.items())),
        empty_paired = empty_paired,
        single_dim   = single_dim,
        wedge_count  = wedge_count,
        contractible = contractible,
    )


# ══════════════════════════════════════════════════════════════════════════
#  EXPLICIT SCHEDULES: M_{n-2}(K_n)
# ══════════════════════════════════════════════════════════════════════════

def kn_schedule(n: int) -> Schedule:
    """Step k = 1..n-1 uses {k,i} for i = k+1..n, in that order."""
    if n < 3:
        raise InvalidArgument(f"K_n schedule needs n >= 3, got {n}")
    G = complete_graph(n)
    labels = tuple(G.index(k, i) for k in range(1, n) for i in range(k + 1, n + 1))
    return Schedule(labels=labels, name=f"kn({n})")


def _kn_f_set(n: int, k: int) -> list[tuple[int, int]]:
    """F_k = {{i,i+1} : i < k} ⊔ {{k,j} : j > k}."""
    return [(i, i + 1) for i in range(1, k)] + [(k, j) for j in range(k + 1, n + 1)]


def predicted_critical_cell_kn(n: int, k: int) -> Face:
    """E(K_n) ∖ F_k, the unique member of C_k."""
    G = complete_graph(n)
    return G.full_face & ~face_from_indices(G.index(u, v) for u, v in _kn_f_set(n, k))


def predicted_critical_cells_kn(n: int) -> frozenset[Face]:
    if n < 3:
        raise InvalidArgument(f"K_n closed form needs n >= 3, got {n}")
    cells = frozenset(predicted_critical_cell_kn(n, k) for k in range(1, n))
    assert all(f.bit_count() == comb(n - 1, 2) for f in cells)
    return cells


def kn_schedule_steps(n: int) -> list[int]:
    """Number of labels consumed after each step k (cumulative), k = 1..n-1."""
    done, out = 0, []
    for k in range(1, n):
        done += n - k
        out.append(done)
    return out


# ── Residual predicates after K_n steps ──────────────────────────────────

def in_b_set_kn(G: Graph, face: Face, k: int) -> bool:
    """
    B_{k,k+1}: {i,i+1} ∉ H for i ∈ [k], deg(1) = n-2, deg(i) = n-3 for
    2 <= i <= k, deg(k+1) < n-2.  (Step 1 reads deg(1) = n-2 and deg(2) < n-2.)
    """
    n   = G.n_vertices
    deg = subgraph_degrees(G, face)
    if any(face >> G.index(i, i + 1) & 1 for i in range(1, k + 1)):
        return False
    if deg[1] != n - 2:
        return False
    if any(deg[i] != n - 3 for i in range(2, k + 1)):
        return False
    return deg[k + 1] < n - 2


def in_c_set_kn(G: Graph, face: Face, k: int) -> bool:
    """C_{k,k+1}: members of A_{k,k} (B_{k-1,k}, or everything for k = 1) with {k,k+1} ∉ H and deg(k+1) = n-2."""
    if k > 1 and not in_b_set_kn(G, face, k - 1):
        return False
    n   = G.n_vertices
    deg = subgraph_degrees(G, face)
    return not face >> G.index(k, k + 1) & 1 and deg[k + 1] == n - 2


def kn_first_label_residual(K: Complex, k: int) -> frozenset[Face]:
    """Predicted residual right after label {k,k+1}: C_1 ⊔ … ⊔ C_{k-1} ⊔ B_{k,k+1} ⊔ C_{k,k+1}."""
    n = K.parent.n_vertices
    cells = {predicted_critical_cell_kn(n, j) for j in range(1, k)}
    cells |= {f for f in K.face_set if in_b_set_kn(K.parent, f, k) or in_c_set_kn(K.parent, f, k)}
    return frozenset(cells)


def kn_step_residual(K: Complex, k: int) -> frozenset[Face]:
    """Predicted residual once steps 1..k have run: C_1 ⊔ … ⊔ C_k ⊔ B_{k,k+1}."""
    n = K.parent.n_vertices
    cells = {predicted_critical_cell_kn(n, j) for j in range(1, k + 1)}
    if k < n - 1:
        cells |= {f for f in K.face_set if in_b_set_kn(K.parent, f, k)}
    return frozenset(cells)


# ══════════════════════════════════════════════════════════════════════════
#  EXPLICIT SCHEDULES: M_{n-1}(K_{n,n})
# ══════════════════════════════════════════════════════════════════════════

def knn_schedule(n: int) -> Schedule:
    """Step k = 1..n-1 uses {a_k,b_1} < … < {a_k,b_n}."""
    if n < 2:
        raise InvalidArgument(f"K_(n,n) schedule needs n >= 2, got {n}")
    G = complete_bipartite(n, n)
    labels = tuple(G.index(k, n + j) for k in range(1, n) for j in range(1, n + 1))
    return Schedule(labels=labels, name=f"knn({n})")


def predicted_critical_cell_knn(n: int) -> Face:
    """{a_i b_j : i ∈ [n-1], j ∈ {2..n}}: a K_{n-1,n-1} plus isolated a_n and b_1."""
    if n < 2:
        raise InvalidArgument(f"K_(n,n) closed form needs n >= 2, got {n}")
    G = complete_bipartite(n, n)
    return face_from_indices(G.index(i, n + j) for i in range(1, n) for j in range(2, n + 1))


def in_h_set_knn(G: Graph, face: Face, k: int) -> bool:
    """H_{k,n}: {a_i,b_1} ∉ H and deg(a_i) = n-1 for i ∈ [k], deg(b_1) < n-k."""
    n   = G.n_vertices // 2
    deg = subgraph_degrees(G, face)
    b1  = n + 1
    for i in range(1, k + 1):
        if face >> G.index(i, b1) & 1 or deg[i] != n - 1:
            return False
    return deg[b1] < n - k


def knn_step_residual(K: Complex, k: int) -> frozenset[Face]:
    return frozenset(f for f in K.face_set if in_h_set_knn(K.parent, f, k))


def knn_first_label_residual(K: Complex) -> frozenset[Face]:
    """
    Residual right after {a_1,b_1}: I_{1,1} ⊔ J_{1,1}, i.e. {a_1,b_1} ∉ H and
    either deg(b_1) = n-1 or (deg(b_1) < n-1 and deg(a_1) = n-1).
    """
    G  = K.parent
    n  = G.n_vertices // 2
    b1 = n + 1
    out = set()
    for f in K.face_set:
        if f >> G.index(1, b1) & 1:
            continue
        deg = subgraph_degrees(G, f)
        if deg[b1] == n - 1 or deg[1] == n - 1:
            out.add(f)
    return frozenset(out)


# ══════════════════════════════════════════════════════════════════════════
#  CONVENIENCE BUILDERS
# ══════════════════════════════════════════════════════════════════════════

def kn_complex(n: int) -> Complex:
    return matching_complex(complete_graph(n), n - 2)


def knn_complex(n: int) -> Complex:
    return matching_complex(complete_bipartite(n, n), n - 1)


# ══════════════════════════════════════════════════════════════════════════
#  TEXT EXPORT / SCHEDULE FILES
# ══════════════════════════════════════════════════════════════════════════

def format_matching(M: MorseMatching) -> str:
    """One "lower_hex upper_hex" per pair, then "# critical" and one hex face per line."""
    lines = [f"{lower:x} {upper:x}" for lower, upper in M.pairs]
    lines.append("# critical")
    lines.extend(f"{f:x}" for f in sorted(M.critical, key=lambda f: (f.bit_count(), f)))
    return "\n".join(lines) + "\n"


def parse_schedule(text: str, G: Graph, name: str = "") -> Schedule:
    """One edge "u v" per line (1-based vertices of G); '#' starts a comment."""
    labels = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        row = raw.split("#", 1)[0].split()
        if not row:
            continue
        if len(row) != 2:
            raise InvalidArgument(f"schedule line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(row[0]), int(row[1])
        except ValueError:
            raise InvalidArgument(f"schedule line {lineno}: vertices must be integers") from None
        labels.append(G.index(u, v))
    return Schedule(labels=tuple(labels), name=name)


def read_schedule(path: str | Path, G: Graph) -> Schedule:
    path = Path(path)
    return parse_schedule(read_text(path), G, name=path.stem)


def critical_labels(M: MorseMatching) -> list[str]:
    G = M.parent.parent
    return [G.face_label(f) for f in sorted(M.critical, key=lambda f: (f.bit_count(), f))]


def face_edges(G: Graph, face: Face) -> list[tuple[int, int]]:
    return [G.edges[i] for i in face_indices(face)]
