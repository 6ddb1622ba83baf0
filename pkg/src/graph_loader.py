"""
matchex/src/graph_loader.py
───────────────────────────
Labeled simple graphs with a canonical (lexicographic) edge indexing,
face bitset helpers, degree queries, domination numbers and the
edge-list text format.

Vertices are 1-based.  Bipartite graphs K_{m,n} number a_1..a_m as
1..m and b_1..b_n as m+1..m+n, so lexicographic order on (u, v) is
lexicographic order on (i, j) of {a_i, b_j}.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from src.settings import MAX_FACE_BITS

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════════════════
#  ERRORS
# ══════════════════════════════════════════════════════════════════════════

class InvalidArgument(ValueError):
    """A precondition of an operation does not hold."""


class CapacityError(RuntimeError):
    """An input is larger than the configured desk-scale limits."""


# ══════════════════════════════════════════════════════════════════════════
#  FACE BITSETS
# ══════════════════════════════════════════════════════════════════════════

Face = int


def face_from_indices(indices: Iterable[int]) -> Face:
    face = 0
    for i in indices:
        face |= 1 << i
    return face


def face_indices(face: Face) -> list[int]:
    """Edge indices of a face in increasing order."""
    out = []
    while face:
        low = face & -face
        out.append(low.bit_length() - 1)
        face ^= low
    return out


def face_size(face: Face) -> int:
    return face.bit_count()


def face_dim(face: Face) -> int:
    return face.bit_count() - 1


# ══════════════════════════════════════════════════════════════════════════
#  DATA CLASSES
# ══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class VertexDegreeVector:
    degrees: tuple[int, ...]

    def __iter__(self):
        return iter(self.degrees)

    def __len__(self) -> int:
        return len(self.degrees)

    def __getitem__(self, vertex: int) -> int:
        """Degree of a 1-based vertex."""
        return self.degrees[vertex - 1]

    def total(self) -> int:
        return sum(self.degrees)


@dataclass(frozen=True)
class Graph:
    n_vertices:  int
    edges:       tuple[tuple[int, int], ...]
    labels:      tuple[str, ...]                                   = ()
    bipartition: Optional[tuple[tuple[int, ...], tuple[int, ...]]] = None
    name:        str                                               = ""

    def __post_init__(self):
        if self.n_vertices < 1:
            raise InvalidArgument(f"graph needs at least one vertex, got {self.n_vertices}")
        for u, v in self.edges:
            if not (1 <= u < v <= self.n_vertices):
                raise InvalidArgument(f"edge {{{u},{v}}} is not a normalised pair in [1,{self.n_vertices}]")
        if list(self.edges) != sorted(set(self.edges)):
            raise InvalidArgument("edges must be sorted lexicographically and duplicate-free")
        if len(self.edges) > MAX_FACE_BITS:
            raise CapacityError(
                f"{len(self.edges)} edges exceed the {MAX_FACE_BITS}-bit face width"
            )
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(v) for v in range(1, self.n_vertices + 1)))

    # ── Indexing ──────────────────────────────────────────────────────────

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def endpoints(self) -> np.ndarray:
        """(m, 2) array of 0-based endpoints, row i is edge i."""
        if not self.edges:
            return np.zeros((0, 2), dtype=np.int64)
        return np.asarray(self.edges, dtype=np.int64) - 1

    def edge(self, i: int) -> tuple[int, int]:
        if not 0 <= i < self.n_edges:
            raise InvalidArgument(f"edge index {i} out of range [0,{self.n_edges})")
        return self.edges[i]

    def index(self, u: int, v: int) -> int:
        key = (min(u, v), max(u, v))
        if key not in self.edge_index:
            raise InvalidArgument(f"{{{u},{v}}} is not an edge of {self.name or 'the graph'}")
        return self.edge_index[key]

    @property
    def full_face(self) -> Face:
        return (1 << self.n_edges) - 1

    # ── Labels ────────────────────────────────────────────────────────────

    def edge_label(self, i: int) -> str:
        u, v = self.edge(i)
        return "{" + f"{self.labels[u - 1]},{self.labels[v - 1]}" + "}"

    def face_label(self, face: Face) -> str:
        return "{" + ", ".join(self.edge_label(i) for i in face_indices(face)) + "}"

    def check_face(self, face: Face) -> None:
        if face < 0 or face >> self.n_edges:
            raise InvalidArgument(f"face {face:#x} uses bits beyond the {self.n_edges} edges")


# ══════════════════════════════════════════════════════════════════════════
#  CONSTRUCTORS
# ══════════════════════════════════════════════════════════════════════════

def complete_graph(n: int) -> Graph:
    if n < 1:
        raise InvalidArgument(f"K_n needs n >= 1, got {n}")
    edges = tuple((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1))
    return Graph(n_vertices=n, edges=edges, name=f"K_{n}")


def complete_bipartite(m: int, n: int) -> Graph:
    if m < 1 or n < 1:
        raise InvalidArgument(f"K_(m,n) needs m, n >= 1, got ({m},{n})")
    edges  = tuple((i, m + j) for i in range(1, m + 1) for j in range(1, n + 1))
    labels = tuple(f"a{i}" for i in range(1, m + 1)) + tuple(f"b{j}" for j in range(1, n + 1))
    parts  = (tuple(range(1, m + 1)), tuple(range(m + 1, m + n + 1)))
    return Graph(n_vertices=m + n, edges=edges, labels=labels, bipartition=parts, name=f"K_{m},{n}")


def graph_from_edge_list(n: int, pairs: Iterable[tuple[int, int]], name: str = "") -> Graph:
    """Normalise pairs to u<v, collapse duplicates and sort."""
    if n < 1:
        raise InvalidArgument(f"graph needs at least one vertex, got {n}")
    normalised = set()
    for u, v in pairs:
        u, v = int(u), int(v)
        if not (1 <= u <= n and 1 <= v <= n):
            raise InvalidArgument(f"endpoint of {{{u},{v}}} outside [1,{n}]")
        if u == v:
            raise InvalidArgument(f"loop {{{u},{v}}} is not allowed")
        normalised.add((min(u, v), max(u, v)))
    return Graph(n_vertices=n, edges=tuple(sorted(normalised)), name=name)


# ══════════════════════════════════════════════════════════════════════════
#  DEGREES / DOMINATION
# ══════════════════════════════════════════════════════════════════════════

def subgraph_degrees(G: Graph, H: Face) -> VertexDegreeVector:
    """Degrees of every vertex in the spanning subgraph ([n], H)."""
    G.check_face(H)
    idx = face_indices(H)
    if not idx:
        return VertexDegreeVector((0,) * G.n_vertices)
    counts = np.bincount(G.endpoints[idx].ravel(), minlength=G.n_vertices)
    return VertexDegreeVector(tuple(int(c) for c in counts))


def _closed_neighbourhoods(G: Graph, H: Face) -> list[int]:
    nbhd = [1 << v for v in range(G.n_vertices)]
    for i in face_indices(H):
        u, v = G.edges[i]
        nbhd[u - 1] |= 1 << (v - 1)
        nbhd[v - 1] |= 1 << (u - 1)
    return nbhd


def domination_number(G: Graph, H: Face) -> int:
    """Smallest |S| such that every vertex outside S has a neighbour in S within H."""
    G.check_face(H)
    nbhd   = _closed_neighbourhoods(G, H)
    target = (1 << G.n_vertices) - 1

    # isolated vertices dominate only themselves, so they belong to every S
    forced = [v for v in range(G.n_vertices) if nbhd[v] == 1 << v]
    covered = 0
    for v in forced:
        covered |= nbhd[v]
    free = [v for v in range(G.n_vertices) if nbhd[v] != 1 << v]

    for k in range(0, len(free) + 1):
        for subset in combinations(free, k):
            mask = covered
            for v in subset:
                mask |= nbhd[v]
            if mask == target:
                return len(forced) + k
    return G.n_vertices


# ══════════════════════════════════════════════════════════════════════════
#  EDGE-LIST TEXT FORMAT
# ══════════════════════════════════════════════════════════════════════════

def parse_edge_list(text: str, name: str = "") -> Graph:
    """First line "n m", then m lines "u v" (1-based).  Blank lines and '#' comments are skipped."""
    rows = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    if not rows or len(rows[0]) != 2:
        raise InvalidArgument("edge list must start with a header line 'n m'")
    try:
        n, m  = int(rows[0][0]), int(rows[0][1])
        pairs = [(int(r[0]), int(r[1])) for r in rows[1:]]
    except ValueError as e:
        raise InvalidArgument(f"edge list is not integral: {e}") from None
    if any(len(r) != 2 for r in rows[1:]):
        raise InvalidArgument("every edge line must hold exactly two vertices")
    if len(pairs) != m:
        raise InvalidArgument(f"header announces {m} edges but {len(pairs)} follow")
    return graph_from_edge_list(n, pairs, name=name)


def read_text(path: str | Path) -> str:
    """UTF-8 file contents; undecodable bytes raise InvalidArgument."""
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise InvalidArgument(f"{path} is not UTF-8 text: {e.reason} at byte {e.start}") from None


def read_edge_list(path: str | Path) -> Graph:
    path = Path(path)
    graph = parse_edge_list(read_text(path), name=path.stem)
    logger.info("loaded %s: %d vertices, %d edges", path, graph.n_vertices, graph.n_edges)
    return graph


def format_edge_list(G: Graph) -> str:
    lines = [f"{G.n_vertices} {G.n_edges}"] + [f"{u} {v}" for u, v in G.edges]
    return "\n".join(lines) + "\n"


def write_edge_list(G: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(G), encoding="utf-8")
