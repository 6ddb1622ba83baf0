"""
matchex/src/complex_engine.py
─────────────────────────────
Builds and queries the simplicial complexes whose vertices are the
edges of a graph: bounded-degree complexes BD^λ(G), r-matching
complexes M_r(G), domination complexes D_{n,γ}, plus skeleton, link,
join, facets, purity and Euler characteristic.

Every complex stores all of its faces, grouped by dimension and
sorted by bitset value.
"""

from __future__ import annotations
import logging
import time
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

from src.graph_loader import (
    CapacityError, Face, Graph, InvalidArgument,
    complete_graph, domination_number, face_indices,
)
from src.settings import MAX_DOMINATION_EDGES, MAX_FACES

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════════════════
#  DATA CLASSES
# ══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class DegreeBoundVector:
    bounds: tuple[int, ...]

    def __post_init__(self):
        if any(b < 0 for b in self.bounds):
            raise InvalidArgument(f"degree bounds must be non-negative, got {self.bounds}")

    @classmethod
    def uniform(cls, n: int, r: int) -> "DegreeBoundVector":
        return cls((r,) * n)


@dataclass(frozen=True, eq=False)
class Complex:
    parent:         Graph
    faces_by_dim:   tuple[tuple[Face, ...], ...]
    includes_empty: bool = True
    name:           str  = ""

    @cached_property
    def face_set(self) -> frozenset[Face]:
        faces = {f for layer in self.faces_by_dim for f in layer}
        if self.includes_empty:
            faces.add(0)
        return frozenset(faces)

    def __contains__(self, face: Face) -> bool:
        return face in self.face_set

    def __len__(self) -> int:
        return len(self.face_set)

    @property
    def is_void(self) -> bool:
        return not self.includes_empty

    @property
    def dim(self) -> Optional[int]:
        """Top dimension; -1 for {∅}, None for the void complex."""
        if self.is_void:
            return None
        return len(self.faces_by_dim) - 1

    @property
    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self.faces_by_dim)

    def faces(self, dim: int) -> tuple[Face, ...]:
        if dim == -1:
            return (0,) if self.includes_empty else ()
        if 0 <= dim < len(self.faces_by_dim):
            return self.faces_by_dim[dim]
        return ()

    def iter_faces(self, include_empty: bool = True) -> Iterator[Face]:
        """All faces, by increasing dimension then bitset value."""
        if include_empty and self.includes_empty:
            yield 0
        for layer in self.faces_by_dim:
            yield from layer


@dataclass(frozen=True)
class ComplexStats:
    f_vector:   tuple[int, ...]
    euler:      int
    dim:        Optional[int]
    facet_dims: tuple[int, ...]
    is_pure:    bool

    def to_dict(self) -> dict:
        return {
            "f_vector":   list(self.f_vector),
            "euler":      self.euler,
            "dim":        self.dim,
            "facet_dims": list(self.facet_dims),
            "is_pure":    self.is_pure,
        }


# ══════════════════════════════════════════════════════════════════════════
#  ASSEMBLY HELPERS
# ══════════════════════════════════════════════════════════════════════════

def _assemble(parent: Graph, faces: Iterable[Face], includes_empty: bool, name: str) -> Complex:
    layers: dict[int, set[Face]] = {}
    for f in faces:
        if f:
            layers.setdefault(f.bit_count() - 1, set()).add(f)
    top = max(layers, default=-1)
    by_dim = tuple(tuple(sorted(layers.get(d, ()))) for d in range(top + 1))
    return Complex(parent=parent, faces_by_dim=by_dim, includes_empty=includes_empty, name=name)


def _check_budget(count: int, what: str) -> None:
    if count > MAX_FACES:
        raise CapacityError(f"{what} exceeds {MAX_FACES:,} faces")


def is_downward_closed(K: Complex) -> bool:
    faces = K.face_set
    if K.faces_by_dim and 0 not in faces:
        return False
    for layer in K.faces_by_dim[1:]:
        for f in layer:
            rest = f
            while rest:
                low = rest & -rest
                if f ^ low not in faces:
                    return False
                rest ^= low
    return True


def complex_from_faces(parent: Graph, faces: Iterable[Face], name: str = "", check: bool = True) -> Complex:
    """Wrap an explicit face list; an empty list gives the void complex."""
    faces = list(faces)
    for f in faces:
        parent.check_face(f)
    K = _assemble(parent, faces, includes_empty=(0 in faces), name=name)
    if check and not is_downward_closed(K):
        raise InvalidArgument(f"faces of {name or 'complex'} are not closed under subsets")
    return K


def empty_complex(parent: Graph) -> Complex:
    """{∅}: the join identity."""
    return Complex(parent=parent, faces_by_dim=(), includes_empty=True, name="{∅}")


def void_complex(parent: Graph) -> Complex:
    return Complex(parent=parent, faces_by_dim=(), includes_empty=False, name="void")


# ══════════════════════════════════════════════════════════════════════════
#  CONSTRUCTIONS
# ══════════════════════════════════════════════════════════════════════════

def bounded_degree_complex(
    G: Graph,
    bounds: DegreeBoundVector | Sequence[int],
    name: str = "",
) -> Complex:
    """Faces H ⊆ E(G) with deg_H(i) <= λ_i, by DFS adding edges in increasing index."""
    if not isinstance(bounds, DegreeBoundVector):
        bounds = DegreeBoundVector(tuple(int(b) for b in bounds))
    lam = bounds.bounds
    if len(lam) != G.n_vertices:
        raise InvalidArgument(f"λ has {len(lam)} entries but the graph has {G.n_vertices} vertices")

    started = time.perf_counter()
    ends    = [(u - 1, v - 1) for u, v in G.edges]
    deg     = [0] * G.n_vertices
    faces: list[Face] = []

    def extend(face: Face, start: int) -> None:
        faces.append(face)
        if len(faces) > MAX_FACES:
            raise CapacityError(f"BD^λ({G.name}) exceeds {MAX_FACES:,} faces")
        for i in range(start, len(ends)):
            u, v = ends[i]
            if deg[u] < lam[u] and deg[v] < lam[v]:
                deg[u] += 1
                deg[v] += 1
                extend(face | (1 << i), i + 1)
                deg[u] -= 1
                deg[v] -= 1

    extend(0, 0)
    K = _assemble(G, faces, includes_empty=True, name=name or f"BD^{list(lam)}({G.name})")
    logger.info("built %s: %d faces in %.3fs", K.name, len(faces), time.perf_counter() - started)
    return K


def matching_complex(G: Graph, r: int) -> Complex:
    if r < 1:
        raise InvalidArgument(f"r must be >= 1, got {r}")
    return bounded_degree_complex(G, DegreeBoundVector.uniform(G.n_vertices, r), name=f"M_{r}({G.name})")


def full_simplex(G: Graph) -> Complex:
    """The simplex on every edge of G."""
    _check_budget(1 << G.n_edges, f"simplex on {G.n_edges} vertices")
    return _assemble(G, range(1 << G.n_edges), includes_empty=True, name=f"Δ({G.name})")


def domination_complex(n: int, gamma: int) -> Complex:
    """D_{n,γ}: edge sets of K_n whose graph has domination number >= γ."""
    if not 1 <= gamma <= n:
        raise InvalidArgument(f"need 1 <= γ <= n, got n={n}, γ={gamma}")
    G = complete_graph(n)
    if G.n_edges > MAX_DOMINATION_EDGES:
        raise CapacityError(
            f"D_{n},{gamma} filters 2^{G.n_edges} subsets; limit is {MAX_DOMINATION_EDGES} edges"
        )
    started = time.perf_counter()
    if gamma == 1:
        faces: Iterable[Face] = range(1 << G.n_edges)
    else:
        faces = [H for H in range(1 << G.n_edges) if domination_number(G, H) >= gamma]
    K = _assemble(G, faces, includes_empty=True, name=f"D_{n},{gamma}")
    logger.info("built %s: %d faces in %.3fs", K.name, len(K), time.perf_counter() - started)
    return K


def skeleton(K: Complex, s: int) -> Complex:
    if s < -1:
        raise InvalidArgument(f"skeleton dimension must be >= -1, got {s}")
    if K.is_void:
        return K
    return Complex(
        parent         = K.parent,
        faces_by_dim   = K.faces_by_dim[: s + 1],
        includes_empty = True,
        name           = f"{K.name}^({s})",
    )


def link(K: Complex, sigma: Face) -> Complex:
    """lk(σ) = {τ : τ ∩ σ = ∅, τ ∪ σ ∈ K}."""
    if sigma not in K:
        raise InvalidArgument(f"face {sigma:#x} is not in {K.name or 'the complex'}")
    faces = (f ^ sigma for f in K.iter_faces() if f & sigma == sigma)
    return _assemble(K.parent, faces, includes_empty=True, name=f"lk({K.parent.face_label(sigma)})")


def disjoint_union_graph(G1: Graph, G2: Graph) -> Graph:
    """G1 ⊔ G2 with G2's vertices shifted past G1's; edge i of G2 becomes edge m1 + i."""
    shift  = G1.n_vertices
    edges  = G1.edges + tuple((u + shift, v + shift) for u, v in G2.edges)
    taken  = set(G1.labels)
    labels = G1.labels + tuple(lbl + "'" if lbl in taken else lbl for lbl in G2.labels)
    return Graph(
        n_vertices = G1.n_vertices + G2.n_vertices,
        edges      = edges,
        labels     = labels,
        name       = f"{G1.name}+{G2.name}",
    )


def join(K1: Complex, K2: Complex) -> Complex:
    """K1 * K2 on the disjoint union of the parents; K2's bits are offset by |E(K1.parent)|."""
    parent = disjoint_union_graph(K1.parent, K2.parent)
    if K1.is_void or K2.is_void:
        return void_complex(parent)
    _check_budget(len(K1) * len(K2), f"join of {K1.name} and {K2.name}")
    shift = K1.parent.n_edges
    left  = list(K1.iter_faces())
    faces = [a | (b << shift) for b in K2.iter_faces() for a in left]
    return _assemble(parent, faces, includes_empty=True, name=f"{K1.name}*{K2.name}")


def relabel(K: Complex, mapping: Sequence[int], parent: Graph, name: str = "") -> Complex:
    """Move K onto `parent`, sending vertex (edge index) i to mapping[i]."""
    if len(mapping) != K.parent.n_edges:
        raise InvalidArgument(f"mapping covers {len(mapping)} of {K.parent.n_edges} vertices")
    if len(set(mapping)) != len(mapping) or any(not 0 <= j < parent.n_edges for j in mapping):
        raise InvalidArgument("mapping must be injective into the target edge indices")
    faces = []
    for f in K.iter_faces():
        g = 0
        for i in face_indices(f):
            g |= 1 << mapping[i]
        faces.append(g)
    return _assemble(parent, faces, includes_empty=K.includes_empty, name=name or K.name)


# ══════════════════════════════════════════════════════════════════════════
#  QUERIES
# ══════════════════════════════════════════════════════════════════════════

def facets(K: Complex) -> list[Face]:
    """Inclusion-maximal faces, by dimension then bitset value."""
    if K.is_void:
        return []
    covered: set[Face] = set()
    for layer in K.faces_by_dim:
        for g in layer:
            rest = g
            while rest:
                low = rest & -rest
                covered.add(g ^ low)
                rest ^= low
    return [f for f in K.iter_faces() if f not in covered]


def euler_characteristic(K: Complex) -> int:
    """Σ_d (-1)^d f_d with the empty face excluded."""
    return sum((-1) ** d * f for d, f in enumerate(K.f_vector))


def stats(K: Complex) -> ComplexStats:
    dims = tuple(sorted(f.bit_count() - 1 for f in facets(K)))
    return ComplexStats(
        f_vector   = K.f_vector,
        euler      = euler_characteristic(K),
        dim        = K.dim,
        facet_dims = dims,
        is_pure    = len(set(dims)) <= 1,
    )


def is_pure(K: Complex) -> bool:
    return stats(K).is_pure
