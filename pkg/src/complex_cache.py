"""
matchex/src/complex_cache.py
────────────────────────────
Text serialization for complexes and an optional on-disk cache
keyed by the content hash of (construction, graph, parameters).

File layout (deterministic, sorted):

    # matchex-complex v1
    name M_2(K_4)
    graph 4 6
    labels 1 2 3 4
    edges 1-2 1-3 1-4 2-3 2-4 3-4
    empty 1
    fvector 6 15 20 15 3
    dim 0
    1
    2
    ...
"""

from __future__ import annotations
import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Callable, Optional

from src.complex_engine import Complex, complex_from_faces, void_complex
from src.graph_loader import Graph, InvalidArgument, read_text
from src.settings import CACHE_ENV_VAR, SERIAL_MAGIC

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════════════════
#  SERIALIZATION
# ══════════════════════════════════════════════════════════════════════════

def dumps_complex(K: Complex) -> str:
    G = K.parent
    lines = [
        SERIAL_MAGIC,
        f"name {K.name}",
        f"graph {G.n_vertices} {G.n_edges}",
        "labels " + " ".join(G.labels),
        "edges " + " ".join(f"{u}-{v}" for u, v in G.edges),
        f"empty {int(K.includes_empty)}",
        "fvector " + " ".join(str(f) for f in K.f_vector),
    ]
    for d, layer in enumerate(K.faces_by_dim):
        lines.append(f"dim {d}")
        lines.extend(f"{f:x}" for f in layer)
    return "\n".join(lines) + "\n"


def loads_complex(text: str) -> Complex:
    rows = text.splitlines()
    if not rows or rows[0].strip() != SERIAL_MAGIC:
        raise InvalidArgument("not a matchex complex file (bad header)")

    header: dict[str, str] = {}
    body_start = len(rows)
    for i, row in enumerate(rows[1:], start=1):
        if row.startswith("dim "):
            body_start = i
            break
        key, _, value = row.partition(" ")
        header[key] = value

    try:
        n, _m   = (int(x) for x in header["graph"].split())
        labels  = tuple(header.get("labels", "").split())
        edges   = tuple(tuple(int(x) for x in e.split("-")) for e in header["edges"].split())
        empty   = header["empty"].strip() == "1"
        fvector = [int(x) for x in header.get("fvector", "").split()]
    except (KeyError, ValueError) as e:
        raise InvalidArgument(f"malformed complex header: {e}") from None

    parent = Graph(n_vertices=n, edges=edges, labels=labels)
    faces: list[int] = [0] if empty else []
    for row in rows[body_start:]:
        row = row.strip()
        if not row or row.startswith("dim "):
            continue
        try:
            faces.append(int(row, 16))
        except ValueError:
            raise InvalidArgument(f"bad face line {row!r}") from None

    name = header.get("name", "")
    K = complex_from_faces(parent, faces, name=name) if faces else void_complex(parent)
    if list(K.f_vector) != fvector:
        raise InvalidArgument(f"f-vector {list(K.f_vector)} does not match header {fvector}")
    return K


def save_complex(K: Complex, path: str | Path) -> None:
    Path(path).write_text(dumps_complex(K), encoding="utf-8")
    logger.info("saved %s (%d faces) to %s", K.name, len(K), path)


def load_complex(path: str | Path) -> Complex:
    K = loads_complex(read_text(path))
    logger.info("loaded %s (%d faces) from %s", K.name, len(K), path)
    return K


# ══════════════════════════════════════════════════════════════════════════
#  CACHE
# ══════════════════════════════════════════════════════════════════════════

def resolve_cache_dir(flag: Optional[str]) -> Optional[Path]:
    """--cache wins over $MATCHEX_CACHE; neither set means no cache."""
    chosen = flag or os.environ.get(CACHE_ENV_VAR)
    return Path(chosen) if chosen else None


def cache_key(kind: str, graph: Graph, params: dict) -> str:
    payload = json.dumps(
        {"kind": kind, "n": graph.n_vertices, "edges": graph.edges, "params": params},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ComplexCache:
    """Directory of serialized complexes, one file per content hash."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.cplx"

    def get(self, key: str) -> Optional[Complex]:
        path = self._path(key)
        if not path.exists():
            return None
        try:
            return load_complex(path)
        except InvalidArgument as e:
            logger.warning("ignoring corrupt cache entry %s: %s", path.name, e)
            return None

    def put(self, key: str, K: Complex) -> None:
        save_complex(K, self._path(key))

    def get_or_build(self, kind: str, graph: Graph, params: dict, build: Callable[[], Complex]) -> Complex:
        key = cache_key(kind, graph, params)
        cached = self.get(key)
        if cached is not None:
            self.hits += 1
            logger.debug("cache hit %s %s", kind, params)
            return cached
        self.misses += 1
        K = build()
        self.put(key, K)
        return K
