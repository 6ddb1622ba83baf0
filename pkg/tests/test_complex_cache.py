"""
matchex/tests/test_complex_cache.py
───────────────────────────────────
Complex text format and the content-hash cache directory.
"""

import pytest

from src.complex_cache import (
    ComplexCache, cache_key, dumps_complex, load_complex, loads_complex,
    resolve_cache_dir, save_complex,
)
from src.complex_engine import empty_complex, matching_complex
from src.graph_loader import InvalidArgument, complete_bipartite, complete_graph
from src.settings import CACHE_ENV_VAR, SERIAL_MAGIC


def test_dump_layout():
    K = matching_complex(complete_graph(3), 1)
    text = dumps_complex(K)
    lines = text.splitlines()
    assert lines[0] == SERIAL_MAGIC
    assert "name M_1(K_3)" in lines
    assert "graph 3 3" in lines
    assert "edges 1-2 1-3 2-3" in lines
    assert "fvector 3" in lines
    assert lines[-4:] == ["dim 0", "1", "2", "4"]


def test_load_restores_faces_and_labels(tmp_path):
    K = matching_complex(complete_bipartite(2, 3), 2)
    path = tmp_path / "k23.cplx"
    save_complex(K, path)
    back = load_complex(path)
    assert back.face_set == K.face_set
    assert back.parent.labels == K.parent.labels
    assert back.name == K.name


def test_load_keeps_the_empty_complex():
    back = loads_complex(dumps_complex(empty_complex(complete_graph(3))))
    assert back.dim == -1


@pytest.mark.parametrize("mutate", [
    lambda t: t.replace(SERIAL_MAGIC, "# something else"),
    lambda t: t.replace("fvector 3", "fvector 4"),
    lambda t: t.replace("\n4\n", "\nzz\n"),
    lambda t: "\n".join(l for l in t.splitlines() if not l.startswith("edges")),
])
def test_load_rejects_damaged_files(mutate):
    text = dumps_complex(matching_complex(complete_graph(3), 1))
    with pytest.raises(InvalidArgument):
        loads_complex(mutate(text))


def test_cache_key_depends_on_parameters():
    G = complete_graph(4)
    assert cache_key("bounded_degree", G, {"r": 1}) != cache_key("bounded_degree", G, {"r": 2})
    assert cache_key("bounded_degree", G, {"r": 1}) == cache_key("bounded_degree", complete_graph(4), {"r": 1})


def test_cache_hits_after_first_build(tmp_path):
    cache = ComplexCache(tmp_path / "cache")
    G = complete_graph(4)
    calls = []

    def build():
        calls.append(1)
        return matching_complex(G, 2)

    first  = cache.get_or_build("bounded_degree", G, {"r": 2}, build)
    second = cache.get_or_build("bounded_degree", G, {"r": 2}, build)
    assert len(calls) == 1
    assert (cache.hits, cache.misses) == (1, 1)
    assert second.face_set == first.face_set


def test_corrupt_cache_entry_is_rebuilt(tmp_path):
    cache = ComplexCache(tmp_path)
    G = complete_graph(3)
    key = cache_key("bounded_degree", G, {"r": 1})
    (tmp_path / f"{key}.cplx").write_text("garbage\n")
    K = cache.get_or_build("bounded_degree", G, {"r": 1}, lambda: matching_complex(G, 1))
    assert K.f_vector == (3,)
    assert cache.misses == 1


def test_resolve_cache_dir(monkeypatch, tmp_path):
    monkeypatch.delenv(CACHE_ENV_VAR, raising=False)
    assert resolve_cache_dir(None) is None
    monkeypatch.setenv(CACHE_ENV_VAR, str(tmp_path / "env"))
    assert resolve_cache_dir(None) == tmp_path / "env"
    assert resolve_cache_dir(str(tmp_path / "flag")) == tmp_path / "flag"
