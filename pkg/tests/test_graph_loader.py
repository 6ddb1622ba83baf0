"""
matchex/tests/test_graph_loader.py
──────────────────────────────────
Edge indexing, degrees, domination numbers and the edge-list format.
"""

import pytest

from src.graph_loader import (
    CapacityError, InvalidArgument,
    complete_bipartite, complete_graph, domination_number, face_dim, face_from_indices,
    face_indices, face_size, format_edge_list, graph_from_edge_list, parse_edge_list,
    read_edge_list, read_text, subgraph_degrees, write_edge_list,
)


def test_complete_graph_edges_are_lexicographic():
    G = complete_graph(4)
    assert G.edges == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
    assert G.index(2, 3) == 3
    assert G.index(3, 2) == 3
    assert G.edge(5) == (3, 4)
    assert G.full_face == 0b111111


def test_complete_bipartite_numbering():
    G = complete_bipartite(2, 3)
    assert G.n_vertices == 5
    assert G.n_edges == 6
    # {a_i, b_j} sits at (i-1)*n + (j-1)
    assert G.index(1, 3) == 0
    assert G.index(2, 5) == 5
    assert G.edge_label(1) == "{a1,b2}"
    assert G.bipartition == ((1, 2), (3, 4, 5))


@pytest.mark.parametrize("G", [complete_graph(6), complete_bipartite(3, 4)], ids=["K_6", "K_3,4"])
def test_edge_index_round_trip(G):
    for i in range(G.n_edges):
        assert G.index(*G.edge(i)) == i


def test_face_helpers():
    face = face_from_indices([0, 3, 5])
    assert face == 0b101001
    assert face_indices(face) == [0, 3, 5]
    assert face_size(face) == 3
    assert face_dim(face) == 2
    assert face_dim(0) == -1


def test_face_label():
    G = complete_graph(3)
    assert G.face_label(face_from_indices([0, 2])) == "{{1,2}, {2,3}}"


def test_non_edge_is_rejected():
    G = graph_from_edge_list(3, [(1, 2)])
    with pytest.raises(InvalidArgument):
        G.index(1, 3)


def test_face_beyond_edges_is_rejected():
    G = complete_graph(3)
    with pytest.raises(InvalidArgument):
        G.check_face(1 << 3)


def test_graph_from_edge_list_normalises():
    G = graph_from_edge_list(3, [(2, 1), (3, 2), (1, 2)])
    assert G.edges == ((1, 2), (2, 3))


def test_paw_is_normalised(paw):
    assert paw.edges == ((1, 2), (1, 3), (1, 4), (2, 3))
    e1, e2, e4 = paw.index(1, 2), paw.index(1, 3), paw.index(2, 3)
    deg = subgraph_degrees(paw, face_from_indices([e1, e2, e4]))
    assert tuple(deg) == (2, 2, 2, 0)


@pytest.mark.parametrize("pairs", [[(1, 1)], [(0, 2)], [(1, 4)]])
def test_graph_from_edge_list_rejects_bad_pairs(pairs):
    with pytest.raises(InvalidArgument):
        graph_from_edge_list(3, pairs)


def test_face_width_cap():
    assert complete_graph(16).n_edges == 120
    with pytest.raises(CapacityError):
        complete_graph(17)


def test_subgraph_degrees(path_graph):
    deg = subgraph_degrees(path_graph, path_graph.full_face)
    assert tuple(deg) == (1, 2, 2, 1)
    assert deg[2] == 2
    assert deg.total() == 2 * path_graph.n_edges
    assert tuple(subgraph_degrees(path_graph, 0)) == (0, 0, 0, 0)


DOMINATION_CASES = [
    # (n, edges of H, γ)
    (4, [],                                 4),
    (4, [(1, 2), (1, 3), (1, 4)],           1),
    (4, [(1, 2), (2, 3), (3, 4)],           2),
    (5, [(1, 2), (3, 4)],                   3),
    (6, [(1, 2), (2, 3), (4, 5), (5, 6)],   2),
    (6, [(1, 2), (3, 4), (5, 6)],           3),
    (6, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6)], 2),
]


@pytest.mark.parametrize("n,edges,gamma", DOMINATION_CASES)
def test_domination_number(n, edges, gamma):
    G = complete_graph(n)
    H = face_from_indices(G.index(u, v) for u, v in edges)
    assert domination_number(G, H) == gamma


def test_domination_number_of_complete_graph():
    G = complete_graph(5)
    assert domination_number(G, G.full_face) == 1


def test_domination_number_is_antitone(rng):
    # adding edges can only shrink the smallest dominating set
    G = complete_graph(6)
    for _ in range(50):
        H = int(rng.integers(0, 1 << G.n_edges))
        extra = int(rng.integers(0, 1 << G.n_edges))
        assert domination_number(G, H | extra) <= domination_number(G, H)


def test_parse_edge_list_with_comments():
    text = "# triangle plus pendant\n4 4\n1 2\n2 3\n1 3   # closes the triangle\n\n3 4\n"
    G = parse_edge_list(text, name="paw")
    assert G.n_vertices == 4
    assert G.edges == ((1, 2), (1, 3), (2, 3), (3, 4))
    assert G.name == "paw"


@pytest.mark.parametrize("text", [
    "",
    "4\n1 2\n",
    "3 2\n1 2\n",
    "3 1\n1 x\n",
    "3 1\n1 2 3\n",
])
def test_parse_edge_list_rejects_malformed(text):
    with pytest.raises(InvalidArgument):
        parse_edge_list(text)


def test_edge_list_file(tmp_path):
    G = complete_bipartite(2, 2)
    path = tmp_path / "k22.txt"
    write_edge_list(G, path)
    assert path.read_text() == format_edge_list(G)
    back = read_edge_list(path)
    assert back.edges == G.edges
    assert back.name == "k22"


def test_read_text_rejects_undecodable_bytes(tmp_path):
    path = tmp_path / "latin1.txt"
    path.write_bytes("3 1\n1 2  # café\n".encode("latin-1"))
    with pytest.raises(InvalidArgument, match="not UTF-8"):
        read_text(path)
    with pytest.raises(InvalidArgument):
        read_edge_list(path)
