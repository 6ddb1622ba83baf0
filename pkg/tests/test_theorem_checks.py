"""
matchex/tests/test_theorem_checks.py
────────────────────────────────────
Connectivity-bound formulas and every verification check, including
the failure paths that must come back as reports instead of raising.
"""

from fractions import Fraction
from math import comb

import pytest

import src.theorem_checks as theorem_checks

from src.complex_engine import complex_from_faces, matching_complex
from src.graph_loader import InvalidArgument, complete_bipartite, complete_graph
from src.settings import KNOWN_BOUNDS
from src.theorem_checks import (
    VerificationReport, chessboard_join, cm_proxy_check, facet_edge_count_identity,
    homotopical_depth_proxy, jonsson_epsilon, jonsson_nu, reports_to_json, run_task, run_tasks,
    suite, verify_all, verify_bound, verify_bound_sweep, verify_depth, verify_domination_table,
    verify_facet_bounds, verify_filtration, verify_join_identity, verify_sharpness,
    verify_theorem_kn, verify_theorem_knn,
)

REPORT_KEYS = {"theorem", "params", "expected", "observed", "pass", "millis"}


# ══════════════════════════════════════════════════════════════════════════
#  FORMULAS
# ══════════════════════════════════════════════════════════════════════════

@pytest.mark.parametrize("n,d,nu", sorted((n, d, v) for (n, d), v in KNOWN_BOUNDS.items()))
def test_known_bounds(n, d, nu):
    assert jonsson_nu(n, d).nu == nu


def test_bound_decomposition():
    b = jonsson_nu(5, 3)
    assert (b.k, b.r) == (0, 5)
    assert b.epsilon == Fraction(1, 7)
    assert b.shifted_conn_bound == 5
    b = jonsson_nu(20, 2)
    assert b.n == 6 * b.k + b.r
    assert 3 <= b.r <= 8


@pytest.mark.parametrize("n", range(4, 31))
def test_bound_is_sharp_on_kn(n):
    assert jonsson_nu(n, n - 2).nu == comb(n - 1, 2) - 1


def test_epsilon_cases():
    d = 2
    assert jonsson_epsilon(d, 3) == Fraction(9, 6) - 1
    assert jonsson_epsilon(d, 4) == 0
    assert jonsson_epsilon(d, 6) == 0
    assert jonsson_epsilon(d, 8) == 0
    with pytest.raises(InvalidArgument):
        jonsson_epsilon(d, 9)


@pytest.mark.parametrize("n,d", [(5, 1), (3, 3)])
def test_bound_argument_checks(n, d):
    with pytest.raises(InvalidArgument):
        jonsson_nu(n, d)


def test_bound_to_dict_uses_exact_strings():
    assert jonsson_nu(3, 2).to_dict() == {
        "n": 3, "d": 2, "k": 0, "r": 3,
        "epsilon": "1/2", "nu": "1", "shifted_conn_bound": 1,
    }


def test_counting_identity():
    assert all(facet_edge_count_identity(n) for n in range(1, 12))


# ══════════════════════════════════════════════════════════════════════════
#  WEDGE / SPHERE THEOREMS
# ══════════════════════════════════════════════════════════════════════════

@pytest.mark.parametrize("n", [3, 4, 5, pytest.param(6, marks=pytest.mark.slow)])
def test_kn_wedge(n):
    rep = verify_theorem_kn(n)
    assert rep.passed, rep.observed
    t = comb(n - 1, 2) - 1
    assert rep.observed["betti"] == {str(t): n - 1}
    assert rep.observed["torsion"] == {}


@pytest.mark.parametrize("n", [2, 3, pytest.param(4, marks=pytest.mark.slow)])
def test_knn_sphere(n):
    rep = verify_theorem_knn(n)
    assert rep.passed, rep.observed
    assert rep.observed["critical_cells"] == {str((n - 1) ** 2 - 1): 1}


def test_out_of_range_checks_become_failed_reports():
    too_big = verify_theorem_kn(7)
    assert not too_big.passed
    assert "error" in too_big.observed
    assert too_big.error
    too_small = verify_theorem_knn(1)
    assert not too_small.passed
    assert "below the minimum" in too_small.observed["error"]


@pytest.mark.parametrize("n", [4, 5, pytest.param(6, marks=pytest.mark.slow), 30])
def test_sharpness(n):
    rep = verify_sharpness(n)
    assert rep.passed, rep.observed
    assert ("vanishes_below" in rep.observed) == (n <= 6)


# ══════════════════════════════════════════════════════════════════════════
#  BOUNDS / DOMINATION / JOIN / FACETS
# ══════════════════════════════════════════════════════════════════════════

@pytest.mark.parametrize("n,d", [(3, 2), (4, 2), (5, 3), (7, 5), (11, 3)])
def test_verify_bound(n, d):
    assert verify_bound(n, d).passed


def test_verify_bound_sweep():
    rep = verify_bound_sweep()
    assert rep.passed
    assert rep.observed == {"mismatches": []}
    assert rep.notes == "formula only"


@pytest.mark.slow
def test_domination_table():
    rep = verify_domination_table()
    assert rep.passed, rep.observed
    assert rep.observed["betti"] == {"4": 115, "5": 24}


@pytest.mark.parametrize("n", [3, 4, 5, pytest.param(6, marks=pytest.mark.slow)])
def test_domination_filtration(n):
    rep = verify_filtration(n)
    assert rep.passed, rep.observed
    assert rep.observed["top_is_isolated_points"] == [comb(n, 2)]
    layers = rep.observed["layer_cross_checks"]
    assert sorted(layers, key=int) == [str(g) for g in range(1, n + 1)]
    assert all(layer == {"euler_agrees": True, "rational_agrees": True} for layer in layers.values())


@pytest.mark.parametrize("m,n,r", [(3, 1, 2), (4, 1, 2), (4, 2, 3), (5, 2, 3)])
def test_join_identity(m, n, r):
    rep = verify_join_identity(m, n, r)
    assert rep.passed, rep.observed


def test_chessboard_join_lands_on_the_bipartite_graph():
    J = chessboard_join(3, 2, 2)
    assert J.parent.edges == complete_bipartite(3, 2).edges
    assert J.face_set == matching_complex(complete_bipartite(3, 2), 2).face_set


def test_join_identity_outside_its_range():
    rep = verify_join_identity(3, 3, 2)
    assert not rep.passed
    assert "m > r >= n" in rep.observed["error"]


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_facet_bounds(n):
    rep = verify_facet_bounds(n)
    assert rep.passed, rep.observed
    if n >= 3:
        assert rep.observed["kn_min_facet"] == comb(n - 1, 2)


@pytest.mark.slow
def test_facet_bounds_skip_bipartite_part_above_cap():
    rep = verify_facet_bounds(6)
    assert "knn_min_facet_at_least" not in rep.observed
    assert "skipped" in rep.notes


# ══════════════════════════════════════════════════════════════════════════
#  COHEN-MACAULAY PROXY
# ══════════════════════════════════════════════════════════════════════════

def test_cm_proxy_on_a_circle(square):
    rep = cm_proxy_check(square, 1)
    assert rep.passed
    assert rep.observed["faces_checked"] == 9
    assert homotopical_depth_proxy(square) == 1


def test_cm_proxy_flags_a_disconnected_complex():
    G = complete_graph(4)
    K = complex_from_faces(G, [0, 0b0001, 0b0010, 0b0100, 0b1000, 0b0011, 0b1100], name="two segments")
    rep = cm_proxy_check(K, 1)
    assert not rep.passed
    assert rep.observed["failing_links"] == 1
    assert rep.observed["first_failure"] == "{}"
    assert homotopical_depth_proxy(K) == 0


def test_cm_proxy_rejects_k_above_dimension(square):
    rep = cm_proxy_check(square, 2)
    assert not rep.passed
    assert "exceeds dim" in rep.observed["error"]


def test_depth_on_three_points():
    rep = verify_depth(3)
    assert rep.passed
    assert rep.observed == {"proxy_depth": 0}
    assert rep.notes.startswith("exploratory")


# ══════════════════════════════════════════════════════════════════════════
#  REPORTS / SUITES
# ══════════════════════════════════════════════════════════════════════════

def test_report_dict_has_fixed_keys():
    rep = verify_bound(5, 3)
    assert set(rep.to_dict()) == REPORT_KEYS
    assert rep.to_dict()["millis"] is None
    assert isinstance(rep.to_dict(timing=True)["millis"], float)


def test_report_pass_means_expected_equals_observed():
    rep = VerificationReport(theorem="t", params={}, expected={"a": 1}, observed={"a": 1}, passed=True)
    assert rep.to_dict()["pass"] == (rep.expected == rep.observed)


def test_suite_contents():
    everything = suite("all")
    assert ("kn", 3) in everything
    assert ("domination",) in everything
    assert ("bound-sweep",) in everything
    assert not any(task[0] == "depth" for task in everything)
    assert suite("depth") == [("depth", 3), ("depth", 4)]
    with pytest.raises(InvalidArgument):
        suite("everything")


def test_run_tasks_sorts_reports():
    reports = run_tasks([("bound", 5, 3), ("join", 3, 1, 2), ("bound", 4, 2)])
    assert [(r.theorem, r.params) for r in reports] == [
        ("connectivity-bound", {"n": 4, "d": 2}),
        ("connectivity-bound", {"n": 5, "d": 3}),
        ("join-identity", {"m": 3, "n": 1, "r": 2}),
    ]


def test_run_tasks_in_worker_pool_matches_serial():
    tasks = [("bound", 5, 3), ("bound", 4, 2), ("kn", 3)]
    serial = [r.to_dict() for r in run_tasks(tasks)]
    pooled = [r.to_dict() for r in run_tasks(tasks, jobs=2)]
    assert pooled == serial


def test_verify_all_runs_the_all_suite(monkeypatch):
    small = [("bound", 5, 3), ("kn", 3)]
    monkeypatch.setattr(theorem_checks, "suite", lambda target: small if target == "all" else [])
    reports = verify_all()
    assert [r.theorem for r in reports] == ["connectivity-bound", "kn-wedge"]
    assert all(r.passed for r in reports)


@pytest.mark.slow
def test_verify_all_passes():
    reports = verify_all(jobs=2)
    assert len(reports) == len(suite("all"))
    assert [r.to_dict() for r in reports if not r.passed] == []


def test_run_task_dispatch():
    assert run_task(("bound-sweep", 4, 10)).params == {"n_min": 4, "n_max": 10}


def test_reports_to_json_is_deterministic():
    reports = run_tasks([("bound", 5, 3)])
    assert reports_to_json(reports) == reports_to_json(run_tasks([("bound", 5, 3)]))
    assert '"pass": true' in reports_to_json(reports)
