"""
matchex/src/theorem_checks.py
─────────────────────────────
Verification harness.  Every check builds what it needs, compares an
`expected` dict against an `observed` dict with the same keys, and
returns a VerificationReport; it never raises.  A check passes exactly
when expected == observed.

Connectivity statements are checked through their homology-vanishing
consequences only (j-connected ⇒ H̃_i = 0 for i <= j).
"""

from __future__ import annotations
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Optional

from src.complex_engine import (
    Complex, domination_complex, euler_characteristic, facets, full_simplex, is_pure, join,
    link, matching_complex, relabel, skeleton,
)
from src.graph_loader import CapacityError, InvalidArgument, complete_bipartite, complete_graph
from src.homology_engine import HomologyProfile, betti_over_rationals, reduced_homology
from src.morse_engine import (
    is_acyclic, kn_complex, kn_schedule, knn_complex, knn_schedule,
    predicted_critical_cell_knn, predicted_critical_cells_kn, run_schedule, summary,
)
from src.settings import (
    BOUND_FORMULA_MAX, DOMINATION_TABLE, JOIN_CASES, KN_CAP, KN_MIN, KNN_CAP, KNN_MIN,
    KNOWN_BOUNDS, MAX_CM_FACES, MAX_DOMINATION_EDGES, SHARPNESS_MIN,
)

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════════════════
#  DATA CLASSES
# ══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class ConnectivityBound:
    n:                  int
    d:                  int
    k:                  int
    r:                  int
    epsilon:            Fraction
    nu:                 Fraction
    shifted_conn_bound: int

    def to_dict(self) -> dict:
        return {
            "n": self.n, "d": self.d, "k": self.k, "r": self.r,
            "epsilon":            str(self.epsilon),
            "nu":                 str(self.nu),
            "shifted_conn_bound": self.shifted_conn_bound,
        }


@dataclass
class VerificationReport:
    theorem:  str
    params:   dict
    expected: dict                = field(default_factory=dict)
    observed: dict                = field(default_factory=dict)
    passed:   bool                = False
    millis:   Optional[float]     = None
    notes:    str                 = ""
    error:    Optional[str]       = None

    def to_dict(self, timing: bool = False) -> dict:
        return {
            "theorem":  self.theorem,
            "params":   self.params,
            "expected": self.expected,
            "observed": self.observed,
            "pass":     self.passed,
            "millis":   round(self.millis, 1) if timing and self.millis is not None else None,
        }

    def sort_key(self) -> tuple:
        return self.theorem, [v for _, v in sorted(self.params.items())]


# ══════════════════════════════════════════════════════════════════════════
#  CONNECTIVITY-BOUND FORMULAS
# ══════════════════════════════════════════════════════════════════════════

def jonsson_epsilon(d: int, r: int) -> Fraction:
    """ε_d(r) = 3r/(d+4) − {1, 2, 3, 4} by the position of r in [d+1, 2d+4]."""
    if d < 2:
        raise InvalidArgument(f"d must be >= 2, got {d}")
    if r == d + 1:
        drop = 1
    elif d + 2 <= r <= d + 3:
        drop = 2
    elif d + 4 <= r <= 2 * d + 3:
        drop = 3
    elif r == 2 * d + 4:
        drop = 4
    else:
        raise InvalidArgument(f"r={r} is outside [{d + 1}, {2 * d + 4}] for d={d}")
    return Fraction(3 * r, d + 4) - drop


def jonsson_nu(n: int, d: int) -> ConnectivityBound:
    """ν_n^d = (d²+3d−1)n / (2(d+4)) − ε_d(r)/2 − 1 with n = (d+4)k + r, d+1 <= r <= 2d+4."""
    if d < 2:
        raise InvalidArgument(f"d must be >= 2, got {d}")
    if n < d + 1:
        raise InvalidArgument(f"n={n} has no decomposition (d+4)k + r with r >= d+1={d + 1}")
    k = (n - (d + 1)) // (d + 4)
    r = n - (d + 4) * k
    eps = jonsson_epsilon(d, r)
    nu  = Fraction((d * d + 3 * d - 1) * n, 2 * (d + 4)) - eps / 2 - 1
    return ConnectivityBound(n=n, d=d, k=k, r=r, epsilon=eps, nu=nu, shifted_conn_bound=math.ceil(nu))


# ══════════════════════════════════════════════════════════════════════════
#  MEMOISED BUILDERS
# ══════════════════════════════════════════════════════════════════════════

_BUILDERS: dict[str, Callable[..., Complex]] = {
    "kn":  kn_complex,
    "knn": knn_complex,
    "dom": domination_complex,
}


@lru_cache(maxsize=None)
def cached_complex(kind: str, *args: int) -> Complex:
    return _BUILDERS[kind](*args)


@lru_cache(maxsize=None)
def cached_homology(kind: str, *args: int) -> HomologyProfile:
    return reduced_homology(cached_complex(kind, *args))


# ══════════════════════════════════════════════════════════════════════════
#  HELPERS
# ══════════════════════════════════════════════════════════════════════════

def _check_range(name: str, value: int, lo: int, hi: Optional[int] = None) -> None:
    if value < lo:
        raise InvalidArgument(f"{name}={value} is below the minimum {lo}")
    if hi is not None and value > hi:
        raise CapacityError(f"{name}={value} exceeds the cap {hi}")


def _betti_dict(H: HomologyProfile) -> dict[str, int]:
    return {str(d): H.betti(d) for d in H.nonzero_dims if H.betti(d)}


def _torsion_dict(H: HomologyProfile) -> dict[str, list[int]]:
    return {str(d): list(H.torsion(d)) for d in H.nonzero_dims if H.torsion(d)}


def _str_keys(counts: dict[int, int]) -> dict[str, int]:
    return {str(k): v for k, v in sorted(counts.items())}


def _cross_check(K: Complex, H: HomologyProfile) -> dict[str, bool]:
    return {
        "euler_agrees":    H.reduced_euler == euler_characteristic(K) - 1,
        "rational_agrees": betti_over_rationals(K) == H.betti_numbers,
    }


def _run(theorem: str, params: dict, body: Callable[[], tuple[dict, dict]], notes: str = "") -> VerificationReport:
    started = time.perf_counter()
    error = None
    try:
        expected, observed = body()
    except (InvalidArgument, CapacityError) as e:
        error = str(e)
        expected, observed = {}, {"error": error}
        logger.warning("%s %s could not run: %s", theorem, params, error)
    millis = (time.perf_counter() - started) * 1000
    passed = error is None and expected == observed
    logger.info("%s %s: %s (%.0f ms)", theorem, params, "pass" if passed else "FAIL", millis)
    return VerificationReport(
        theorem  = theorem,
        params   = params,
        expected = expected,
        observed = observed,
        passed   = passed,
        millis   = millis,
        notes    = notes,
        error    = error,
    )


# ══════════════════════════════════════════════════════════════════════════
#  WEDGE / SPHERE THEOREMS
# ══════════════════════════════════════════════════════════════════════════

def verify_theorem_kn(n: int) -> VerificationReport:
    """M_{n-2}(K_n) ≃ wedge of n-1 spheres of dimension C(n-1,2)-1: Morse route and homology route."""
    def body():
        _check_range("n", n, KN_MIN, KN_CAP)
        K = cached_complex("kn", n)
        t = comb(n - 1, 2) - 1
        M = run_schedule(K, kn_schedule(n))
        S = summary(M)
        H = cached_homology("kn", n)
        expected = {
            "critical_cells":       {str(t): n - 1},
            "matches_closed_form":  True,
            "acyclic":              True,
            "wedge":                {"dim": t, "count": n - 1},
            "betti":                {str(t): n - 1},
            "torsion":              {},
            "rational_agrees":      True,
        }
        observed = {
            "critical_cells":       _str_keys(S.c),
            "matches_closed_form":  M.critical == predicted_critical_cells_kn(n),
            "acyclic":              is_acyclic(K, M).acyclic,
            "wedge":                {"dim": S.single_dim, "count": S.wedge_count},
            "betti":                _betti_dict(H),
            "torsion":              _torsion_dict(H),
            "rational_agrees":      betti_over_rationals(K) == H.betti_numbers,
        }
        return expected, observed

    return _run("kn-wedge", {"n": n}, body)


def verify_theorem_knn(n: int) -> VerificationReport:
    """M_{n-1}(K_{n,n}) ≃ S^{(n-1)²-1}."""
    def body():
        _check_range("n", n, KNN_MIN, KNN_CAP)
        K = cached_complex("knn", n)
        t = (n - 1) ** 2 - 1
        M = run_schedule(K, knn_schedule(n))
        S = summary(M)
        H = cached_homology("knn", n)
        expected = {
            "critical_cells":       {str(t): 1},
            "matches_closed_form":  True,
            "acyclic":              True,
            "betti":                {str(t): 1},
            "torsion":              {},
            "rational_agrees":      True,
        }
        observed = {
            "critical_cells":       _str_keys(S.c),
            "matches_closed_form":  M.critical == frozenset({predicted_critical_cell_knn(n)}),
            "acyclic":              is_acyclic(K, M).acyclic,
            "betti":                _betti_dict(H),
            "torsion":              _torsion_dict(H),
            "rational_agrees":      betti_over_rationals(K) == H.betti_numbers,
        }
        return expected, observed

    return _run("knn-sphere", {"n": n}, body)


def verify_sharpness(n: int) -> VerificationReport:
    """
    ν_n^{n-2} = C(n-1,2) - 1 and, up to the cap, H̃ vanishes below that
    dimension and not at it.  Beyond the cap only the formula is checked.
    """
    def body():
        _check_range("n", n, SHARPNESS_MIN)
        t = comb(n - 1, 2) - 1
        bound = jonsson_nu(n, n - 2)
        expected = {"nu": str(t), "shifted_conn_bound": t}
        observed = {"nu": str(bound.nu), "shifted_conn_bound": bound.shifted_conn_bound}
        if n <= KN_CAP:
            H = cached_homology("kn", n)
            expected |= {"vanishes_below": True, "nonzero_at_bound": True}
            observed |= {
                "vanishes_below":   all(H.group(i).is_zero for i in range(-1, bound.shifted_conn_bound)),
                "nonzero_at_bound": not H.group(bound.shifted_conn_bound).is_zero,
            }
        return expected, observed

    scope = "homology-level necessary condition" if n <= KN_CAP else "formula only"
    return _run("kn-sharpness", {"n": n}, body, notes=scope)


# ══════════════════════════════════════════════════════════════════════════
#  CONNECTIVITY BOUND
# ══════════════════════════════════════════════════════════════════════════

def verify_bound(n: int, d: int) -> VerificationReport:
    """Evaluates ν_n^d; compared against C(n-1,2)-1 when d = n-2, or a tabulated value."""
    def body():
        bound = jonsson_nu(n, d)
        observed = {
            "decomposes":  bound.n == (d + 4) * bound.k + bound.r and d + 1 <= bound.r <= 2 * d + 4,
            "nu":          str(bound.nu),
            "shifted_conn_bound": bound.shifted_conn_bound,
        }
        known = comb(n - 1, 2) - 1 if d == n - 2 else KNOWN_BOUNDS.get((n, d))
        if known is None:
            expected = dict(observed, decomposes=True)
        else:
            expected = {"decomposes": True, "nu": str(known), "shifted_conn_bound": known}
        return expected, observed

    return _run("connectivity-bound", {"n": n, "d": d}, body)


def verify_bound_sweep(n_min: int = SHARPNESS_MIN, n_max: int = BOUND_FORMULA_MAX) -> VerificationReport:
    """ν_n^{n-2} = C(n-1,2) - 1 for every n in [n_min, n_max]."""
    def body():
        _check_range("n_min", n_min, SHARPNESS_MIN)
        mismatches = [
            n for n in range(n_min, n_max + 1)
            if jonsson_nu(n, n - 2).nu != comb(n - 1, 2) - 1
        ]
        return {"mismatches": []}, {"mismatches": mismatches}

    return _run("connectivity-bound-sweep", {"n_min": n_min, "n_max": n_max}, body, notes="formula only")


# ══════════════════════════════════════════════════════════════════════════
#  DOMINATION COMPLEXES
# ══════════════════════════════════════════════════════════════════════════

def verify_domination_table() -> VerificationReport:
    n, gamma = DOMINATION_TABLE["n"], DOMINATION_TABLE["gamma"]

    def body():
        K = cached_complex("dom", n, gamma)
        H = cached_homology("dom", n, gamma)
        expected = {
            "betti":           {str(d): b for d, b in sorted(DOMINATION_TABLE["betti"].items())},
            "torsion":         {},
            "rational_agrees": True,
        }
        observed = {
            "betti":           _betti_dict(H),
            "torsion":         _torsion_dict(H),
            "rational_agrees": betti_over_rationals(K) == H.betti_numbers,
        }
        return expected, observed

    return _run("domination-homology", {"n": n, "gamma": gamma}, body)


def verify_filtration(n: int) -> VerificationReport:
    """
    D_{n,1} is the full simplex, D_{n,n-1} is C(n,2) points, D_{n,2} = M_{n-2}(K_n)
    and D_{n,γ+1} ⊆ D_{n,γ}.  Every layer also gets the rational and Euler
    cross-checks on its integral homology.
    """
    def body():
        _check_range("n", n, 3)
        if comb(n, 2) > MAX_DOMINATION_EDGES:
            raise CapacityError(f"D_{n},γ needs {comb(n, 2)} edges; limit is {MAX_DOMINATION_EDGES}")
        G = complete_graph(n)
        layers = {g: cached_complex("dom", n, g) for g in range(1, n + 1)}
        expected = {
            "d1_is_full_simplex":     True,
            "top_is_isolated_points": [comb(n, 2)],
            "d2_is_matching_complex": True,
            "nested":                 True,
            "layer_cross_checks":     {
                str(g): {"euler_agrees": True, "rational_agrees": True} for g in layers
            },
        }
        observed = {
            "d1_is_full_simplex":     layers[1].face_set == full_simplex(G).face_set,
            "top_is_isolated_points": list(layers[n - 1].f_vector),
            "d2_is_matching_complex": layers[2].face_set == cached_complex("kn", n).face_set,
            "nested":                 all(layers[g + 1].face_set <= layers[g].face_set for g in range(1, n)),
            "layer_cross_checks":     {
                str(g): _cross_check(K, cached_homology("dom", n, g)) for g, K in layers.items()
            },
        }
        return expected, observed

    return _run("domination-filtration", {"n": n}, body)


# ══════════════════════════════════════════════════════════════════════════
#  JOIN IDENTITY
# ══════════════════════════════════════════════════════════════════════════

def chessboard_join(m: int, n: int, r: int) -> Complex:
    """n-fold join of the (r-1)-skeleton of the simplex on the m edges at one b_j, moved onto K_{m,n}."""
    star  = complete_bipartite(m, 1)
    piece = skeleton(full_simplex(star), r - 1)
    K = piece
    for _ in range(n - 1):
        K = join(K, piece)
    # join bit (j-1)*m + (i-1) is {a_i, b_j}, which K_{m,n} indexes as (i-1)*n + (j-1)
    mapping = [(i * n) + j for j in range(n) for i in range(m)]
    return relabel(K, mapping, complete_bipartite(m, n), name=f"join^{n}({piece.name})")


def verify_join_identity(m: int, n: int, r: int) -> VerificationReport:
    def body():
        if not m > r >= n >= 1:
            raise InvalidArgument(f"join identity needs m > r >= n >= 1, got m={m}, n={n}, r={r}")
        lhs = matching_complex(complete_bipartite(m, n), r)
        rhs = chessboard_join(m, n, r)
        return (
            {"equal": True, "f_vector": list(lhs.f_vector)},
            {"equal": lhs.face_set == rhs.face_set, "f_vector": list(rhs.f_vector)},
        )

    return _run("join-identity", {"m": m, "n": n, "r": r}, body)


# ══════════════════════════════════════════════════════════════════════════
#  FACETS / COHEN-MACAULAY PROXIES
# ══════════════════════════════════════════════════════════════════════════

def facet_edge_count_identity(n: int) -> bool:
    """(n-1)(n-c) + cd + (c-1)(n-d) = n²-2n+c+d > (n-1)² for every 1 <= c, d <= n."""
    for c in range(1, n + 1):
        for d in range(1, n + 1):
            lhs = (n - 1) * (n - c) + c * d + (c - 1) * (n - d)
            if lhs != n * n - 2 * n + c + d or lhs <= (n - 1) ** 2:
                return False
    return True


def verify_facet_bounds(n: int) -> VerificationReport:
    """
    Minimum facet sizes of M_{n-2}(K_n) (exactly C(n-1,2), attained by the
    first critical cell) and M_{n-1}(K_{n,n}) (at least (n-1)²), purity of the
    corresponding skeleta, and the edge-count identity behind the bound.
    """
    def body():
        _check_range("n", n, 2, KN_CAP)
        expected: dict = {"counting_identity": True}
        observed: dict = {"counting_identity": facet_edge_count_identity(n)}

        if n >= KN_MIN:
            K  = cached_complex("kn", n)
            t  = comb(n - 1, 2)
            smallest = min(f.bit_count() for f in facets(K))
            expected |= {"kn_min_facet": t, "kn_skeleton_pure": True}
            observed |= {"kn_min_facet": smallest, "kn_skeleton_pure": is_pure(skeleton(K, t - 1))}

        if n <= KNN_CAP:
            K  = cached_complex("knn", n)
            t  = (n - 1) ** 2
            smallest = min(f.bit_count() for f in facets(K))
            expected |= {"knn_min_facet_at_least": True, "knn_skeleton_pure": True}
            observed |= {"knn_min_facet_at_least": smallest >= t, "knn_skeleton_pure": is_pure(skeleton(K, t - 1))}
        return expected, observed

    notes = "" if n <= KNN_CAP else f"K_(n,n) part skipped above n={KNN_CAP}"
    return _run("facet-bounds", {"n": n}, body, notes=notes)


def _links_acyclic_below_top(L: Complex) -> tuple[int, list[int]]:
    """Return (faces checked, failing faces) for the link condition on every face of L."""
    failing = []
    checked = 0
    for sigma in L.iter_faces():
        lk = link(L, sigma)
        H  = reduced_homology(lk)
        top = lk.dim
        if any(not H.group(i).is_zero for i in range(-1, top)):
            failing.append(sigma)
        checked += 1
    return checked, failing


def cm_proxy_check(K: Complex, k: int) -> VerificationReport:
    """
    Homology-level necessary condition for the k-skeleton to be homotopy
    Cohen-Macaulay: the skeleton is pure and every link lk(σ) has H̃_i = 0
    below its top dimension.  Passing is evidence, never proof.
    """
    def body():
        if K.is_void or k > K.dim:
            raise InvalidArgument(f"k={k} exceeds dim {K.dim} of {K.name}")
        L = skeleton(K, k)
        if len(L) > MAX_CM_FACES:
            raise CapacityError(f"{L.name} has {len(L):,} faces; the link scan is capped at {MAX_CM_FACES:,}")
        checked, failing = _links_acyclic_below_top(L)
        observed = {
            "pure":          is_pure(L),
            "faces_checked": checked,
            "failing_links": len(failing),
            "first_failure": K.parent.face_label(failing[0]) if failing else None,
        }
        expected = {"pure": True, "faces_checked": len(L), "failing_links": 0, "first_failure": None}
        return expected, observed

    return _run("cm-proxy", {"complex": K.name, "k": k}, body, notes="homology-level necessary condition")


def homotopical_depth_proxy(K: Complex) -> int:
    """Largest k whose k-skeleton passes cm_proxy_check; an upper bound on homotopical depth (-1 if none)."""
    best = -1
    for k in range(0, (K.dim or 0) + 1):
        if cm_proxy_check(K, k).passed:
            best = k
    return best


def verify_depth(n: int) -> VerificationReport:
    """Exploratory: proxy depth of M_{n-2}(K_n) against its shifted connectivity degree C(n-1,2)-1."""
    def body():
        _check_range("n", n, KN_MIN, KN_CAP)
        K = cached_complex("kn", n)
        t = comb(n - 1, 2) - 1
        return {"proxy_depth": t}, {"proxy_depth": homotopical_depth_proxy(K)}

    return _run("homotopical-depth", {"n": n}, body, notes="exploratory; proxy is an upper bound on depth")


# ══════════════════════════════════════════════════════════════════════════
#  SUITES
# ══════════════════════════════════════════════════════════════════════════

CHECKS: dict[str, Callable[..., VerificationReport]] = {
    "kn":          verify_theorem_kn,
    "knn":         verify_theorem_knn,
    "sharpness":   verify_sharpness,
    "domination":  verify_domination_table,
    "facets":      verify_facet_bounds,
    "filtration":  verify_filtration,
    "join":        verify_join_identity,
    "bound":       verify_bound,
    "bound-sweep": verify_bound_sweep,
    "depth":       verify_depth,
}

Task = tuple  # (check name, *args)


def suite(target: str) -> list[Task]:
    """Default parameter grid of one verification target."""
    grids: dict[str, list[Task]] = {
        "kn":         [("kn", n) for n in range(KN_MIN, KN_CAP + 1)],
        "knn":        [("knn", n) for n in range(KNN_MIN, KNN_CAP + 1)],
        "sharpness":  [("sharpness", n) for n in range(SHARPNESS_MIN, KN_CAP + 1)]
                      + [("sharpness", BOUND_FORMULA_MAX)],
        "domination": [("domination",)],
        "facets":     [("facets", n) for n in range(2, 6)],
        "filtration": [("filtration", n) for n in range(3, KN_CAP + 1)],
        "join":       [("join", *case) for case in JOIN_CASES],
        "bound":      [("bound", n, d) for n, d in sorted(KNOWN_BOUNDS)] + [("bound-sweep",)],
        "depth":      [("depth", n) for n in range(KN_MIN, 5)],
    }
    if target == "all":
        return [task for name, tasks in grids.items() if name != "depth" for task in tasks]
    if target not in grids:
        raise InvalidArgument(f"unknown verification target {target!r}")
    return grids[target]


def run_task(task: Task) -> VerificationReport:
    name, *args = task
    return CHECKS[name](*args)


def run_tasks(tasks: list[Task], jobs: int = 1) -> list[VerificationReport]:
    if jobs > 1 and len(tasks) > 1:
        logger.info("running %d checks on %d workers", len(tasks), jobs)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(run_task, tasks))
    else:
        reports = [run_task(t) for t in tasks]
    return sorted(reports, key=lambda rep: rep.sort_key())


def verify_all(jobs: int = 1) -> list[VerificationReport]:
    """The fixed acceptance suite (everything except the exploratory depth proxy)."""
    return run_tasks(suite("all"), jobs=jobs)


def reports_to_json(reports: list[VerificationReport], timing: bool = False) -> str:
    return json.dumps([r.to_dict(timing) for r in reports], sort_keys=True, indent=2)
