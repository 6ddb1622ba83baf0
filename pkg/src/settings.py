"""
matchex/src/settings.py
───────────────────────
Tunable limits and shared constants for matchex.
Every cap the engines enforce lives here so the CLI, the
theorem checks and the tests agree on one set of numbers.
"""

# ══════════════════════════════════════════════════════════════════════════
#  FACE / ENUMERATION LIMITS
# ══════════════════════════════════════════════════════════════════════════

# Faces are bitsets over a graph's edge indices.
MAX_FACE_BITS = 128

# Hard stop for any single enumeration (bounded-degree DFS, joins, subset filters).
MAX_FACES = 2_000_000

# Domination complexes are built by filtering all 2^m edge subsets.
MAX_DOMINATION_EDGES = 20

# Links computed by the Cohen-Macaulay proxy (one homology run per face).
MAX_CM_FACES = 5_000


# ══════════════════════════════════════════════════════════════════════════
#  THEOREM CAPS
# ══════════════════════════════════════════════════════════════════════════

KN_MIN, KN_CAP   = 3, 6     # M_{n-2}(K_n)
KNN_MIN, KNN_CAP = 2, 4     # M_{n-1}(K_{n,n})
SHARPNESS_MIN    = 4
BOUND_FORMULA_MAX = 30      # formula-only sharpness checks in `verify all`

DOMINATION_TABLE = {
    "n":        6,
    "gamma":    3,
    "betti":    {4: 115, 5: 24},
}

JOIN_CASES = [(3, 1, 2), (4, 1, 2), (4, 2, 3), (5, 2, 3)]


# ══════════════════════════════════════════════════════════════════════════
#  CLI / ENVIRONMENT
# ══════════════════════════════════════════════════════════════════════════

CACHE_ENV_VAR = "MATCHEX_CACHE"

EXIT_OK        = 0
EXIT_FAILED    = 1
EXIT_USAGE     = 2

OUTPUT_FORMATS = ("json", "csv", "text")

VERIFY_TARGETS = (
    "all", "kn", "knn", "sharpness", "domination",
    "facets", "filtration", "join", "bound", "depth",
)

SERIAL_MAGIC = "# matchex-complex v1"

# Reference values of ν_n^d checked by `verify bound` when no closed form applies.
KNOWN_BOUNDS = {
    (3, 2): 1,
    (4, 2): 2,
    (5, 3): 5,
}
