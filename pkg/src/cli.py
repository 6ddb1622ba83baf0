"""
matchex/src/cli.py
──────────────────
Command-line front end.  Parses argv into a RunConfig, resolves the
graph and complex, runs the requested pipeline and writes one report.

Commands
--------
  build       construct a complex, print its statistics (--save to keep it)
  homology    reduced integral homology of a complex
  morse run   execute a schedule, check acyclicity, summarise critical cells
  verify      run a verification target (all | kn | knn | sharpness | …)
  domination  statistics and homology of D_{n,γ}
  bound       evaluate the connectivity bound ν_n^d

Exit codes: 0 ok, 1 verification failed, 2 usage / input error.
"""

from __future__ import annotations
import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from rapidfuzz import fuzz, process as fuzz_process

from src.complex_cache import ComplexCache, load_complex, resolve_cache_dir, save_complex
from src.complex_engine import (
    Complex, DegreeBoundVector, bounded_degree_complex, domination_complex, matching_complex, stats,
)
from src.graph_loader import (
    CapacityError, Graph, InvalidArgument, complete_bipartite, complete_graph, read_edge_list,
)
from src.homology_engine import reduced_homology
from src.morse_engine import (
    Schedule, critical_labels, format_matching, is_acyclic, kn_schedule, knn_schedule,
    read_schedule, run_schedule, summary,
)
from src.report_generator import emit_notes, emit_profile, emit_record, emit_report
from src.settings import EXIT_FAILED, EXIT_OK, EXIT_USAGE, OUTPUT_FORMATS, VERIFY_TARGETS
from src.theorem_checks import jonsson_nu, run_tasks, suite, verify_all

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════════════════
#  RUN CONFIG
# ══════════════════════════════════════════════════════════════════════════

@dataclass
class RunConfig:
    command:    str
    graph:      Optional[str]             = None    # "kn", "knn" or an edge-list path
    n:          Optional[int]             = None
    m:          Optional[int]             = None
    d:          Optional[int]             = None
    r:          Optional[int]             = None
    lam:        Optional[tuple[int, ...]] = None
    gamma:      Optional[int]             = None
    domination: Optional[tuple[int, int]] = None
    load:       Optional[str]             = None
    save:       Optional[str]             = None
    schedule:   Optional[str]             = None
    matching:   Optional[str]             = None
    target:     Optional[str]             = None
    fmt:        str                       = "json"
    out:        Optional[str]             = None
    cache:      Optional[str]             = None
    jobs:       int                       = 1
    timing:     bool                      = False
    verbose:    bool                      = False

    def validate(self) -> None:
        sources = [self.graph is not None, self.domination is not None, self.load is not None]
        if self.command in ("build", "homology", "morse") and sum(sources) != 1:
            raise InvalidArgument("give exactly one of --graph, --domination, --load")
        if self.r is not None and self.lam is not None:
            raise InvalidArgument("--r and --lambda are mutually exclusive")
        if self.domination is not None and (self.r is not None or self.lam is not None):
            raise InvalidArgument("--domination takes no --r / --lambda")
        if self.jobs < 1:
            raise InvalidArgument(f"--jobs must be >= 1, got {self.jobs}")


def _parse_lambda(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--lambda expects comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--m", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--r", type=int)
    common.add_argument("--lambda", dest="lam", type=_parse_lambda, metavar="L1,L2,…")
    common.add_argument("--gamma", type=int)
    common.add_argument("--graph", metavar="kn|knn|FILE")
    common.add_argument("--domination", nargs=2, type=int, metavar=("N", "GAMMA"))
    common.add_argument("--load", metavar="FILE")
    common.add_argument("--save", metavar="FILE")
    common.add_argument("--format", dest="fmt", choices=OUTPUT_FORMATS, default="json")
    common.add_argument("--out", metavar="FILE")
    common.add_argument("--cache", metavar="DIR")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--timing", action="store_true")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="matchex", description="matching complexes, Morse schedules, homology")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common])
    sub.add_parser("homology", parents=[common])
    morse = sub.add_parser("morse", parents=[common])
    morse.add_argument("action", choices=("run",))
    morse.add_argument("--schedule", required=True, metavar="kn|knn|FILE")
    morse.add_argument("--matching", metavar="FILE", help="write the matching export here")
    verify = sub.add_parser("verify", parents=[common])
    verify.add_argument("target")
    sub.add_parser("domination", parents=[common])
    sub.add_parser("bound", parents=[common])
    return parser


def parse_config(argv: Sequence[str]) -> RunConfig:
    ns = build_parser().parse_args(list(argv))
    cfg = RunConfig(
        command    = ns.command,
        graph      = ns.graph,
        n          = ns.n,
        m          = ns.m,
        d          = ns.d,
        r          = ns.r,
        lam        = ns.lam,
        gamma      = ns.gamma,
        domination = tuple(ns.domination) if ns.domination else None,
        load       = ns.load,
        save       = ns.save,
        schedule   = getattr(ns, "schedule", None),
        matching   = getattr(ns, "matching", None),
        target     = getattr(ns, "target", None),
        fmt        = ns.fmt,
        out        = ns.out,
        cache      = ns.cache,
        jobs       = ns.jobs,
        timing     = ns.timing,
        verbose    = ns.verbose,
    )
    cfg.validate()
    return cfg


# ══════════════════════════════════════════════════════════════════════════
#  GRAPH / COMPLEX RESOLUTION
# ══════════════════════════════════════════════════════════════════════════

def resolve_graph(cfg: RunConfig) -> Graph:
    if cfg.graph == "kn":
        if cfg.n is None:
            raise InvalidArgument("--graph kn needs --n")
        return complete_graph(cfg.n)
    if cfg.graph == "knn":
        if cfg.n is None:
            raise InvalidArgument("--graph knn needs --n (and optionally --m)")
        return complete_bipartite(cfg.m if cfg.m is not None else cfg.n, cfg.n)
    return read_edge_list(cfg.graph)


def _default_r(cfg: RunConfig, G: Graph) -> int:
    """r when none is given: n-2 for K_n, n-1 for K_{n,n}."""
    if cfg.graph == "kn":
        return G.n_vertices - 2
    if cfg.graph == "knn" and (cfg.m is None or cfg.m == cfg.n):
        return cfg.n - 1
    raise InvalidArgument("give --r or --lambda for this graph")


def resolve_complex(cfg: RunConfig, cache: Optional[ComplexCache] = None) -> Complex:
    if cfg.load:
        return load_complex(cfg.load)

    if cfg.domination:
        n, gamma = cfg.domination
        build = lambda: domination_complex(n, gamma)
        if cache is None:
            return build()
        return cache.get_or_build("domination", complete_graph(n), {"gamma": gamma}, build)

    G = resolve_graph(cfg)
    if cfg.lam is not None:
        bounds = DegreeBoundVector(cfg.lam)
        build  = lambda: bounded_degree_complex(G, bounds)
        params = {"lambda": list(cfg.lam)}
    else:
        r = cfg.r if cfg.r is not None else _default_r(cfg, G)
        build  = lambda: matching_complex(G, r)
        params = {"r": r}
    if cache is None:
        return build()
    return cache.get_or_build("bounded_degree", G, params, build)


def resolve_schedule(cfg: RunConfig, K: Complex) -> Schedule:
    G = K.parent
    if cfg.schedule == "kn":
        sched = kn_schedule(G.n_vertices)
        if G.edges != complete_graph(G.n_vertices).edges:
            raise InvalidArgument("--schedule kn needs a complete graph K_n")
        return sched
    if cfg.schedule == "knn":
        half = G.n_vertices // 2
        if G.n_vertices % 2 or G.edges != complete_bipartite(half, half).edges:
            raise InvalidArgument("--schedule knn needs a complete bipartite graph K_(n,n)")
        return knn_schedule(half)
    return read_schedule(cfg.schedule, G)


# ══════════════════════════════════════════════════════════════════════════
#  COMMANDS
# ══════════════════════════════════════════════════════════════════════════

def _suggest_target(target: str) -> str:
    match = fuzz_process.extractOne(target, VERIFY_TARGETS, scorer=fuzz.WRatio)
    if match and match[1] >= 60:
        return f"; did you mean {match[0]!r}?"
    return ""


def _verify_tasks(cfg: RunConfig) -> list[tuple]:
    target = cfg.target
    if target not in VERIFY_TARGETS:
        raise InvalidArgument(f"unknown verification target {target!r}{_suggest_target(target)}")
    if target == "join" and None not in (cfg.m, cfg.n, cfg.r):
        return [("join", cfg.m, cfg.n, cfg.r)]
    if target == "bound" and None not in (cfg.n, cfg.d):
        return [("bound", cfg.n, cfg.d)]
    if target in ("kn", "knn", "sharpness", "facets", "filtration", "depth") and cfg.n is not None:
        return [(target, cfg.n)]
    return suite(target)


def cmd_verify(cfg: RunConfig) -> tuple[bytes, int]:
    if cfg.target == "all":
        reports = verify_all(jobs=cfg.jobs)
    else:
        reports = run_tasks(_verify_tasks(cfg), jobs=cfg.jobs)
    body = emit_report(reports, cfg.fmt, timing=cfg.timing)
    notes = emit_notes(reports)
    if cfg.fmt == "text" and notes:
        body += b"\nnotes:\n" + notes.encode("utf-8") + b"\n"
    code = EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED
    return body, code


def cmd_build(cfg: RunConfig, cache: Optional[ComplexCache]) -> tuple[bytes, int]:
    K = resolve_complex(cfg, cache)
    if cfg.save:
        save_complex(K, cfg.save)
    record = {"complex": K.name, "n_faces": len(K), **stats(K).to_dict()}
    return emit_record(record, cfg.fmt), EXIT_OK


def cmd_homology(cfg: RunConfig, cache: Optional[ComplexCache]) -> tuple[bytes, int]:
    K = resolve_complex(cfg, cache)
    if cfg.save:
        save_complex(K, cfg.save)
    return emit_profile(reduced_homology(K), cfg.fmt, f_vector=K.f_vector), EXIT_OK


def cmd_morse(cfg: RunConfig, cache: Optional[ComplexCache]) -> tuple[bytes, int]:
    K = resolve_complex(cfg, cache)
    sched = resolve_schedule(cfg, K)
    M = run_schedule(K, sched)
    acyclic = is_acyclic(K, M)
    if cfg.matching:
        Path(cfg.matching).write_text(format_matching(M), encoding="utf-8")
    record = {
        "complex":        K.name,
        "schedule":       sched.name,
        "schedule_len":   len(sched),
        "pairs":          len(M.pairs),
        "acyclic":        acyclic.acyclic,
        "partition":      M.is_partition(),
        "critical_faces": critical_labels(M),
        **summary(M).to_dict(),
    }
    return emit_record(record, cfg.fmt), EXIT_OK


def cmd_domination(cfg: RunConfig, cache: Optional[ComplexCache]) -> tuple[bytes, int]:
    n     = cfg.domination[0] if cfg.domination else cfg.n
    gamma = cfg.domination[1] if cfg.domination else cfg.gamma
    if n is None or gamma is None:
        raise InvalidArgument("domination needs --n and --gamma (or --domination N GAMMA)")
    cfg.domination = (n, gamma)
    K = resolve_complex(cfg, cache)
    H = reduced_homology(K)
    record = {
        "complex":  K.name,
        "n_faces":  len(K),
        **stats(K).to_dict(),
        "betti":    {str(d): b for d, b in H.betti_numbers.items() if b},
        "torsion":  {str(d): list(H.torsion(d)) for d in H.nonzero_dims if H.torsion(d)},
    }
    return emit_record(record, cfg.fmt), EXIT_OK


def cmd_bound(cfg: RunConfig) -> tuple[bytes, int]:
    if cfg.n is None or cfg.d is None:
        raise InvalidArgument("bound needs --n and --d")
    return emit_record(jonsson_nu(cfg.n, cfg.d).to_dict(), cfg.fmt), EXIT_OK


# ══════════════════════════════════════════════════════════════════════════
#  ENTRY POINT
# ══════════════════════════════════════════════════════════════════════════

def _write(body: bytes, out: Optional[str]) -> None:
    if out:
        Path(out).write_bytes(body)
    else:
        sys.stdout.buffer.write(body)
        sys.stdout.flush()


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    except InvalidArgument as e:
        print(f"matchex: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if cfg.verbose else logging.INFO,
        format="%(asctime)s %(levelname)-7s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        cache_dir = resolve_cache_dir(cfg.cache)
        cache = ComplexCache(cache_dir) if cache_dir else None
        if cfg.command == "verify":
            body, code = cmd_verify(cfg)
        elif cfg.command == "bound":
            body, code = cmd_bound(cfg)
        elif cfg.command == "build":
            body, code = cmd_build(cfg, cache)
        elif cfg.command == "homology":
            body, code = cmd_homology(cfg, cache)
        elif cfg.command == "morse":
            body, code = cmd_morse(cfg, cache)
        else:
            body, code = cmd_domination(cfg, cache)
        _write(body, cfg.out)
    except (InvalidArgument, CapacityError) as e:
        print(f"matchex: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"matchex: I/O error: {e}", file=sys.stderr)
        return EXIT_USAGE

    if cache is not None:
        logger.info("cache %s: %d hits, %d misses", cache.root, cache.hits, cache.misses)
    return code
