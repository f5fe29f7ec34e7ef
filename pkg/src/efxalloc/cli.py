"""``efx`` command line: gen, solve, check, classify, bench.

Exit codes: 0 success, 1 none found, 2 precondition, 3 proof mismatch,
64 usage, 65 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import io
from .allocators import (
    allocate_thm_n1,
    allocate_thm_n2,
    allocate_trivial,
    auto_allocate,
    singletons_beat_empty,
)
from .errors import (
    CapacityError,
    MalformedInputError,
    PreconditionError,
    ProofMismatchError,
)
from .generators import (
    fixture_profile,
    gen_additive,
    gen_monotone_table,
    gen_sized_profile,
    counterexample_fixtures,
)
from .oracle import brute_force_efx
from .predicates import (
    MAX_MMS_GOODS,
    THEOREMS,
    check_efx,
    classify_profile,
    is_mms_feasible,
    is_set_monotonic,
    is_strict,
    size_monotonic_witness,
)
from .strictify import strictify_profile
from .suites import SUITES, suite_instance

log = logging.getLogger("efxalloc")

EXIT_OK = 0
EXIT_NONE = 1
EXIT_PRECONDITION = 2
EXIT_PROOF = 3
EXIT_USAGE = 64
EXIT_MALFORMED = 65

# theorem allocators enumerate C(m, ell) subsets; beyond this it gets slow
WARN_GOODS = 24


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc}") from exc


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_profile(path: str):
    profile = io.parse_instance(_read(path))
    if profile.m > WARN_GOODS:
        log.warning("m=%d: theorem allocators enumerate subsets and may be slow", profile.m)
    return profile


# -- gen ---------------------------------------------------------------------------------

def cmd_gen(args) -> int:
    fam = args.family
    if fam == "fixture":
        if not args.name:
            raise UsageError(f"--name is required; choose from {sorted(counterexample_fixtures())}")
        profile = fixture_profile(args.name, args.n or 2)
    elif fam == "sized":
        if not args.spec or args.m is None:
            raise UsageError("--family sized needs --m and --spec")
        specs = [s for s in args.spec.split(",") if s]
        if args.n is not None and args.n != len(specs):
            raise UsageError(f"--spec lists {len(specs)} agents but --n is {args.n}")
        profile = gen_sized_profile(args.seed, args.m, specs)
    else:
        if args.n is None or args.m is None:
            raise UsageError(f"--family {fam} needs --n and --m")
        if fam == "additive":
            lo, _, hi = args.weight_range.partition(":")
            try:
                weights = (int(lo), int(hi))
            except ValueError:
                raise UsageError(f"bad --weight-range {args.weight_range!r}") from None
            profile = gen_additive(args.seed, args.n, args.m, weights)
        else:
            profile = gen_monotone_table(args.seed, args.n, args.m)
    _write(args.out, io.format_instance(profile))
    return EXIT_OK


# -- solve ---------------------------------------------------------------------------------

def _first_roles(profile, families):
    for theorem in THEOREMS:
        if theorem.startswith(families):
            roles = classify_profile(profile, theorem)
            if roles is not None:
                return roles
    return None


def cmd_solve(args) -> int:
    profile = _load_profile(args.input)
    algo = args.algo
    trace = None
    method = algo
    if algo == "auto":
        sol = auto_allocate(profile)
        alloc, trace, method = sol.allocation, sol.trace, sol.method
    elif algo == "trivial":
        if profile.m > profile.n:
            raise PreconditionError(f"trivial allocation needs m <= n, got m={profile.m}, n={profile.n}")
        if not singletons_beat_empty(profile):
            raise PreconditionError("some agent prefers the empty bundle to a single good")
        alloc = allocate_trivial(profile)
    elif algo in ("thm-n1", "thm-n2"):
        if profile.m <= profile.n:
            raise PreconditionError(f"m={profile.m} <= n={profile.n}: use --algo trivial")
        strict = strictify_profile(profile)
        if algo == "thm-n1":
            roles = _first_roles(strict, ("ThmN1", "Relax1"))
            if roles is None:
                raise PreconditionError("no one-unconstrained-agent pattern applies")
            alloc = allocate_thm_n1(profile, roles)
        else:
            roles = _first_roles(strict, ("ThmN2", "Relax2"))
            if roles is None:
                raise PreconditionError("no two-unconstrained-agent pattern applies")
            alloc, trace = allocate_thm_n2(profile, roles)
    else:
        alloc = brute_force_efx(profile, "first")
        method = "brute-force"

    if alloc is None:
        print("no EFX allocation found", file=sys.stderr)
        return EXIT_NONE
    # never report success without an independent certificate
    report = check_efx(profile, alloc)
    if not report.is_efx:
        raise ProofMismatchError("certification", f"{len(report.violations)} violations")
    text = io.allocation_json(alloc) + "\n" if args.json else io.format_allocation(alloc)
    _write(args.out, text)
    if args.trace and trace is not None:
        _write(args.trace, io.trace_json(trace) + "\n")
    print(f"method={method} certified=EFX", file=sys.stderr)
    return EXIT_OK


# -- check ---------------------------------------------------------------------------------

def cmd_check(args) -> int:
    profile = _load_profile(args.input)
    alloc = io.parse_allocation(_read(args.allocation), profile.n)
    report = check_efx(profile, alloc)
    if args.json:
        import json

        print(json.dumps({
            "efx": report.is_efx,
            "violations": [[v.envier, v.envied, v.good] for v in report.violations],
        }))
    else:
        if report.is_efx:
            print("EFX: no violations")
        else:
            print(f"not EFX: {len(report.violations)} violation(s)")
            for v in report.violations:
                print(f"  agent {v.envier} envies agent {v.envied} after removing good {v.good}")
    return EXIT_OK if report.is_efx else EXIT_NONE


# -- classify ------------------------------------------------------------------------------

def size_monotone_ranges(v) -> list[tuple[int, int]]:
    """Maximal [k, l] (1 <= k < l <= m) on which ``v`` is size monotone."""
    ok = [size_monotonic_witness(v, s, s + 1) is None for s in range(1, v.m)]
    ranges = []
    s = 0
    while s < len(ok):
        if ok[s]:
            start = s
            while s < len(ok) and ok[s]:
                s += 1
            ranges.append((start + 1, s + 1))
        else:
            s += 1
    return ranges


def classify_report(profile) -> dict:
    agents = []
    for i, v in enumerate(profile):
        entry = {
            "agent": i,
            "set_monotonic": is_set_monotonic(v),
            "strict": is_strict(v),
            "size_monotone_ranges": size_monotone_ranges(v),
        }
        if profile.m <= MAX_MMS_GOODS:
            entry["mms_feasible"] = is_mms_feasible(v)
        agents.append(entry)
    patterns = []
    if profile.m <= profile.n:
        patterns.append({"pattern": "trivial", "order": list(range(profile.n))})
    else:
        for theorem in THEOREMS:
            roles = classify_profile(profile, theorem)
            if roles is not None:
                patterns.append({
                    "pattern": theorem, "order": list(roles.order),
                    "ell": roles.ell, "r": roles.r, "classes": list(roles.classes),
                })
    return {"n": profile.n, "m": profile.m, "agents": agents, "patterns": patterns}


def cmd_classify(args) -> int:
    rep = classify_report(_load_profile(args.input))
    if args.json:
        import json

        print(json.dumps(rep))
        return EXIT_OK
    print(f"n={rep['n']} m={rep['m']}")
    for a in rep["agents"]:
        ranges = " ".join(f"<{k},{l}>" for k, l in a["size_monotone_ranges"]) or "none"
        mms = a.get("mms_feasible", "skipped (m too large)")
        print(f"agent {a['agent']}: set_monotonic={a['set_monotonic']} strict={a['strict']} "
              f"mms_feasible={mms} size_monotone={ranges}")
    if not rep["patterns"]:
        print("applicable patterns: none")
    for p in rep["patterns"]:
        extra = f" ell={p['ell']} r={p['r']}" if "ell" in p else ""
        print(f"applicable: {p['pattern']} order={p['order']}{extra}")
    return EXIT_OK


# -- bench ---------------------------------------------------------------------------------

BENCH_COLUMNS = ["seed", "n", "m", "method", "depth", "wall_ms", "certified", "oracle"]


def run_trial(suite: str, seed: int, max_n: int, max_m: int, oracle: bool) -> dict:
    inst = suite_instance(suite, seed, max_n, max_m)
    profile = inst.profile
    start = time.perf_counter()
    strict = strictify_profile(profile)
    if inst.suite == "thm-n1":
        roles = _first_roles(strict, ("ThmN1",))
        alloc, trace, method = allocate_thm_n1(profile, roles), None, "thm-n1"
    else:
        roles = _first_roles(strict, ("ThmN2",))
        (alloc, trace), method = allocate_thm_n2(profile, roles), "thm-n2"
    wall = (time.perf_counter() - start) * 1000
    certified = check_efx(profile, alloc).is_efx
    agree = ""
    if oracle:
        if profile.n ** profile.m <= 10**6:
            hits = brute_force_efx(profile, "all")
            agree = str(bool(hits) and alloc in hits)
        else:
            agree = "skipped"
    return {
        "seed": seed, "n": profile.n, "m": profile.m, "method": method,
        "depth": trace.depth if trace else "", "wall_ms": f"{wall:.3f}",
        "certified": str(certified), "oracle": agree,
    }


def cmd_bench(args) -> int:
    if args.trials < 0:
        raise UsageError("--trials must be nonnegative")
    if args.max_n < 2 or args.max_m <= args.max_n:
        raise UsageError("need --max-n >= 2 and --max-m > --max-n")
    oracle = args.suite == "oracle-cross" or args.oracle
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="", encoding="utf-8")
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for t in range(args.trials):
            writer.writerow(run_trial(args.suite, args.seed + t, args.max_n, args.max_m, oracle))
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# -- entry point ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="efx", description="Exact EFX allocations of indivisible goods.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--family", required=True, choices=["additive", "monotone-table", "sized", "fixture"])
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spec", help="comma-separated classes, e.g. arbitrary,arbitrary,1:4")
    p.add_argument("--name", help="fixture name")
    p.add_argument("--weight-range", default="1:100")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="compute and certify an EFX allocation")
    p.add_argument("--algo", default="auto", choices=["auto", "trivial", "thm-n1", "thm-n2", "brute"])
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--trace")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="list EFX violations of an allocation")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--allocation", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("classify", help="monotonicity classes and applicable patterns")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bench", help="seeded batch runs, one CSV row per trial")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--max-m", type=int, default=9)
    p.add_argument("--oracle", action="store_true", help="also cross-check with brute force")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"efx: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MalformedInputError as exc:
        print(f"efx: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except PreconditionError as exc:
        print(f"efx: precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ProofMismatchError as exc:
        print(f"efx: {exc}", file=sys.stderr)
        return EXIT_PROOF
    except CapacityError as exc:
        print(f"efx: capacity: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
