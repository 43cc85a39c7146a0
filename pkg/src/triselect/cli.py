"""Command line: ``triselect {gen,select,oracle,bench,verify}``.

Exit codes: 0 success, 2 input error, 3 verification or invariant failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from math import comb
from pathlib import Path

from .certificate import dumps_certificate, load_certificate, verify_certificate
from .errors import InputError, TriselectError
from .generators import ALL, FAMILIES, GeneratorSpec, generate
from .geometry import rational_str
from .instance import dumps_instance, load_instance
from .oracle import exact_max_depth, heuristic_baseline
from .selection import run_selection

EXIT_INPUT = 2
EXIT_FAILED = 3

BENCH_COLUMNS = [
    "family", "n", "m", "seed", "j_star", "M0", "M1_ratio_num", "M1_ratio_den", "M2",
    "depth_alg", "depth_max", "bound_rhs", "c_emp", "runtime_ms",
]


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _parse_m(value: str):
    if value.upper() == ALL:
        return ALL
    if value == "n2":
        return value
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ALL, n2 or an integer, got {value!r}") from None


def _parse_range(value: str) -> range:
    lo, sep, hi = value.partition("..")
    try:
        lo_i, hi_i = int(lo), int(hi if sep else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {value!r}") from None
    if lo_i > hi_i:
        raise argparse.ArgumentTypeError(f"empty range {value!r}")
    return range(lo_i, hi_i + 1)


def _resolve_m(m, n: int):
    if m == "n2":
        return min(n * n, comb(n, 3))
    return m


def cmd_gen(args) -> int:
    m = _resolve_m(args.m, args.n)
    s, t = generate(GeneratorSpec(args.family, args.n, m, args.seed))
    _write_text(args.out, dumps_instance(s, t))
    return 0


def cmd_select(args) -> int:
    s, t = load_instance(args.input)
    cert = run_selection(s, t, oracle=args.oracle)
    if args.cert_out:
        Path(args.cert_out).write_text(dumps_certificate(cert))
    if args.json:
        print(json.dumps({
            "n": cert.n, "m": cert.m, "j_star": cert.j_star,
            "depth_triangles": cert.depth_triangles, "depth_pairs": cert.depth_pairs,
            "bound_rhs": rational_str(cert.bound_rhs),
            "x0": [rational_str(cert.x0_input.x), rational_str(cert.x0_input.y)],
            "oracle_depth": cert.oracle_depth, "passed": cert.passed,
        }))
    else:
        print(f"n={cert.n} m={cert.m} j*={cert.j_star} depth_triangles={cert.depth_triangles} "
              f"bound_rhs={float(cert.bound_rhs):.6g}")
    if not cert.passed:
        for c in cert.failures():
            print(f"chain check failed: {c.name} ({c.lhs} {c.relation} {c.rhs})", file=sys.stderr)
        return EXIT_FAILED
    return 0


def cmd_oracle(args) -> int:
    s, t = load_instance(args.input)
    result = heuristic_baseline(s, t) if args.baseline else exact_max_depth(s, t)
    point = [rational_str(result.point.x), rational_str(result.point.y)]
    slab = None if result.slab is None else [rational_str(v) for v in result.slab]
    if args.json:
        print(json.dumps({"depth": result.depth, "point": point, "slab": slab}))
    else:
        print(f"depth={result.depth} point=({point[0]}, {point[1]})"
              + ("" if slab is None else f" slab=({slab[0]}, {slab[1]})"))
    return 0


def cmd_verify(args) -> int:
    s, t = load_instance(args.input)
    cert = load_certificate(args.cert)
    failures = verify_certificate(s, t, cert)
    if failures:
        for f in failures:
            print(f"verification failed: {f}", file=sys.stderr)
        return EXIT_FAILED
    print(f"certificate verified: {len(cert.chain_checks)} checks")
    return 0


def bench_row(family: str, n: int, m_flag, seed: int, oracle_max_n: int, timing: bool) -> tuple[dict, list[str]]:
    m = _resolve_m(m_flag, n)
    s, t = generate(GeneratorSpec(family, n, m, seed))
    start = time.perf_counter()
    cert = run_selection(s, t, oracle=n <= oracle_max_n)
    elapsed = (time.perf_counter() - start) * 1000
    m = len(t)
    c_emp = cert.depth_triangles * n ** 6 * math.log2(n) ** 2 / m ** 3
    row = {
        "family": family, "n": n, "m": m, "seed": seed, "j_star": cert.j_star,
        "M0": cert.M0_size, "M1_ratio_num": cert.M1_size, "M1_ratio_den": cert.n1,
        "M2": cert.M2_size, "depth_alg": cert.depth_triangles,
        "depth_max": "" if cert.oracle_depth is None else cert.oracle_depth,
        "bound_rhs": repr(m ** 3 / (n ** 6 * math.log2(n) ** 2)),
        "c_emp": repr(c_emp),
        "runtime_ms": f"{elapsed:.1f}" if timing else "",
    }
    return row, [c.name for c in cert.failures()]


def cmd_bench(args) -> int:
    families = [f.strip() for f in args.families.split(",") if f.strip()]
    for f in families:
        if f not in FAMILIES:
            raise InputError(f"unknown family {f!r}; choose from {', '.join(FAMILIES)}")
    if args.trials < 1:
        raise InputError("--trials must be at least 1")
    jobs = [(f, n, args.m, args.seed + k, args.oracle_max_n, args.timing)
            for f in families for n in args.n_range for k in range(args.trials)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(bench_row, *zip(*jobs)))
    else:
        results = [bench_row(*job) for job in jobs]

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    status = 0
    for (row, failed), job in zip(results, jobs):
        writer.writerow(row)
        if failed:
            print(f"chain check failed for {job[:4]}: {', '.join(failed)}", file=sys.stderr)
            status = EXIT_FAILED
    _write_text(args.csv_out, buf.getvalue())
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="triselect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a seeded instance file")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=_parse_m, default=ALL, help="ALL, n2, or a triangle count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("select", help="run the selection pipeline and emit a certificate")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--cert-out")
    p.add_argument("--json", action="store_true")
    p.add_argument("--oracle", action="store_true", help="also run the exact oracle (check C10)")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("oracle", help="exact maximum triangle depth")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--baseline", action="store_true", help="centroid heuristic instead of the exact sweep")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="empirical-constant table as CSV")
    p.add_argument("--families", default="random_integer", help="comma-separated family names")
    p.add_argument("--n-range", type=_parse_range, default=_parse_range("8..10"))
    p.add_argument("--m", type=_parse_m, default=ALL)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv-out", default="-")
    p.add_argument("--oracle-max-n", type=int, default=12)
    p.add_argument("--timing", action="store_true", help="fill runtime_ms (makes output non-reproducible)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="re-check a certificate against its instance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--cert", required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TriselectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
