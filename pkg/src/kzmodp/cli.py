"""Command-line interface: ``kzmodp pair | construct | certify``.

Exit codes: 0 success, 1 a certification check failed, 2 invalid input,
3 the size guard tripped.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb

from .arith import PrimePair, classify_pair
from .cartier import cartier_row, enumerate_partitions, rows_agree, tuple_to_partition
from .errors import CertificationError, InvalidInput, SizeGuardError
from .kzcore import (
    ModelParams,
    VectorPoly,
    check_kz,
    check_singular,
    construct_solution,
    default_max_terms,
)
from .leading import certify_tuple

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_SIZE = 0, 1, 2, 3

__all__ = ["RunConfig", "certify_case", "main", "solution_json", "write_solution_json"]


@dataclass(frozen=True)
class RunConfig:
    p: int
    q: int
    r: int
    g: int | None = None
    n: int | None = None
    fmt: str = "text"
    max_terms: int | None = None
    jobs: int = 1

    def resolve(self) -> tuple[PrimePair, ModelParams]:
        pair = classify_pair(self.p, self.q)
        if self.g is not None and self.n is not None:
            params = ModelParams(self.n, self.r, self.g)
            params.validate(pair)
        else:
            params = ModelParams.for_pair(pair, r=self.r, g=self.g, n=self.n)
        return pair, params

    @property
    def limit(self) -> int:
        return default_max_terms() if self.max_terms is None else self.max_terms


# serialization


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _component_json(J, f) -> str:
    terms = [{"exp": list(e), "coef": c} for e, c in f.terms()]
    return _dumps({"J": list(J), "terms": terms})


def _header(pair: PrimePair, params: ModelParams, L, zero: bool) -> dict:
    return {"p": pair.p, "q": pair.q, "k": pair.k, "M": pair.M, "c": pair.c,
            "n": params.n, "r": params.r, "L": list(L), "zero": zero}


def _solution_chunks(pair, params, L, v: VectorPoly) -> Iterator[str]:
    head = _dumps(_header(pair, params, L, v.is_zero))
    yield head[:-1] + ',"components":['
    for i, (J, f) in enumerate(v.items()):
        yield ("," if i else "") + _component_json(J, f)
    yield "]}"


def solution_json(pair: PrimePair, params: ModelParams, L, v: VectorPoly) -> str:
    """Canonical JSON: components by ascending J, terms in descending lex order."""
    return "".join(_solution_chunks(pair, params, L, v))


def write_solution_json(stream, pair, params, L, v: VectorPoly) -> None:
    # one component at a time, so large solutions never sit in memory as text
    for chunk in _solution_chunks(pair, params, L, v):
        stream.write(chunk)
    stream.write("\n")


def solution_text(pair, params, L, v: VectorPoly) -> str:
    lines = [f"p={pair.p} q={pair.q} n={params.n} r={params.r} L={tuple(L)}"]
    if v.is_zero:
        lines.append("zero")
    for J, f in v.items():
        lines.append(f"J={J}: {f.to_text()}")
    return "\n".join(lines)


# certification


def _certify_tuple(args) -> dict:
    """All per-tuple checks; returns a JSON-ready record and never raises on failure."""
    pair, params, L, max_terms = args
    rec = {"L": list(L)}
    try:
        v = construct_solution(pair, params, L, max_terms=max_terms)
        rec["singular"] = check_singular(v, params)
        rec["kz"] = check_kz(v, pair, params)
        tc = certify_tuple(pair, params, L, v)
        rec.update(tc.to_json())
        row = cartier_row(pair, params, tuple_to_partition(L), max_terms=max_terms)
        rec["cartier"] = rows_agree(row, v)
        rec["error"] = None
    except CertificationError as exc:
        rec["error"] = str(exc)
    return rec


def certify_case(pair: PrimePair, params: ModelParams, *, max_terms: int | None = None,
                 jobs: int = 1) -> dict:
    """Run every check for one model and aggregate a certificate.

    The certificate has no timings or other run-dependent data, so it is
    byte-identical for any ``jobs``.
    """
    params.validate(pair)
    if not pair.is_type1:
        raise InvalidInput(f"({pair.p}, {pair.q}) is a type-2 pair; no certification available")
    max_terms = default_max_terms() if max_terms is None else max_terms
    tuples = params.admissible_tuples(pair)
    work = [(pair, params, L, max_terms) for L in tuples]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_certify_tuple, work))
    else:
        records = [_certify_tuple(w) for w in work]

    failures = []
    for rec in records:
        L = tuple(rec["L"])
        if rec["error"]:
            failures.append(rec["error"])
            continue
        for check in ("singular", "kz", "eigen", "cartier"):
            if not rec[check]:
                failures.append(f"{L}: {check} check failed")
    indices = [tuple(rec["leading"]["leading_index"]) for rec in records if not rec["error"]]
    if len(set(indices)) != len(indices):
        failures.append("leading indices are not pairwise distinct")
    extent = pair.k * params.g - 1
    counts = {
        "rank": len(records) - sum(1 for rec in records if rec["error"]),
        "binomial": comb(params.max_index(pair), params.r),
        "partitions": len(enumerate_partitions(extent, params.r)),
    }
    if len(set(counts.values())) != 1:
        failures.append(f"rank identity fails: {counts}")
    cert = _header(pair, params, [], False)
    del cert["L"], cert["zero"]
    cert.update({"g": params.g, "rank": counts["rank"], "counts": counts,
                 "basis": [rec["L"] for rec in records], "tuples": records,
                 "passed": not failures, "failures": failures})
    return cert


def certificate_text(cert: dict) -> str:
    lines = [f"p={cert['p']} q={cert['q']} k={cert['k']} M={cert['M']} c={cert['c']} "
             f"n={cert['n']} r={cert['r']} g={cert['g']}",
             f"rank {cert['rank']} (binomial {cert['counts']['binomial']}, "
             f"partitions {cert['counts']['partitions']})"]
    for rec in cert["tuples"]:
        if rec["error"]:
            lines.append(f"L={tuple(rec['L'])}: ERROR {rec['error']}")
            continue
        lead = rec["leading"]
        flags = " ".join(f"{k}={'ok' if rec[k] else 'FAIL'}"
                         for k in ("singular", "kz", "eigen", "cartier"))
        lines.append(f"L={tuple(rec['L'])}: exponents={tuple(lead['exponents'])} "
                     f"index={tuple(lead['leading_index'])} entry={rec['predicted_entry']} {flags}")
    lines.append("PASS" if cert["passed"] else "FAIL: " + "; ".join(cert["failures"]))
    return "\n".join(lines)


# argument handling


def _parse_tuple(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}") from None


def _model_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--p", type=int, required=True)
    sub.add_argument("--q", type=int, required=True)
    sub.add_argument("--r", type=int, required=True)
    sub.add_argument("--g", type=int)
    sub.add_argument("--n", type=int)
    sub.add_argument("--format", choices=("text", "json"), default="text")
    sub.add_argument("--max-terms", type=int, help="size guard (default $KZMODP_MAX_TERMS or 10^7)")
    sub.add_argument("--out", help="write the result here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kzmodp", description="p-hypergeometric solutions of the sl2 KZ equations mod p")
    subs = parser.add_subparsers(dest="command", required=True)
    pair = subs.add_parser("pair", help="classify a prime pair and print k, M, c")
    pair.add_argument("P", type=int)
    pair.add_argument("Q", type=int)
    pair.add_argument("--format", choices=("text", "json"), default="text")
    construct = subs.add_parser("construct", help="construct one solution I^(L)")
    _model_args(construct)
    construct.add_argument("--l", type=_parse_tuple, required=True, help="comma list l_1,...,l_r")
    certify = subs.add_parser("certify", help="run every check and emit a certificate")
    _model_args(certify)
    certify.add_argument("--jobs", type=int, default=1)
    return parser


def _config(args) -> RunConfig:
    if args.g is None and args.n is None:
        raise InvalidInput("give --g or --n")
    if getattr(args, "jobs", 1) < 1:
        raise InvalidInput("--jobs must be positive")
    if args.max_terms is not None and args.max_terms < 1:
        raise InvalidInput("--max-terms must be positive")
    return RunConfig(args.p, args.q, args.r, args.g, args.n, args.format,
                     args.max_terms, getattr(args, "jobs", 1))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def cmd_pair(args) -> int:
    pair = classify_pair(args.P, args.Q)
    if args.format == "json":
        print(_dumps({"p": pair.p, "q": pair.q, "k": pair.k, "type": pair.pair_type,
                      "M": pair.M, "c": pair.c}))
    else:
        print(f"p={pair.p} q={pair.q} type={pair.pair_type} k={pair.k} M={pair.M} c={pair.c}")
        if not pair.is_type1:
            print("note: type-2 pair, no certification available")
    return EXIT_OK


def cmd_construct(args) -> int:
    cfg = _config(args)
    pair, params = cfg.resolve()
    L = args.l
    v = construct_solution(pair, params, L, max_terms=cfg.limit)
    if cfg.fmt == "text":
        _emit(solution_text(pair, params, L, v), args.out)
    elif args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            write_solution_json(fh, pair, params, L, v)
    else:
        write_solution_json(sys.stdout, pair, params, L, v)
    return EXIT_OK


def cmd_certify(args) -> int:
    cfg = _config(args)
    pair, params = cfg.resolve()
    cert = certify_case(pair, params, max_terms=cfg.limit, jobs=cfg.jobs)
    _emit(_dumps(cert) if cfg.fmt == "json" else certificate_text(cert), args.out)
    if not cert["passed"]:
        print("certification failed: " + "; ".join(cert["failures"]), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"pair": cmd_pair, "construct": cmd_construct, "certify": cmd_certify}[args.command]
    try:
        return handler(args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
