"""Command-line front end.

Structured JSON goes to stdout, a one-line human summary to stderr.  Exit
codes: 0 = success / check passed, 1 = semantic failure (check failed, not a
positive spanning set, construction or enumeration refused), 2 = usage or
input error.  ``gen`` and ``build-pkss`` write the generated family JSON to
stdout (or to ``-o FILE``, in which case a run report goes to stdout
instead); generation is deterministic, so identical seeds give identical
bytes.  The ``PSSKIT_SEED`` environment variable supplies a seed when
``--seed`` is absent.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .construct import (
    build_pkbasis_blockwise,
    build_pkss_copies,
    build_pkss_global_rotations,
    gen_maximal,
    gen_minimal,
    gen_ospb,
)
from .cosine import cosine_measure_generic
from .errors import (
    ConstructionError,
    EnumerationLimitError,
    FamilyFormatError,
    NotPositiveSpanningError,
    PsskitError,
)
from .family import (
    Tolerances,
    VectorFamily,
    dump_family,
    dumps_family,
    family_digest,
    gram,
    load_family,
)
from .kspan import (
    NOT_POSITIVE,
    POSITIVE,
    is_pkss,
    is_positive_k_basis,
    k_cosine_measure,
)
from .ospb import cosine_measure_ospb, detect_ospb
from .spanning import is_critical_vector, is_positive_basis, is_pss

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


@dataclass
class RunReport:
    """Envelope for every structured result printed by the CLI."""

    command: str
    input_digest: str | None
    result: dict
    timing_ms: float
    tolerances: dict
    seed: int | None

    def to_json(self) -> str:
        return json.dumps(
            {
                "command": self.command,
                "input_digest": self.input_digest,
                "result": self.result,
                "timing_ms": self.timing_ms,
                "tolerances": self.tolerances,
                "seed": self.seed,
            },
            indent=2,
        )


def _tolerances(args) -> Tolerances:
    return Tolerances(
        zero_tol=args.tol, rank_tol=args.rank_tol, dedupe_tol=args.dedupe_tol
    )


def _seed_or_env(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("PSSKIT_SEED")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError as exc:
        raise FamilyFormatError(f"PSSKIT_SEED is not an integer: {env!r}") from exc


def _emit(report: RunReport, summary: str) -> None:
    print(report.to_json())
    print(summary, file=sys.stderr)


def _max_subsets(args) -> int | None:
    return None if args.max_subsets == 0 else args.max_subsets


def cmd_cm(args) -> int:
    tol = _tolerances(args)
    family = load_family(args.file)
    t0 = time.perf_counter()
    path = args.method
    decomposition = None
    if args.method in ("auto", "ospb"):
        detection = detect_ospb(family, tol)
        if detection:
            decomposition = detection.decomposition
            path = "ospb"
        elif args.method == "ospb":
            report = RunReport(
                "cm",
                family_digest(family),
                {"error": "not_ospb", "reason": detection.reason},
                _ms(t0),
                _tol_dict(tol),
                None,
            )
            _emit(report, f"not an OSPB: {detection.reason}")
            return EXIT_FAIL
        else:
            path = "generic"
    try:
        if decomposition is not None:
            result = cosine_measure_ospb(family, decomposition, tol)
        else:
            result = cosine_measure_generic(
                family, tol=tol, max_subsets=_max_subsets(args), jobs=args.jobs
            )
    except NotPositiveSpanningError as exc:
        payload = {"error": "not_positive_spanning", "reason": str(exc)}
        if exc.check.rank_deficit is not None:
            payload["rank_deficit"] = exc.check.rank_deficit
        if exc.check.failing_index is not None:
            payload["failing_index"] = exc.check.failing_index
        report = RunReport(
            "cm", family_digest(family), payload, _ms(t0), _tol_dict(tol), None
        )
        _emit(report, str(exc))
        return EXIT_FAIL
    payload = result.to_json_dict()
    payload["path"] = path
    if decomposition is not None:
        payload["decomposition"] = decomposition.to_json_dict()
    report = RunReport(
        "cm", family_digest(family), payload, _ms(t0), _tol_dict(tol), None
    )
    _emit(report, f"cosine measure {result.value:.12g} via {path} path")
    return EXIT_OK


def cmd_cmk(args) -> int:
    tol = _tolerances(args)
    family = load_family(args.file)
    t0 = time.perf_counter()
    result = k_cosine_measure(
        family, args.k, tol=tol, max_subsets=_max_subsets(args), jobs=args.jobs
    )
    report = RunReport(
        "cmk",
        family_digest(family),
        result.to_json_dict(),
        _ms(t0),
        _tol_dict(tol),
        None,
    )
    if result.status == POSITIVE:
        _emit(report, f"{args.k}-cosine measure {result.value:.12g}")
        return EXIT_OK
    _emit(report, f"not a positive {args.k}-spanning set")
    return EXIT_FAIL


def cmd_check(args) -> int:
    tol = _tolerances(args)
    family = load_family(args.file)
    t0 = time.perf_counter()
    payload: dict
    if args.pss:
        mode = "pss"
        check = is_pss(family, tol=tol)
        holds = bool(check)
        payload = {"mode": mode, "holds": holds}
        if check.rank_deficit is not None:
            payload["rank_deficit"] = check.rank_deficit
        if check.failing_index is not None:
            payload["failing_index"] = check.failing_index
        if holds:
            payload["coefficients"] = [a.tolist() for a in check.coefficients]
    elif args.pb:
        mode = "pb"
        holds = is_positive_basis(family, tol)
        payload = {"mode": mode, "holds": holds}
    elif args.ospb:
        mode = "ospb"
        detection = detect_ospb(family, tol)
        holds = detection.is_ospb
        payload = {"mode": mode, "holds": holds}
        if holds:
            payload["decomposition"] = detection.decomposition.to_json_dict()
        else:
            payload["reason"] = detection.reason
    elif args.pkss is not None:
        mode = "pkss"
        check = is_pkss(family, args.pkss, tol=tol)
        holds = bool(check)
        payload = {"mode": mode, "k": args.pkss, "holds": holds}
        if not holds:
            payload["failing_subset"] = list(check.failing_subset)
    elif args.pkb is not None:
        mode = "pkb"
        holds = is_positive_k_basis(family, args.pkb, tol)
        payload = {"mode": mode, "k": args.pkb, "holds": holds}
    else:
        mode = "crit"
        c = _parse_vector(args.crit)
        holds = is_critical_vector(family, c, tol)
        payload = {"mode": mode, "vector": c.tolist(), "holds": holds}
    report = RunReport(
        "check", family_digest(family), payload, _ms(t0), _tol_dict(tol), None
    )
    _emit(report, f"check {mode}: {'pass' if holds else 'fail'}")
    return EXIT_OK if holds else EXIT_FAIL


def cmd_detect(args) -> int:
    tol = _tolerances(args)
    family = load_family(args.file)
    t0 = time.perf_counter()
    detection = detect_ospb(family, tol)
    if detection:
        payload = detection.decomposition.to_json_dict()
        report = RunReport(
            "detect-ospb", family_digest(family), payload, _ms(t0), _tol_dict(tol), None
        )
        _emit(report, f"OSPB with {detection.decomposition.s} block(s)")
        return EXIT_OK
    payload = {"error": "not_ospb", "reason": detection.reason}
    report = RunReport(
        "detect-ospb", family_digest(family), payload, _ms(t0), _tol_dict(tol), None
    )
    _emit(report, f"not an OSPB: {detection.reason}")
    return EXIT_FAIL


def _parse_blocks(text: str) -> list[int]:
    try:
        dims = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise FamilyFormatError(f"--blocks must be comma-separated integers: {text!r}") from exc
    if not dims:
        raise FamilyFormatError("--blocks must name at least one block dimension")
    return dims


def _parse_vector(text: str) -> np.ndarray:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise FamilyFormatError(f"--crit must be comma-separated floats: {text!r}") from exc
    return np.array(values)


def _write_family(args, family: VectorFamily, command: str, seed: int | None,
                  tol: Tolerances, t0: float, extra: dict | None = None,
                  summary: str = "") -> int:
    if args.out:
        dump_family(family, args.out, extra)
        result = {"m": family.m, "dim": family.dim, "written_to": args.out}
        if extra:
            result.update(extra)
        report = RunReport(
            command, family_digest(family), result, _ms(t0), _tol_dict(tol), seed
        )
        _emit(report, summary or f"wrote {family.m} vectors to {args.out}")
    else:
        sys.stdout.write(dumps_family(family, extra))
        print(summary or f"generated {family.m} vectors in dimension {family.dim}",
              file=sys.stderr)
    return EXIT_OK


def cmd_gen(args) -> int:
    tol = _tolerances(args)
    seed = _seed_or_env(args)
    t0 = time.perf_counter()
    if args.kind == "minimal":
        family = gen_minimal(args.n)
    elif args.kind == "maximal":
        family = gen_maximal(args.n)
    else:
        if args.blocks is None:
            raise FamilyFormatError("gen ospb requires --blocks")
        if seed is None:
            raise FamilyFormatError("gen ospb requires --seed (or PSSKIT_SEED)")
        family = gen_ospb(args.n, _parse_blocks(args.blocks), seed)
    return _write_family(args, family, "gen", seed, tol, t0,
                         summary=f"gen {args.kind}: {family.m} vectors in R^{family.dim}")


def cmd_build(args) -> int:
    tol = _tolerances(args)
    family = load_family(args.file)
    seed = _seed_or_env(args)
    t0 = time.perf_counter()
    extra: dict | None = None
    if args.method == "copies":
        built = build_pkss_copies(family, args.k, tol)
    elif args.method == "global-rotations":
        if seed is None:
            raise FamilyFormatError(
                "build-pkss --method global-rotations requires --seed (or PSSKIT_SEED)"
            )
        built, rotations = build_pkss_global_rotations(family, args.k, seed=seed, tol=tol)
        extra = {"rotations": [rot.tolist() for rot in rotations]}
    else:
        if seed is None:
            raise FamilyFormatError(
                "build-pkss --method blockwise requires --seed (or PSSKIT_SEED)"
            )
        built, plans = build_pkbasis_blockwise(family, args.k, seed, tol)
        extra = {"plans": [plan.to_json_dict() for plan in plans]}
    return _write_family(
        args, built, "build-pkss", seed, tol, t0, extra,
        summary=f"build {args.method}: {built.m} vectors (k={args.k})",
    )


def cmd_gram(args) -> int:
    tol = _tolerances(args)
    family = load_family(args.file)
    t0 = time.perf_counter()
    matrix = gram(family)
    report = RunReport(
        "gram",
        family_digest(family),
        {"entries": matrix.entries.tolist()},
        _ms(t0),
        _tol_dict(tol),
        None,
    )
    _emit(report, f"gram matrix of {family.m} vectors")
    return EXIT_OK


def _ms(t0: float) -> float:
    return round((time.perf_counter() - t0) * 1000.0, 3)


def _tol_dict(tol: Tolerances) -> dict:
    return {
        "zero_tol": tol.zero_tol,
        "rank_tol": tol.rank_tol,
        "dedupe_tol": tol.dedupe_tol,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psskit",
        description="Positive spanning sets: checks, cosine measures, constructions.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10,
                        help="zero threshold (default 1e-10)")
    common.add_argument("--rank-tol", type=float, default=1e-12,
                        help="relative rank cutoff (default 1e-12)")
    common.add_argument("--dedupe-tol", type=float, default=1e-9,
                        help="cosine-distance dedupe threshold (default 1e-9)")

    sub = parser.add_subparsers(dest="command", required=True)

    p_cm = sub.add_parser("cm", parents=[common], help="cosine measure of a family")
    p_cm.add_argument("file")
    p_cm.add_argument("--method", choices=["auto", "generic", "ospb"], default="auto")
    p_cm.add_argument("--max-subsets", type=int, default=1_000_000,
                      help="cap on enumerated subsets; 0 = unlimited")
    p_cm.add_argument("--jobs", type=int, default=1)
    p_cm.set_defaults(handler=cmd_cm)

    p_cmk = sub.add_parser("cmk", parents=[common], help="k-cosine measure")
    p_cmk.add_argument("file")
    p_cmk.add_argument("--k", type=int, required=True)
    p_cmk.add_argument("--max-subsets", type=int, default=1_000_000,
                       help="cap on enumerated subsets; 0 = unlimited")
    p_cmk.add_argument("--jobs", type=int, default=1)
    p_cmk.set_defaults(handler=cmd_cmk)

    p_check = sub.add_parser("check", parents=[common], help="boolean predicates")
    p_check.add_argument("file")
    mode = p_check.add_mutually_exclusive_group(required=True)
    mode.add_argument("--pss", action="store_true", help="positive spanning set")
    mode.add_argument("--pb", action="store_true", help="positive basis")
    mode.add_argument("--ospb", action="store_true", help="orthogonally structured positive basis")
    mode.add_argument("--pkss", type=int, metavar="K", help="positive K-spanning set")
    mode.add_argument("--pkb", type=int, metavar="K", help="positive K-basis")
    mode.add_argument("--crit", metavar="C", help="critical vector, comma-separated floats")
    p_check.set_defaults(handler=cmd_check)

    p_detect = sub.add_parser("detect-ospb", parents=[common],
                              help="block decomposition of a positive basis")
    p_detect.add_argument("file")
    p_detect.set_defaults(handler=cmd_detect)

    p_gen = sub.add_parser("gen", parents=[common], help="generate standard families")
    p_gen.add_argument("kind", choices=["minimal", "maximal", "ospb"])
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--blocks", help="comma-separated block dimensions (ospb)")
    p_gen.add_argument("--seed", type=int)
    p_gen.add_argument("-o", "--out", help="write the family JSON here")
    p_gen.set_defaults(handler=cmd_gen)

    p_build = sub.add_parser("build-pkss", parents=[common],
                             help="construct positive k-spanning sets")
    p_build.add_argument("file")
    p_build.add_argument("--k", type=int, required=True)
    p_build.add_argument("--method",
                         choices=["copies", "global-rotations", "blockwise"],
                         required=True)
    p_build.add_argument("--seed", type=int)
    p_build.add_argument("-o", "--out", help="write the family JSON here")
    p_build.set_defaults(handler=cmd_build)

    p_gram = sub.add_parser("gram", parents=[common], help="Gram matrix of a family")
    p_gram.add_argument("file")
    p_gram.set_defaults(handler=cmd_gram)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except (EnumerationLimitError, ConstructionError, NotPositiveSpanningError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}, indent=2))
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    except (FamilyFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PsskitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
