"""Command-line front end.

Subcommands: norm, witness, equiv, classify, sweep, analyze.  Every run is
deterministic given --seed; outputs embed the parsed configuration so results
are reproducible from the file alone.  Exit codes: 0 success/verified,
1 verification failed, 2 I/O or parse error, 3 invalid parameters.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .analyze import (
    GridFunction,
    build_filter_bank,
    coefficients,
    transform_consistency,
)
from .classify import SpaceDescriptor, classify, classify_cmo, refute_claim
from .equivalence import (
    check_holder_embeddings,
    check_exact_identities,
    check_collapse_b,
    check_collapse_f,
    check_collapse_inhomogeneous,
    random_sample_set,
)
from .seqspace import (
    Family,
    ParamError,
    SequenceFormatError,
    SpaceParams,
    b_type_norm,
    bbmo_norm,
    cmo_norm,
    f_inf_inf_norm,
    f_type_norm,
    load_jsonl,
)
from .witness import certify_separation

INF = math.inf

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_IO = 2
EXIT_PARAMS = 3


def parse_extended(text: str):
    """Parse a CLI number: rationals ('1/2'), 'inf', integers, or floats.

    Rationals and integers stay exact, which keeps classification boundaries
    sharp; decimals become floats.
    """
    text = text.strip().lower()
    if text in ("inf", "infty", "infinity", "oo"):
        return INF
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    try:
        return int(text)
    except ValueError:
        return float(text)


def _threads_from(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("DYADIC_SPACES_THREADS")
    return max(1, int(env)) if env else 1


def _pmap(fn, items, threads: int):
    """Deterministic parallel map: results always in submission order."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _config_echo(args) -> dict:
    # threads and the output path are execution knobs, not part of the
    # mathematical configuration; outputs must be byte-identical across them
    skip = {"func", "threads", "out"}
    out = {}
    for key, val in sorted(vars(args).items()):
        if key in skip:
            continue
        if isinstance(val, Fraction):
            val = str(val)
        elif isinstance(val, Path):
            val = str(val)
        out[key] = val
    out["version"] = __version__
    return out


def _write_json(args, payload: dict) -> None:
    doc = _sanitize({"config": _config_echo(args), **payload})
    text = json.dumps(doc, sort_keys=True, indent=2, default=_json_default) + "\n"
    _write_text(args, text)


def _sanitize(obj):
    """RFC-compliant JSON: infinities become 'inf'/'-inf' strings."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    raise TypeError(f"not JSON serializable: {obj!r}")


def _write_csv(args, fieldnames: list[str], rows: list[dict]) -> None:
    config = json.dumps(
        _sanitize(_config_echo(args)), sort_keys=True, default=_json_default
    )
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames + ["config"], lineterminator="\n")
    writer.writeheader()
    for row in rows:
        row = dict(row)
        row["config"] = config
        writer.writerow(row)
    _write_text(args, buf.getvalue())


def _write_text(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cube_json(cube) -> dict:
    return {"j": cube.level, "k": list(cube.index)}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_norm(args) -> int:
    seq = load_jsonl(args.infile)
    fam = args.family
    if fam == "f":
        nv = f_type_norm(seq, _space_params(Family.F_TYPE, args))
    elif fam == "b":
        nv = b_type_norm(seq, _space_params(Family.B_TYPE, args))
    elif fam == "cmo":
        if args.r is None:
            raise ParamError("--r is required for the cmo family")
        nv = cmo_norm(seq, float(args.s), float(args.q), float(args.r))
    elif fam == "bbmo":
        nv = bbmo_norm(seq, float(args.s), float(args.p), float(args.q))
    elif fam in ("finfinf", "binfinf"):
        nv = f_inf_inf_norm(seq, float(args.s))
    else:  # pragma: no cover - argparse choices guard this
        raise ParamError(f"unknown family {fam}")
    payload = {
        "log2": nv.log2_value,
        "linear": nv.linear_value,
        "attained_at": _cube_json(nv.attained_at),
    }
    if args.format == "json":
        _write_json(args, payload)
    else:
        _write_csv(
            args,
            ["log2", "linear", "attained_j", "attained_k"],
            [
                {
                    "log2": repr(nv.log2_value),
                    "linear": repr(nv.linear_value),
                    "attained_j": nv.attained_at.level,
                    "attained_k": " ".join(map(str, nv.attained_at.index)),
                }
            ],
        )
    return EXIT_OK


def _space_params(family: Family, args) -> SpaceParams:
    return SpaceParams(
        family,
        float(args.s),
        float(args.tau),
        float(args.p),
        float(args.q),
        homogeneous=not args.inhomogeneous,
    )


def cmd_witness(args) -> int:
    depths = tuple(int(d) for d in args.depths.split(","))
    divergent, bounded = certify_separation(
        float(args.s),
        float(args.p),
        float(args.q),
        float(args.tau),
        n=args.dim,
        depths=depths,
        family=args.part,
    )
    ok = divergent.verdict == "diverges" and bounded.verdict == "bounded"
    if args.format == "json":
        _write_json(
            args,
            {
                "divergent": divergent.to_json_dict(),
                "bounded": bounded.to_json_dict(),
                "verified": ok,
            },
        )
    else:
        rows = []
        for rpt, side in ((divergent, "divergent"), (bounded, "bounded")):
            for d, v in zip(rpt.depths, rpt.log2_values):
                rows.append(
                    {"side": side, "space": rpt.space, "depth": d, "log2_norm": repr(v)}
                )
        _write_csv(args, ["side", "space", "depth", "log2_norm"], rows)
    return EXIT_OK if ok else EXIT_VERIFICATION_FAILED


def cmd_equiv(args) -> int:
    threads = _threads_from(args)
    samples = random_sample_set(
        args.seed,
        args.samples,
        dims=(args.dim,),
        depth_1d=args.depth,
        depth_nd=args.depth,
    )
    check = args.check
    s, tau, p, q = args.s, args.tau, args.p, args.q

    def run(batch):
        if check == "collapse-f":
            return check_collapse_f(batch, s, tau, p, q, tol=args.tol)
        if check == "collapse-b":
            return check_collapse_b(batch, s, tau, p, q, tol=args.tol)
        if check == "holder":
            return check_holder_embeddings(batch, s, tau, p, q)
        if check == "identities":
            r = args.r if args.r is not None else 0
            return check_exact_identities(batch, s, p, q, r)
        if check == "inhom-f":
            return check_collapse_inhomogeneous(batch, s, tau, p, q, family="f", tol=args.tol)
        if check == "inhom-b":
            return check_collapse_inhomogeneous(batch, s, tau, p, q, family="b", tol=args.tol)
        raise ParamError(f"unknown check {check}")

    chunks = [samples[i::threads] for i in range(threads)] if threads > 1 else [samples]
    chunks = [c for c in chunks if c]
    reports = _pmap(run, chunks, threads)
    worst_low = min(r.worst_ratio_low for r in reports)
    worst_high = max(r.worst_ratio_high for r in reports)
    base = reports[0]
    ok = all(r.all_ok for r in reports)
    payload = {
        "check": base.check,
        "lower_constant": base.lower_constant,
        "upper_constant": base.upper_constant,
        "worst_ratio_low": worst_low,
        "worst_ratio_high": worst_high,
        "samples": sum(r.samples for r in reports),
        "vacuous": sum(r.vacuous for r in reports),
        "tol": base.tol,
        "all_ok": ok,
    }
    if args.format == "json":
        _write_json(args, payload)
    else:
        # reconstruct original sample ids so row order is thread-independent
        stride = max(len(chunks), 1)
        rows = []
        for chunk_idx, rpt in enumerate(reports):
            for local_id, lo, hi in rpt.rows:
                rows.append((chunk_idx + local_id * stride, lo, hi))
        rows.sort()
        _write_csv(
            args,
            ["sample_id", "ratio_low", "ratio_high"],
            [
                {"sample_id": sid, "ratio_low": repr(lo), "ratio_high": repr(hi)}
                for sid, lo, hi in rows
            ],
        )
    return EXIT_OK if ok else EXIT_VERIFICATION_FAILED


def cmd_classify(args) -> int:
    if args.family == "cmo":
        if args.r is None:
            raise ParamError("--r is required for the cmo family")
        report = classify_cmo(
            args.s, args.q, args.r, dim=args.dim, homogeneous=not args.inhomogeneous
        )
    else:
        fam = {"f": "F_type", "b": "B_type", "bbmo": "BBMO"}[args.family]
        report = classify(
            SpaceDescriptor(
                fam,
                args.s,
                args.tau,
                args.p,
                args.q,
                homogeneous=not args.inhomogeneous,
                dim=args.dim,
            )
        )
    if args.format == "json":
        _write_json(args, {"report": report.to_json_dict()})
    else:
        d = report.to_json_dict()
        _write_csv(
            args,
            ["verdict", "rule", "target_params", "notes", "q_alpha"],
            [
                {
                    "verdict": d["verdict"],
                    "rule": d["rule"],
                    "target_params": json.dumps(d["target_params"], sort_keys=True),
                    "notes": " | ".join(d["notes"]),
                    "q_alpha": d["q_alpha"],
                }
            ],
        )
    return EXIT_OK


def cmd_refute(args) -> int:
    depths = tuple(int(d) for d in args.depths.split(",")) if args.depths else None
    bundle = refute_claim(args.s, args.tau, args.p, args.q, dim=args.dim, depths=depths)
    ok = bundle.divergent.verdict == "diverges" and bundle.bounded.verdict == "bounded"
    _write_json(args, {"bundle": bundle.to_json_dict(), "verified": ok})
    return EXIT_OK if ok else EXIT_VERIFICATION_FAILED


def cmd_sweep(args) -> int:
    taus = [parse_extended(x) for x in args.tau_grid.split(",")]
    ps = [parse_extended(x) for x in args.p_grid.split(",")]
    qs = [parse_extended(x) for x in args.q_grid.split(",")]
    threads = _threads_from(args)
    fam = {"f": "F_type", "b": "B_type"}[args.family]

    cells = [(tau, p, q) for tau in taus for p in ps for q in qs]

    def run(cell):
        tau, p, q = cell
        if fam == "F_type" and float(p) == INF:
            return {
                "tau": str(tau), "p": str(p), "q": str(q),
                "verdict": "invalid", "rule": "Definition 1(i)",
                "ratio_low": "", "ratio_high": "",
            }
        report = classify(SpaceDescriptor(fam, args.s, tau, p, q, True, args.dim))
        row = {
            "tau": str(tau),
            "p": str(p),
            "q": str(q),
            "verdict": report.verdict.value,
            "rule": report.rule,
            "ratio_low": "",
            "ratio_high": "",
        }
        if report.verdict.value in ("F_inf_inf", "B_inf_inf") and args.samples > 0:
            samples = random_sample_set(
                args.seed, args.samples, dims=(args.dim,), depth_1d=6, depth_nd=4
            )
            checker = check_collapse_f if fam == "F_type" else check_collapse_b
            eqr = checker(samples, args.s, tau, p, q, tol=args.tol)
            row["ratio_low"] = repr(eqr.worst_ratio_low)
            row["ratio_high"] = repr(eqr.worst_ratio_high)
        return row

    rows = _pmap(run, cells, threads)
    if args.format == "json":
        _write_json(args, {"cells": rows})
    else:
        _write_csv(
            args, ["tau", "p", "q", "verdict", "rule", "ratio_low", "ratio_high"], rows
        )
    return EXIT_OK


def cmd_analyze(args) -> int:
    bank = build_filter_bank(args.L)
    rng = np.random.default_rng(args.seed)
    if args.signal == "harmonic":
        f = GridFunction.harmonic(args.dim, args.L, 1 << args.j0)
    elif args.signal == "random-bandlimited":
        f = GridFunction.random_bandlimited(
            args.dim, args.L, rng, n_modes=args.modes, j_hi=args.L - 3
        )
    elif args.signal == "sawtooth-smoothed":
        f = GridFunction.sawtooth_smoothed(args.dim, args.L)
    else:  # pragma: no cover
        raise ParamError(f"unknown signal family {args.signal}")
    params = SpaceParams(
        Family.F_TYPE if args.family == "f" else Family.B_TYPE,
        float(args.s),
        float(args.tau),
        float(args.p),
        float(args.q),
    )
    max_level = args.max_level if args.max_level is not None else args.L - 2
    report = transform_consistency(f, bank, params, max_level)
    seq = coefficients(f, bank, max_level)
    payload = {
        "bank": {
            "L": bank.log_resolution,
            "lower_bound_constant": bank.lower_bound_constant,
            "valid_levels": [bank.valid_levels.start, bank.valid_levels.stop - 1],
        },
        "consistency": report.to_json_dict(),
        "coefficients": {"entries": len(seq)},
    }
    _write_json(args, payload)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(sp, *, seed=True):
    sp.add_argument("--out", type=Path, default=None, help="output path (default stdout)")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--threads", type=int, default=None,
                    help="worker cap (default env DYADIC_SPACES_THREADS or 1)")
    if seed:
        sp.add_argument("--seed", type=int, default=0)


def _add_params(sp, *, tau=True, r=True):
    sp.add_argument("--s", type=parse_extended, default=0)
    if tau:
        sp.add_argument("--tau", type=parse_extended, default=0)
    sp.add_argument("--p", type=parse_extended, default=2)
    sp.add_argument("--q", type=parse_extended, default=2)
    if r:
        sp.add_argument("--r", type=parse_extended, default=None)
    sp.add_argument("--dim", type=int, default=1)
    sp.add_argument("--inhomogeneous", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dyadic-spaces",
        description="Norms, equivalences, counterexamples and classification "
        "for dyadic sequence spaces",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("norm", help="evaluate a sequence norm on a JSONL file")
    sp.add_argument("--family", choices=("f", "b", "cmo", "bbmo", "finfinf", "binfinf"),
                    required=True)
    _add_params(sp)
    sp.add_argument("--in", dest="infile", type=Path, required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("witness", help="tower growth certification")
    _add_params(sp, r=False)
    sp.add_argument("--depths", default="4,8,16,32,64")
    sp.add_argument("--part", choices=("f", "b"), default="f")
    _add_common(sp)
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("equiv", help="equivalence checks over random samples")
    sp.add_argument("--check", choices=("collapse-f", "collapse-b", "holder", "identities", "inhom-f", "inhom-b"),
                    required=True)
    _add_params(sp)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--depth", type=int, default=8)
    sp.add_argument("--tol", type=float, default=1e-9)
    _add_common(sp)
    sp.set_defaults(func=cmd_equiv)

    sp = sub.add_parser("classify", help="symbolic parameter classification")
    sp.add_argument("--family", choices=("f", "b", "cmo", "bbmo"), required=True)
    _add_params(sp)
    _add_common(sp, seed=False)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("refute", help="counterexample bundle for the equivalence claim")
    _add_params(sp, r=False)
    sp.add_argument("--depths", default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_refute)

    sp = sub.add_parser("sweep", help="verdict/ratio grid over (tau, p, q)")
    sp.add_argument("--family", choices=("f", "b"), default="f")
    sp.add_argument("--s", type=parse_extended, default=0)
    sp.add_argument("--dim", type=int, default=1)
    sp.add_argument("--tau-grid", default="0,1/4,1/2,1,2")
    sp.add_argument("--p-grid", default="1/2,1,2")
    sp.add_argument("--q-grid", default="1,2,inf")
    sp.add_argument("--samples", type=int, default=50)
    sp.add_argument("--tol", type=float, default=1e-9)
    _add_common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("analyze", help="filter bank + transform consistency")
    sp.add_argument("--L", type=int, default=8)
    sp.add_argument("--signal",
                    choices=("harmonic", "random-bandlimited", "sawtooth-smoothed"),
                    default="random-bandlimited")
    sp.add_argument("--j0", type=int, default=3)
    sp.add_argument("--modes", type=int, default=20)
    sp.add_argument("--family", choices=("f", "b"), default="f")
    _add_params(sp, r=False)
    sp.add_argument("--max-level", type=int, default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_analyze)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except SequenceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParamError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
