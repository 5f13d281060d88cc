"""Command-line surface: orbit counting, point evaluation, truncated
series, independence certificates, thresholds, verification suites, and
class-n presentation construction.

Exit codes: 0 success / certified / all checks pass; 1 inconclusive or
failed checks; 2 usage or input-file errors; 3 search budget exceeded.
Outputs are deterministic for a fixed configuration (seed included, no
timestamps) and are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .checks import SUITES, run_suite
from .eigenfunctions import SphericalParams, psi, psi_abs
from .groups import (
    BudgetExceeded,
    GroupFileError,
    GrowthConstants,
    enumerate_ball,
    epsilon_upper,
    fit_growth,
    load_presentation,
    save_presentation,
    standard_class_n,
    word_str,
)
from .poincare import (
    DivergentTail,
    InvalidEpsilon,
    independence_certificate,
    truncated_series,
)
from .psl2 import AdS3Point, GroupElement, boost
from .thresholds import ThresholdInputs, eta, m_gamma, m_threshold, m_tilde

EXIT_OK = 0
EXIT_INCONCLUSIVE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("ADS3_WORKERS", "1")))
    except ValueError:
        return 1


def _jsonify(obj):
    """JSON-ready copy with IEEE infinities rendered as the string 'inf'."""
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def _write_atomic(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(target.parent) or ".", prefix=target.name)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, str(target))
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _emit(text: str, output: str | None) -> None:
    if output:
        _write_atomic(output, text)
    else:
        sys.stdout.write(text)


def _parse_entries(raw: str, what: str) -> GroupElement:
    try:
        vals = [float(v) for v in raw.split(",")]
    except ValueError:
        raise SystemExit(_usage_error(f"{what}: entries must be numbers, got {raw!r}"))
    if len(vals) != 4:
        raise SystemExit(_usage_error(f"{what}: need 4 comma-separated entries"))
    try:
        return GroupElement(tuple(vals))
    except ValueError as exc:
        raise SystemExit(_usage_error(f"{what}: {exc}"))


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _parse_growth(raw: str) -> GrowthConstants:
    try:
        a_str, rate_str = raw.split(",")
        return GrowthConstants.user(float(a_str), float(rate_str))
    except (ValueError, TypeError):
        raise SystemExit(_usage_error(f"--growth expects 'A,a', got {raw!r}"))


def _resolve_growth(args, pres) -> GrowthConstants:
    if args.growth:
        return _parse_growth(args.growth)
    return fit_growth(
        pres,
        AdS3Point.origin(),
        r_max=args.fit_rmax,
        grid_step=args.fit_step,
        max_word_len=args.max_word_len,
        node_budget=args.budget,
    )


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="seed recorded in reports")
    p.add_argument("--budget", type=int, default=10_000_000, help="word-search node cap")
    p.add_argument("--output", "-o", default=None, help="write here instead of stdout")


def cmd_orbit(args) -> int:
    pres = load_presentation(args.group)
    x = AdS3Point(_parse_entries(args.x, "--x"))
    radii = _parse_radii(args)
    rows = []
    ball = None
    for r in radii:
        ball = enumerate_ball(pres, x, r, args.max_word_len, args.budget)
        rows.append({"R": r, "count": ball.count(), "exhaustive": ball.exhaustive})
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["R", "count", "exhaustive"])
        for row in rows:
            writer.writerow([row["R"], row["count"], row["exhaustive"]])
        _emit(buf.getvalue(), args.output)
    else:
        report = {
            "version": __version__,
            "seed": args.seed,
            "workers": _workers(),
            "label": pres.label,
            "x": list(x.four_vector),
            "max_word_len": args.max_word_len,
            "rows": rows,
        }
        _emit(json.dumps(_jsonify(report), indent=2) + "\n", args.output)
    if args.dump_elements and ball is not None:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["word", "movedNorm"])
        for e in ball.elements:
            writer.writerow([word_str(e.word, len(pres.generators)), f"{e.moved_norm:.12g}"])
        _write_atomic(args.dump_elements, buf.getvalue())
    return EXIT_OK


def _parse_radii(args) -> list[float]:
    if args.radii:
        try:
            return [float(v) for v in args.radii.split(",")]
        except ValueError:
            raise SystemExit(_usage_error(f"--radii expects numbers, got {args.radii!r}"))
    try:
        start, stop, step = (float(v) for v in args.rgrid.split(":"))
    except ValueError:
        raise SystemExit(_usage_error(f"--rgrid expects 'start:stop:step', got {args.rgrid!r}"))
    if step <= 0 or stop < start:
        raise SystemExit(_usage_error("--rgrid needs step > 0 and stop >= start"))
    out = []
    r = start
    while r <= stop + 1e-12:
        out.append(round(r, 12))
        r += step
    return out


def cmd_eval(args) -> int:
    p = SphericalParams(args.m, args.k)
    x = AdS3Point(_parse_entries(args.point, "--point"))
    value = psi(p, x)
    report = {
        "version": __version__,
        "seed": args.seed,
        "m": args.m,
        "k": args.k,
        "point": list(x.four_vector),
        "re": value.real,
        "im": value.imag,
        "abs": abs(value),
        "abs_from_norm": psi_abs(p, x.norm()),
        "eigenvalue": p.eigenvalue(),
    }
    _emit(json.dumps(_jsonify(report), indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_series(args) -> int:
    pres = load_presentation(args.group)
    growth = _resolve_growth(args, pres)
    p = SphericalParams(args.m, args.k)
    x = AdS3Point(_parse_entries(args.point, "--point"))
    value = truncated_series(
        pres, p, x, args.truncation_radius, growth, args.max_word_len, args.budget
    )
    report = {
        "version": __version__,
        "seed": args.seed,
        "label": pres.label,
        "m": args.m,
        "k": args.k,
        "point": list(x.four_vector),
        "truncation_radius": args.truncation_radius,
        "growth": {"A": growth.A, "a": growth.a, "provenance": growth.provenance},
        "re": complex(value.value).real,
        "im": complex(value.value).imag,
        "error_radius": value.error_radius,
    }
    _emit(json.dumps(_jsonify(report), indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_certify(args) -> int:
    if args.k < 1:
        raise SystemExit(_usage_error("--k must be a positive integer"))
    pres = load_presentation(args.group)
    growth = _resolve_growth(args, pres)
    if args.eps_gamma is not None:
        eps_gamma = args.eps_gamma
    else:
        eps_gamma = epsilon_upper(pres, args.eps_gamma_depth, args.budget)
    try:
        cert = independence_certificate(
            pres,
            args.m,
            args.k,
            args.eps,
            growth,
            eps_gamma,
            R0=args.truncation_radius,
            max_word_len=args.max_word_len,
            node_budget=args.budget,
            seed=args.seed,
        )
    except DivergentTail as exc:
        report = {
            "version": __version__,
            "seed": args.seed,
            "label": pres.label,
            "m": args.m,
            "k": args.k,
            "eps": args.eps,
            "eps_gamma": eps_gamma,
            "growth": {"A": growth.A, "a": growth.a, "provenance": growth.provenance},
            "verdict": "inconclusive",
            "reason": str(exc),
        }
        _emit(json.dumps(_jsonify(report), indent=2) + "\n", args.output)
        return EXIT_INCONCLUSIVE
    _emit(cert.to_json(), args.output)
    return EXIT_OK if cert.certified else EXIT_INCONCLUSIVE


def cmd_thresholds(args) -> int:
    ti = ThresholdInputs(args.C, args.a, args.eps, args.s)
    delta = args.delta if args.delta is not None else args.eps
    candidates = [(g.A, g.a) for g in map(_parse_growth, args.growth or [])]
    report = {
        "version": __version__,
        "inputs": {
            "C": args.C,
            "a": args.a,
            "eps": args.eps,
            "delta": delta,
            "s": args.s,
            "k": args.k,
            "eps_gamma": args.eps_gamma,
            "n": args.n,
            "r": args.r,
            "growth_candidates": [[A, rate] for A, rate in candidates],
        },
        "m_threshold": m_threshold(ti),
        "m_tilde": m_tilde(args.C, args.a, delta, args.s),
        "m_gamma": m_gamma(args.k, candidates, args.eps_gamma),
        "eta": eta(args.n, args.r),
    }
    _emit(json.dumps(_jsonify(report), indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    selectors = args.suite.split(",") if args.suite else None
    try:
        report = run_suite(selectors, seed=args.seed)
    except ValueError as exc:
        raise SystemExit(_usage_error(str(exc)))
    report = {"version": __version__, **report}
    _emit(json.dumps(_jsonify(report), indent=2) + "\n", args.output)
    return EXIT_OK if report["pass"] else EXIT_INCONCLUSIVE


def cmd_class_n(args) -> int:
    gens = []
    for t in args.boost or []:
        gens.append(boost(t))
    for raw in args.gen or []:
        gens.append(_parse_entries(raw, "--gen"))
    if not gens:
        raise SystemExit(_usage_error("need at least one --boost or --gen generator"))
    try:
        pres = standard_class_n(gens, args.n, args.r, label=args.label)
    except ValueError as exc:
        raise SystemExit(_usage_error(str(exc)))
    if args.output:
        save_presentation(pres, args.output)
    else:
        from .groups import presentation_to_dict

        sys.stdout.write(json.dumps(presentation_to_dict(pres), indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ads3",
        description="Orbit counting, eigenfunction averages, and independence "
        "certificates on anti-de Sitter 3-manifolds.",
    )
    parser.add_argument("--version", action="version", version=f"ads3 {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", help="orbit counts over a radius grid")
    p.add_argument("group", help="presentation JSON file")
    p.add_argument("--x", default="1,0,0,1", help="base point as a,b,c,d (default: origin)")
    p.add_argument("--rgrid", default="1:10:1", help="radius grid start:stop:step")
    p.add_argument("--radii", default=None, help="explicit comma-separated radii")
    p.add_argument("--max-word-len", type=int, default=24)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--dump-elements", default=None, help="also write word,movedNorm CSV here")
    _add_common(p)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("eval", help="evaluate an eigenfunction at a point")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--point", default="1,0,0,1")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("series", help="certified truncated group average")
    p.add_argument("group")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--point", default="1,0,0,1")
    p.add_argument("--truncation-radius", type=float, default=20.0)
    p.add_argument("--growth", default=None, help="growth constants as 'A,a'")
    p.add_argument("--fit-rmax", type=float, default=16.0)
    p.add_argument("--fit-step", type=float, default=1.0)
    p.add_argument("--max-word-len", type=int, default=48)
    _add_common(p)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("certify", help="independence certificate for k averages")
    p.add_argument("group")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--eps-gamma", type=float, default=None,
                   help="certified separation lower bound (recommended)")
    p.add_argument("--eps-gamma-depth", type=int, default=8,
                   help="fallback: use the depth-N enumeration upper bound")
    p.add_argument("--truncation-radius", type=float, default=20.0)
    p.add_argument("--growth", default=None, help="growth constants as 'A,a'")
    p.add_argument("--fit-rmax", type=float, default=16.0)
    p.add_argument("--fit-step", type=float, default=1.0)
    p.add_argument("--max-word-len", type=int, default=48)
    _add_common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("thresholds", help="explicit threshold quantities as JSON")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eps-gamma", type=float, default=1.0)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--growth", action="append", default=None,
                   help="growth candidate 'A,a' (repeatable; none means empty set)")
    _add_common(p)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", default=None,
                   help=f"comma-separated subset of: {', '.join(SUITES)}")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("class-n", help="build a standard class-n presentation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--boost", type=float, action="append",
                   help="first-factor boost generator a(t) (repeatable)")
    p.add_argument("--gen", action="append",
                   help="first-factor generator as a,b,c,d (repeatable)")
    p.add_argument("--label", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_class_n)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GroupFileError as exc:
        print(f"error: group file field {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvalidEpsilon as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
