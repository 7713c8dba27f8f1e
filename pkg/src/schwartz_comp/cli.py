"""Command-line entry point.

Exit codes: 0 Holds/Closed, 1 Fails/NotClosed, 2 Inconclusive, 3 error
(usage errors included, so that 2 always means an undecided analysis).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from typing import Any

import numpy as np

from . import __version__
from .closed_range import AssumptionSet, decide
from .config import load_config
from .corpus import BUILTIN, load_corpus, run_corpus, summary_table
from .expr import expr_to_text, parse, to_text
from .faa_di_bruno import compose_derivative, compose_derivative_at
from .multipliers import closed_range_multiplier
from .norms import seminorm_csv_rows, seminorm_pi
from .numeric import Region
from .symbols import analyze_symbol
from .witnesses import build_witness_cond_i, build_witness_cond_ii, lemma1_witness, noncompact_family

SCHEMA = "schwartz-comp/report/1"
EXIT = {"Holds": 0, "Closed": 0, "Fails": 1, "NotClosed": 1, "Inconclusive": 2}
CSV_HEADER = ("x", "j", "m", "value", "log_value")
WORKERS_ENV = "SCHWARTZ_COMP_WORKERS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, (set, tuple)):
        return list(o)
    return str(o)


def _clean(o):
    """Replace non-finite floats by strings so the JSON stays standard."""
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if isinstance(o, dict):
        return {str(k): _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def dump_json(report: dict[str, Any]) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, default=_json_default, allow_nan=False) + "\n"


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow(r)


def _text_lines(obj, indent: int = 0, out=None, limit: int = 12) -> list[str]:
    out = [] if out is None else out
    pad = "  " * indent
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            v = obj[k]
            if isinstance(v, (dict, list)):
                out.append(f"{pad}{k}:")
                _text_lines(v, indent + 1, out, limit)
            else:
                out.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj[:limit]):
            if isinstance(v, (dict, list)):
                out.append(f"{pad}- [{i}]")
                _text_lines(v, indent + 1, out, limit)
            else:
                out.append(f"{pad}- {v}")
        if len(obj) > limit:
            out.append(f"{pad}... ({len(obj) - limit} more)")
    else:
        out.append(f"{pad}{obj}")
    return out


# ---------------------------------------------------------------------------
# subcommands; each returns (status word or None, result dict, optional text)


def cmd_parse(args, cfg):
    f = parse(args.expr)
    pieces = [{"interval": p.interval_text(), "expr": expr_to_text(p.expr), "origin": p.origin} for p in f.pieces]
    res = {"text": to_text(f), "pieces": pieces, "polynomial": f.is_polynomial(), "joins": list(f.joins)}
    return None, res, to_text(f)


def cmd_compose(args, cfg):
    f, phi = parse(args.f), parse(args.phi)
    if args.at is not None:
        v = float(compose_derivative_at(f, phi, args.n, [args.at])[0])
        return None, {"n": args.n, "at": args.at, "value": v}, repr(v)
    g = compose_derivative(f, phi, args.n)
    return None, {"n": args.n, "derivative": to_text(g)}, to_text(g)


def cmd_seminorm(args, cfg):
    f = parse(args.f)
    region = Region.parse(args.region)
    est = seminorm_pi(f, args.n, region, cfg)
    if args.emit_csv:
        _write_csv(args.emit_csv, CSV_HEADER, seminorm_csv_rows(f, args.n, region, cfg))
    status = {"decaying": "Holds", "growing": "Fails"}.get(est.tail_status, "Inconclusive")
    return status, est.to_dict(), f"pi_{args.n} >= {est.value:.10g} at x={est.witness[0] if est.witness else None}"


def cmd_symbol(args, cfg):
    rep = analyze_symbol(parse(args.phi), args.max_j, cfg)
    v = rep.symbol
    return v.status.value, rep.to_dict(), None


def cmd_multiplier(args, cfg):
    F = parse(args.F)
    res = closed_range_multiplier(F, Region.parse(args.region), cfg)
    out = res.to_dict()
    if res.verdict.ok:
        out["reverified"] = res.reverify(F, cfg)
    return res.verdict.status.value, out, None


def cmd_closed_range(args, cfg):
    cand = parse(args.f_candidate) if args.f_candidate else None
    v = decide(parse(args.phi), AssumptionSet(cinf_closed_range=args.cinf), cfg, cand)
    return v.status, v.to_dict(), f"{v.status} via {', '.join(v.fired) or 'no rule'}"


def cmd_witness(args, cfg):
    phi = parse(args.phi)
    if args.violation == "lemma1":
        f, rep = lemma1_witness(phi, args.count, cfg)
        text = to_text(f)
    elif args.violation == "i":
        series, rep = build_witness_cond_i(phi, args.n, args.count, cfg)
        text = series.to_text() if series is not None else None
        if series is not None:
            rep["series"] = series.to_dict()
    else:
        series, rep = build_witness_cond_ii(phi, args.count, cfg)
        text = series.to_text() if series is not None else None
        if series is not None:
            rep["series"] = series.to_dict()
    rep["function"] = text
    if args.emit_csv and rep.get("rows"):
        cols = list(rep["rows"][0])
        _write_csv(args.emit_csv, cols, ([r[c] for c in cols] for r in rep["rows"]))
    return rep["status"], rep, text


def cmd_noncompact(args, cfg):
    try:
        a, b = (float(s) for s in args.interval.split(","))
    except ValueError as exc:
        raise UsageError("--interval expects a,b") from exc
    fam = noncompact_family(parse(args.phi), a, b, args.p, args.eps, args.count)
    ok = fam.verify()
    out = fam.to_dict() | {"verified": ok}
    if args.emit_csv:
        _write_csv(args.emit_csv, ("j", "omega", "amplitude", "norm_p_minus_1", "sup_f_p", "sup_composed_p"),
                   ((m.j, m.omega, m.amplitude, m.norm_pm1, m.sup_p, m.sup_composed) for m in fam.members))
    return ("Holds" if ok else "Fails"), out, None


def cmd_corpus(args, cfg):
    try:
        entries = load_corpus(args.file) if args.file else list(BUILTIN)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    workers = args.workers or int(os.environ.get(WORKERS_ENV, "1") or 1)
    rep = run_corpus(entries, cfg, workers)
    status = "Holds" if not rep["mismatches"] else "Fails"
    return status, rep, summary_table(rep)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="schwartz-comp", description="Composition operators on the Schwartz space: checks and witnesses.")
    p.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one config key")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--emit-csv", help="write the table of the command as CSV")
    common.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("parse", parents=[common], help="parse and normalize an expression")
    s.add_argument("expr")
    s.set_defaults(run=cmd_parse)

    s = sub.add_parser("compose-deriv", parents=[common], help="n-th derivative of f o phi")
    s.add_argument("--f", required=True)
    s.add_argument("--phi", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--at", type=float)
    s.set_defaults(run=cmd_compose)

    s = sub.add_parser("seminorm", parents=[common], help="lower bound for pi_n(f) with tail status")
    s.add_argument("--f", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--region", default="full")
    s.set_defaults(run=cmd_seminorm)

    s = sub.add_parser("symbol-check", parents=[common], help="is phi a symbol")
    s.add_argument("--phi", required=True)
    s.add_argument("--max-j", type=int)
    s.set_defaults(run=cmd_symbol)

    s = sub.add_parser("multiplier-check", parents=[common], help="closed range of the multiplier M_F")
    s.add_argument("--F", required=True)
    s.add_argument("--region", default="full")
    s.set_defaults(run=cmd_multiplier)

    s = sub.add_parser("closed-range", parents=[common], help="rule-based closed-range verdict for C_phi")
    s.add_argument("--phi", required=True)
    s.add_argument("--cinf", choices=("yes", "no", "auto"), default="auto")
    s.add_argument("--f-candidate")
    s.set_defaults(run=cmd_closed_range)

    s = sub.add_parser("witness", parents=[common], help="build a counterexample witness")
    s.add_argument("--phi", required=True)
    s.add_argument("--violation", choices=("lemma1", "i", "ii"), required=True)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--count", type=int, default=8)
    s.set_defaults(run=cmd_witness)

    s = sub.add_parser("noncompact-demo", parents=[common], help="bounded family with unbounded images")
    s.add_argument("--phi", required=True)
    s.add_argument("--interval", required=True)
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--eps", type=float, default=1.0)
    s.add_argument("--count", type=int, default=20)
    s.set_defaults(run=cmd_noncompact)

    s = sub.add_parser("corpus", parents=[common], help="run the regression corpus")
    s.add_argument("--file", help="JSON corpus file (default: built-in corpus)")
    s.add_argument("--workers", type=int, help=f"process count (default ${WORKERS_ENV} or 1)")
    s.set_defaults(run=cmd_corpus)
    return p


def _overrides(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v
    return out


def _input_echo(args) -> dict[str, Any]:
    skip = {"run", "config", "set", "format", "output", "emit_csv", "timing", "workers"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv: list[str] | None = None) -> int:
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config, _overrides(args.set))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 3
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (KeyError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    try:
        status, result, text = args.run(args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # every analysis error maps to exit 3
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    report = {"schema": SCHEMA, "tool_version": __version__, "command": args.command, "config": cfg.to_dict(),
              "input": _input_echo(args), "status": status, "result": result}
    if args.timing:
        report["wall_clock_s"] = round(time.perf_counter() - t0, 3)
    if args.format == "json":
        body = dump_json(report)
    else:
        lines = [f"{args.command}: {status}" if status else args.command]
        lines.append(text if text is not None else "\n".join(_text_lines(result)))
        body = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return EXIT.get(status, 0) if status else 0


if __name__ == "__main__":
    sys.exit(main())
