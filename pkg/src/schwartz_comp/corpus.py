"""Built-in regression corpus: inputs with their expected verdicts."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

from .closed_range import decide
from .config import DEFAULT, Config
from .expr import parse
from .multipliers import closed_range_multiplier
from .numeric import Region
from .symbols import is_symbol

SIGN_EXP_ABS = "piecewise((-inf,-1]: -exp(-x); [1,inf): exp(x); blend: 8)"
SIGN_EXP_SQ = "piecewise((-inf,-1]: -exp(x^2); [1,inf): exp(x^2); blend: 8)"
PHI_HAT_1 = "piecewise((-inf,0]: -exp(-x)+2; [1,inf): x; blend: 8)"
# x0 = 2.678347 (rational); linear branch of slope -1 from 2 x0
PHI_HAT_2 = ("piecewise((-inf,2678347/1000000]: x*exp(-x); "
             "[2678347/500000,inf): 2678347/500000 - x + 1/(2*e); blend: 8)")
PHI_HAT_2_PRIME_REGION = "5.356694:inf"

KINDS = ("symbol", "multiplier", "closed-range")


@dataclass(frozen=True)
class CorpusEntry:
    """``expected`` is ``Holds`` / ``Fails(<part>)`` for symbols, ``Holds|Fails`` for
    multipliers and ``Closed|NotClosed`` for closed range; ``rules`` must all fire."""

    name: str
    kind: str
    input: str
    expected: str
    region: str = "full"
    rules: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown corpus kind {self.kind!r}")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CorpusEntry":
        return cls(d["name"], d["kind"], d["input"], d["expected"], d.get("region", "full"), tuple(d.get("rules", ())))


BUILTIN: tuple[CorpusEntry, ...] = (
    CorpusEntry("sym-x", "symbol", "x", "Holds"),
    CorpusEntry("sym-x2+1", "symbol", "x^2+1", "Holds"),
    CorpusEntry("sym-x3", "symbol", "x^3", "Holds"),
    CorpusEntry("sym-exp-x2", "symbol", "exp(x^2)", "Holds"),
    CorpusEntry("sym-sign-exp-abs", "symbol", SIGN_EXP_ABS, "Holds"),
    CorpusEntry("sym-sin", "symbol", "sin(x)", "Fails(lemma1)"),
    CorpusEntry("sym-exp", "symbol", "exp(x)", "Fails(lemma1)"),
    CorpusEntry("sym-const", "symbol", "3", "Fails(lemma1)"),
    CorpusEntry("sym-log", "symbol", "1+log(1+x^2)", "Fails(condition_ii)"),
    CorpusEntry("sym-osc", "symbol", "x+sin(exp(x^2))", "Fails(condition_i)"),
    CorpusEntry("mul-one", "multiplier", "1", "Holds"),
    CorpusEntry("mul-2x", "multiplier", "2*x", "Holds"),
    CorpusEntry("mul-3x2", "multiplier", "3*x^2", "Holds"),
    CorpusEntry("mul-gauss", "multiplier", "exp(-x^2)", "Fails"),
    CorpusEntry("mul-phi2-prime", "multiplier", "-1", "Holds", PHI_HAT_2_PRIME_REGION),
    CorpusEntry("cr-x2", "closed-range", "x^2", "Closed", rules=("suf-om",)),
    CorpusEntry("cr-x", "closed-range", "x", "Closed", rules=("suf-om",)),
    CorpusEntry("cr-phi2", "closed-range", PHI_HAT_2, "Closed", rules=("suf-nonsurj",)),
    CorpusEntry("cr-sign-exp-abs", "closed-range", SIGN_EXP_ABS, "NotClosed", rules=("asterisco",)),
    CorpusEntry("cr-sign-exp-sq", "closed-range", SIGN_EXP_SQ, "NotClosed", rules=("asterisco",)),
    CorpusEntry("cr-phi1", "closed-range", PHI_HAT_1, "NotClosed", rules=("asterisco",)),
)


def load_corpus(path: str | Path) -> list[CorpusEntry]:
    """JSON list of entries (objects with name, kind, input, expected[, region, rules])."""
    data = json.loads(Path(path).read_text() or "[]")
    if not isinstance(data, list) or not data:
        raise ValueError(f"corpus file {path} holds no entries")
    return [CorpusEntry.from_dict(d) for d in data]


def run_entry(entry: CorpusEntry, cfg: Config = DEFAULT) -> dict[str, Any]:
    f = parse(entry.input)
    out: dict[str, Any] = {"entry": asdict(entry) | {"rules": list(entry.rules)}}
    if entry.kind == "symbol":
        v = is_symbol(f, None, cfg)
        actual = v.status.value if not v.failed else f"Fails({v.notes.get('failed', '?')})"
        out["result"] = v.to_dict()
        fired: list[str] = []
    elif entry.kind == "multiplier":
        res = closed_range_multiplier(f, Region.parse(entry.region), cfg)
        actual = res.verdict.status.value
        out["result"] = res.to_dict()
        if res.verdict.ok:
            out["reverified"] = res.reverify(f, cfg)
        fired = []
    else:
        verdict = decide(f, cfg=cfg)
        actual = verdict.status
        out["result"] = verdict.to_dict()
        fired = verdict.fired
    missing = [r for r in entry.rules if r not in fired]
    out["actual"] = actual
    out["match"] = actual == entry.expected and not missing and out.get("reverified", True)
    if missing:
        out["missing_rules"] = missing
    return out


def _run_one(args):
    entry, cfg = args
    return run_entry(entry, cfg)


def run_corpus(entries=BUILTIN, cfg: Config = DEFAULT, workers: int = 1) -> dict[str, Any]:
    """Run every entry; the summary is independent of worker count and timing."""
    entries = list(entries)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_one, [(e, cfg) for e in entries]))
    else:
        rows = [run_entry(e, cfg) for e in entries]
    mism = [r["entry"]["name"] for r in rows if not r["match"]]
    return {"entries": rows, "total": len(rows), "matched": len(rows) - len(mism), "mismatches": mism}


def summary_table(report: dict[str, Any]) -> str:
    lines = [f"{'name':<22} {'kind':<13} {'expected':<22} {'actual':<22} ok"]
    for r in report["entries"]:
        e = r["entry"]
        lines.append(f"{e['name']:<22} {e['kind']:<13} {e['expected']:<22} {r['actual']:<22} {'yes' if r['match'] else 'NO'}")
    lines.append(f"{report['matched']}/{report['total']} matched")
    return "\n".join(lines)
