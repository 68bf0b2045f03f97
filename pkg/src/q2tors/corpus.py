"""Curve corpus files and verification reports."""
from __future__ import annotations

import dataclasses
import time
from importlib import resources
from pathlib import Path

from .arith.integers import squarefree_part
from .ec import Curve, normalize_model, twist_curve
from .errors import FactorizationFailure, ParseError, Q2TorsError, SearchBudgetExceeded, SingularCurve
from .mqfield import MQElem, MQTower, format_elem, make_tower, parse_elem
from .torsion import (
    full_torsion,
    group_label,
    invariant_cyclic_subgroups,
    verify_bounds,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


@dataclasses.dataclass
class CurveRecord:
    label: str
    base: tuple[int, ...]
    kind: str  # "ainv" or "short"
    coeffs: list[MQElem]
    expected: tuple[int, int] | None = None
    twist: MQElem | None = None
    line: int = 0

    @property
    def tower(self) -> MQTower:
        return make_tower(self.base)

    def curve(self) -> Curve:
        K = self.tower
        if self.kind == "ainv":
            E = Curve(self.coeffs, K)
        else:
            E = Curve.short(self.coeffs[0], self.coeffs[1], K)
        if self.twist is not None:
            E, _ = normalize_model(E)
            E = twist_curve(E, self.twist)
        return E


def _field_spans(line: str):
    """Split at `|`, keeping each field's 1-based start column."""
    out = []
    start = 0
    for i, ch in enumerate(line + "|"):
        if ch == "|":
            raw = line[start:i]
            lead = len(raw) - len(raw.lstrip())
            out.append((raw.strip(), start + lead + 1))
            start = i + 1
    return out


def _literals(body: str, col: int, ln: int, K: MQTower) -> list[MQElem]:
    vals = []
    pos = 0
    for piece in body.split(","):
        lead = len(piece) - len(piece.lstrip())
        c = col + pos + lead
        e = parse_elem(piece.strip(), ln, c - 1)
        if not K.contains_tower(e.tower):
            raise ParseError(f"literal {piece.strip()!r} is not in the base field", ln, c)
        vals.append(e.to_tower(K))
        pos += len(piece) + 1
    return vals


def parse_record(line: str, ln: int = 0) -> CurveRecord:
    fields = _field_spans(line)
    head, col = fields[0]
    if not head.startswith("curve"):
        raise ParseError("record must start with `curve <label>`", ln, col)
    label = head[5:].strip()
    if not label or " " in label:
        raise ParseError("missing or malformed label", ln, col)
    base_gens = None
    kind = coeffs = None
    expected = twist = None
    pending = []
    for text, col in fields[1:]:
        key, _, body = text.partition(" ")
        body_col = col + len(key) + 1 + (len(body) - len(body.lstrip()))
        body = body.strip()
        if key == "base":
            gens = []
            if body:
                off = 0
                for piece in body.split(","):
                    p = piece.strip()
                    try:
                        m = int(p)
                    except ValueError:
                        raise ParseError(f"bad base generator {p!r}", ln, body_col + off) from None
                    if m == 0:
                        raise ParseError("base generator 0", ln, body_col + off)
                    sq, _ = squarefree_part(m)
                    if sq != 1:
                        gens.append(sq)
                    off += len(piece) + 1
            base_gens = tuple(make_tower(gens).gens)
        elif key in ("ainv", "short"):
            if kind is not None:
                raise ParseError("model given twice", ln, col)
            kind = key
            pending.append(("model", body, body_col))
        elif key == "twist":
            pending.append(("twist", body, body_col))
        elif key == "expect":
            try:
                d1, d2 = (int(t) for t in body.split(","))
            except ValueError:
                raise ParseError("expect needs two integers d1,d2", ln, body_col) from None
            if d1 < 1 or d2 % d1:
                raise ParseError("expected invariants need d1 | d2", ln, body_col)
            expected = (d1, d2)
        else:
            raise ParseError(f"unknown field {key!r}", ln, col)
    if base_gens is None:
        raise ParseError("missing base field", ln, len(line) + 1)
    if kind is None:
        raise ParseError("missing model (ainv or short)", ln, len(line) + 1)
    K = make_tower(base_gens)
    for what, body, c in pending:
        vals = _literals(body, c, ln, K)
        if what == "model":
            need = 5 if kind == "ainv" else 2
            if len(vals) != need:
                raise ParseError(f"{kind} needs {need} coefficients, got {len(vals)}", ln, c)
            coeffs = vals
        else:
            if len(vals) != 1 or vals[0].is_zero():
                raise ParseError("twist needs one nonzero element", ln, c)
            twist = vals[0]
    rec = CurveRecord(label, base_gens, kind, coeffs, expected, twist, ln)
    rec.curve()  # validates nonsingularity
    return rec


def parse_corpus_text(text: str) -> list[CurveRecord]:
    out = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        try:
            out.append(parse_record(line, ln))
        except SingularCurve as e:
            raise SingularCurve(f"line {ln}: {e}") from None
    return out


def parse_corpus(path) -> list[CurveRecord]:
    return parse_corpus_text(Path(path).read_text(encoding="utf-8"))


def bundled(name: str) -> str:
    return resources.files("q2tors").joinpath("data", name).read_text(encoding="utf-8")


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("q2tors").joinpath("data", name)))


# ---------------------------------------------------------------------------
# reports

def _point_json(P, tower_of=None):
    t = P.x.support_tower().join(P.y.support_tower())
    return {"x": format_elem(P.x.to_tower(t)), "y": format_elem(P.y.to_tower(t)), "tower": list(t.gens)}


def torsion_record(E: Curve, label: str = "", base=(), levels=None, verify=False, bounds=False) -> dict:
    rep = full_torsion(E, verify=verify, levels=levels)
    st = rep.structure
    S = rep.setup
    gens = st.generators
    if S.change is not None:
        gens = [S.change.from_short(P, S.original) for P in gens]
    out = {
        "label": label,
        "base": list(base),
        "torsion": {
            "invariants": list(st.invariants),
            "generators": [_point_json(P) for P in gens],
        },
        "conformance": {"fujita": rep.fujita, "main": rep.main},
        "bounds": [{"claim": b.claim, "pass": b.passed} for b in verify_bounds(rep)] if bounds else [],
        "isogenies": sorted(c.order for c in invariant_cyclic_subgroups(rep) if c.order > 1),
    }
    out["_report"] = rep
    return out


@dataclasses.dataclass
class VerifyResult:
    code: int
    records: list
    summary: dict


def run_verify(records, conformance: str = "main", bounds: bool = False, levels=None) -> VerifyResult:
    rows = []
    mismatches = resource = errors = 0
    for rec in records:
        t0 = time.perf_counter()
        row = {"label": rec.label, "base": list(rec.base)}
        try:
            res = torsion_record(rec.curve(), rec.label, rec.base, levels, verify=bounds, bounds=bounds)
            res.pop("_report")
            row.update(res)
            inv = tuple(res["torsion"]["invariants"])
            problems = []
            if rec.expected is not None and inv != rec.expected:
                problems.append({"field": "torsion", "expected": group_label(rec.expected), "computed": group_label(inv)})
            conf = res["conformance"]
            if conformance == "fujita" and conf["fujita"] is False:
                problems.append({"field": "fujita", "computed": group_label(inv)})
            if conformance in ("main", "fujita") and conf["main"] is False:
                problems.append({"field": "main", "computed": group_label(inv)})
            for b in res["bounds"]:
                if not b["pass"]:
                    problems.append({"field": "bound", "claim": b["claim"]})
            row["expected"] = list(rec.expected) if rec.expected else None
            row["status"] = "pass" if not problems else "mismatch"
            row["diff"] = problems
            mismatches += bool(problems)
        except (SearchBudgetExceeded, FactorizationFailure) as e:
            row["status"] = "resource"
            row["error"] = f"{type(e).__name__}: {e}"
            resource += 1
        except Q2TorsError as e:
            row["status"] = "error"
            row["error"] = f"{type(e).__name__}: {e}"
            errors += 1
        row["seconds"] = round(time.perf_counter() - t0, 3)
        rows.append(row)
    passed = sum(r["status"] == "pass" for r in rows)
    code = EXIT_OK
    if mismatches or errors:
        code = EXIT_MISMATCH
    if resource:
        code = EXIT_RESOURCE
    summary = {"records": len(rows), "passed": passed, "mismatches": mismatches, "resource": resource, "errors": errors}
    return VerifyResult(code, rows, summary)
