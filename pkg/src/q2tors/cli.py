"""Command-line interface: `q2tors <command> ...`."""
from __future__ import annotations

import functools
import json
import sys

import click

from . import config
from .corpus import (
    EXIT_MISMATCH,
    EXIT_OK,
    EXIT_RESOURCE,
    EXIT_USAGE,
    bundled,
    bundled_path,
    parse_corpus,
    parse_record,
    run_verify,
    torsion_record,
)
from .ec import division_poly, halve_point, knapp_halve, normalize_model, primitive_division_poly, x_division_poly
from .errors import FactorizationFailure, ParseError, Q2TorsError, SearchBudgetExceeded, SingularCurve
from .grouplab import normal_subgroups, parse_groups, self_checks, verify_lemma_abelian, verify_lemma_normal
from .mqfield import format_elem, parse_elem
from .torsion import full_torsion, group_label, invariant_cyclic_subgroups

BUNDLED = {"table1": "table1.txt", "extra": "extra.txt", "twists": "twists.txt"}


def _levels(text: str | None) -> dict | None:
    if not text:
        return None
    out = {}
    for part in text.split(","):
        p, sep, k = part.partition(":")
        try:
            p, k = int(p), int(k)
        except ValueError:
            raise click.BadParameter(f"expected p:k pairs, got {part!r}", param_hint="--max-level") from None
        if not sep or p < 2 or k < 0:
            raise click.BadParameter(f"expected p:k pairs, got {part!r}", param_hint="--max-level")
        out[p] = k
    return out


def _emit(obj, as_json: bool, text: str):
    if as_json:
        click.echo(json.dumps(obj, indent=2, sort_keys=True))
    else:
        click.echo(text)


def engine_command(fn):
    """Shared budget/seed flags plus the error-to-exit-code mapping."""

    @click.option("--json", "as_json", is_flag=True, help="Emit a JSON report.")
    @click.option("--budget", type=click.IntRange(min=1), default=None, help="Cap on factor recombination subsets.")
    @click.option("--seed", type=int, default=None, help="Seed for randomized factorization steps.")
    @functools.wraps(fn)
    def wrapper(*args, budget=None, seed=None, **kw):
        changes = {}
        if budget is not None:
            changes["subset_cap"] = budget
        if seed is not None:
            changes["seed"] = seed
        try:
            with config.using(**changes):
                code = fn(*args, **kw)
        except (ParseError, SingularCurve) as e:
            click.echo(f"input error: {e}", err=True)
            sys.exit(EXIT_USAGE)
        except (SearchBudgetExceeded, FactorizationFailure) as e:
            click.echo(f"resource limit: {type(e).__name__}: {e}", err=True)
            sys.exit(EXIT_RESOURCE)
        except Q2TorsError as e:
            click.echo(f"error: {type(e).__name__}: {e}", err=True)
            sys.exit(EXIT_MISMATCH)
        sys.exit(code or EXIT_OK)

    return wrapper


def curve_options(fn):
    fn = click.option("--twist", default=None, help="Quadratic twist parameter (element literal).")(fn)
    fn = click.option("--short", "short", default=None, help="Short model A,B.")(fn)
    fn = click.option("--ainv", default=None, help="a-invariants a1,a2,a3,a4,a6.")(fn)
    fn = click.option("--base", default="", help="Base tower generators, e.g. 17 or -1,2.")(fn)
    return fn


def _record(base, ainv, short, twist, label="cli"):
    if (ainv is None) == (short is None):
        raise click.UsageError("give exactly one of --ainv or --short")
    line = f"curve {label} | base {base} | " + (f"ainv {ainv}" if ainv is not None else f"short {short}")
    if twist:
        line += f" | twist {twist}"
    return parse_record(line, 1)


def _torsion_text(res: dict) -> str:
    inv = tuple(res["torsion"]["invariants"])
    lines = [f"{res['label']}: {group_label(inv)}"]
    for g in res["torsion"]["generators"]:
        lines.append(f"  generator x = {g['x']}, y = {g['y']}  over Q({', '.join(f'sqrt({m})' for m in g['tower'])})")
    c = res["conformance"]
    lines.append(f"  fujita list: {c['fujita']}  main list: {c['main']}")
    for b in res["bounds"]:
        lines.append(f"  [{'pass' if b['pass'] else 'FAIL'}] {b['claim']}")
    if res["isogenies"]:
        lines.append(f"  stable cyclic subgroups of order {', '.join(map(str, res['isogenies']))}")
    return "\n".join(lines)


def _conformance_code(res: dict, conformance: str) -> int:
    c = res["conformance"]
    if conformance == "fujita" and c["fujita"] is False:
        return EXIT_MISMATCH
    if conformance in ("fujita", "main") and c["main"] is False:
        return EXIT_MISMATCH
    if any(not b["pass"] for b in res["bounds"]):
        return EXIT_MISMATCH
    return EXIT_OK


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="artifact")
def main():
    """Torsion of elliptic curves over the compositum of all quadratic fields."""


@main.command()
@curve_options
@click.option("--max-level", default=None, help="Ascent caps as p:k,... (k = exponent).")
@click.option("--conformance", type=click.Choice(["fujita", "main", "off"]), default="off")
@click.option("--verify-bounds", is_flag=True, help="Also check the torsion bounds.")
@engine_command
def torsion(base, ainv, short, twist, max_level, conformance, verify_bounds, as_json):
    """Compute the torsion subgroup with explicit generators."""
    rec = _record(base, ainv, short, twist)
    res = torsion_record(rec.curve(), rec.label, rec.base, _levels(max_level), verify=verify_bounds, bounds=verify_bounds)
    res.pop("_report")
    _emit(res, as_json, _torsion_text(res))
    return _conformance_code(res, conformance)


@main.command("verify-corpus")
@click.argument("corpus", required=False, default="table1")
@click.option("--max-level", default=None, help="Ascent caps as p:k,... (k = exponent).")
@click.option("--conformance", type=click.Choice(["fujita", "main", "off"]), default="main")
@click.option("--verify-bounds", is_flag=True, help="Also check the torsion bounds.")
@engine_command
def verify_corpus(corpus, max_level, conformance, verify_bounds, as_json):
    """Check a corpus file (or bundled: table1, extra, twists) against its expectations."""
    path = bundled_path(BUNDLED[corpus]) if corpus in BUNDLED else corpus
    try:
        records = parse_corpus(path)
    except OSError as e:
        raise click.UsageError(str(e)) from None
    result = run_verify(records, conformance, verify_bounds, _levels(max_level))
    if as_json:
        click.echo(json.dumps({"summary": result.summary, "records": result.records}, indent=2, sort_keys=True))
    else:
        for r in result.records:
            if r["status"] in ("pass", "mismatch"):
                got = group_label(tuple(r["torsion"]["invariants"]))
                want = group_label(tuple(r["expected"])) if r["expected"] else "-"
                click.echo(f"{r['status']:8} {r['label']:16} computed {got:12} expected {want:12} {r['seconds']:.2f}s")
                for d in r["diff"]:
                    click.echo(f"         diff: {json.dumps(d, sort_keys=True)}")
            else:
                click.echo(f"{r['status']:8} {r['label']:16} {r['error']}")
        s = result.summary
        click.echo(f"{s['passed']}/{s['records']} pass, {s['mismatches']} mismatch, "
                   f"{s['errors']} error, {s['resource']} resource")
    return result.code


@main.command()
@curve_options
@engine_command
def isogenies(base, ainv, short, twist, as_json):
    """Galois-stable cyclic subgroups inside the torsion, with Mazur-list membership."""
    rec = _record(base, ainv, short, twist)
    rep = full_torsion(rec.curve())
    S = rep.setup
    rows = []
    for c in invariant_cyclic_subgroups(rep):
        if c.order == 1:
            continue
        P = S.change.from_short(c.generator, S.original) if S.change is not None else c.generator
        rows.append({"order": c.order, "mazur_ok": c.mazur_ok(),
                     "generator": {"x": format_elem(P.x), "y": format_elem(P.y)}})
    text = "\n".join(f"order {r['order']:3}  mazur list: {r['mazur_ok']}  generator x = {r['generator']['x']}"
                     for r in rows) or "no nontrivial stable cyclic subgroup"
    _emit(rows, as_json, text)
    return EXIT_OK if all(r["mazur_ok"] for r in rows) else EXIT_MISMATCH


@main.command()
@curve_options
@click.option("--x", "px", required=True, help="x-coordinate of P on the input model.")
@click.option("--y", "py", required=True, help="y-coordinate of P on the input model.")
@engine_command
def halve(base, ainv, short, twist, px, py, as_json):
    """Knapp halving: all Q with 2Q = P over the compositum (needs full 2-torsion)."""
    rec = _record(base, ainv, short, twist)
    E0 = rec.curve()
    x, y = parse_elem(px, 1, 0), parse_elem(py, 1, 0)
    try:
        P0 = E0.point(x, y)
    except ValueError as e:
        raise click.UsageError(str(e)) from None
    E, ch = normalize_model(E0)
    P = ch.to_short(P0, E)
    cands = knapp_halve(E, P)
    halves = [ch.from_short(Q, E0) for Q in halve_point(E, P)]
    rows = {
        "candidates": [{"x": format_elem((c.x - ch.r).shrink()) if c.x is not None else None,
                        "status": c.status, "radicals": list(c.radicals)} for c in cands],
        "halves": [{"x": format_elem(Q.x), "y": format_elem(Q.y)} for Q in halves],
    }
    lines = [f"candidate x = {r['x']}  [{r['status']}]" for r in rows["candidates"]]
    lines += [f"half  x = {r['x']}, y = {r['y']}" for r in rows["halves"]]
    lines.append(f"{len(halves)} halves over the compositum")
    _emit(rows, as_json, "\n".join(lines))
    return EXIT_OK


@main.command()
@curve_options
@click.option("-n", "n", type=click.IntRange(min=1), required=True)
@click.option("--kind", type=click.Choice(["psi", "x", "primitive"]), default="primitive")
@engine_command
def divpoly(base, ainv, short, twist, n, kind, as_json):
    """Division polynomial of the short model (psi, x-only, or primitive part)."""
    rec = _record(base, ainv, short, twist)
    E, _ = normalize_model(rec.curve())
    f = {"psi": division_poly, "x": x_division_poly, "primitive": primitive_division_poly}[kind](E, n)
    obj = {"n": n, "kind": kind, "degree": f.degree, "poly": str(f),
           "model": [format_elem(E.A), format_elem(E.B)]}
    _emit(obj, as_json, f"degree {f.degree}: {f}")
    return EXIT_OK


@main.command()
@click.argument("corpus", required=False, default=None)
@click.option("--self-checks", "run_self", is_flag=True, help="Also run engine consistency checks.")
@engine_command
def grouplab(corpus, run_self, as_json):
    """Exhaustively check the two 2-group lemmas over a group corpus."""
    if corpus is None:
        text = bundled("groups.txt")
    else:
        try:
            with open(corpus, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise click.UsageError(str(e)) from None
    rows = []
    for rec in parse_groups(text):
        G = rec.group()
        normals = normal_subgroups(G)
        ra = verify_lemma_abelian(G, rec.name, normals)
        rn = verify_lemma_normal(G, rec.name, normals)
        row = {"group": rec.name, "order": G.order,
               "abelian": {"instances": ra.instances, "failures": len(ra.failures)},
               "normal": {"instances": rn.instances, "failures": len(rn.failures)}}
        if run_self:
            row["self_checks"] = self_checks(G)
        rows.append(row)
    bad = sum(r["abelian"]["failures"] + r["normal"]["failures"] + len(r.get("self_checks", [])) for r in rows)
    total_a = sum(r["abelian"]["instances"] for r in rows)
    total_n = sum(r["normal"]["instances"] for r in rows)
    lines = [f"{r['group']:14} |G|={r['order']:3}  abelian {r['abelian']['instances']:3} inst "
             f"{r['abelian']['failures']} fail   normal {r['normal']['instances']:3} inst {r['normal']['failures']} fail"
             for r in rows]
    lines.append(f"{len(rows)} groups, {total_a} + {total_n} hypothesis instances, {bad} counterexamples")
    _emit({"groups": rows, "counterexamples": bad}, as_json, "\n".join(lines))
    return EXIT_OK if bad == 0 else EXIT_MISMATCH


if __name__ == "__main__":  # pragma: no cover
    main()
