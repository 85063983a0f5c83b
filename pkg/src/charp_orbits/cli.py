"""Command-line front end.

    charp-orbits <command> --input problem.toml [--horizon N] [--mmax N]
                 [--nmax N] [--seed N] [--window N] [--out FILE] [--timing]

Problem files are TOML with the blocks ``[field]``, ``[group]``,
``[series]``, ``[system]``, ``[map]``, ``[point]``, ``[functional]``,
``[query]`` and ``[params]``; expressions are strings in the scalar
grammar.  Output is one JSON object per line, keys sorted, ending with a
``summary`` record.  Exit status: 0 success, 2 mathematical negative,
1 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any, Callable, Iterator

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import grammar, linrec, multdep, multgroup, retset, torusdyn
from .errors import CharpError, NoPlaceAssignment, ParseError, RankZero, ValidationError
from .ffield import FieldSpec, RatFunc, parse_scalar

COMMANDS = ("member", "polya", "section", "orbit", "cor13", "retset", "fit",
            "density", "formset", "digits", "multdep", "places")

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE = 0, 1, 2

DEFAULTS = {"H": 100, "M_max": 64, "N_max": 16, "b_max": retset.B_MAX, "window": None,
            "seed": 0, "L": 1, "depth": 3, "height_budget": retset.DEFAULT_HEIGHT_BUDGET}


@dataclass
class ProblemFile:
    text: str
    data: dict
    field: FieldSpec
    group: multgroup.GroupSpec | None
    series: linrec.RationalSeries | None = None
    system: retset.RationalSystem | None = None
    params: dict = dc_field(default_factory=dict)

    def block(self, name: str) -> dict:
        if name not in self.data:
            raise ValidationError(f"this command needs a [{name}] block")
        return self.data[name]

    def need_group(self) -> multgroup.GroupSpec:
        if self.group is None:
            raise ValidationError("this command needs a [group] block")
        return self.group

    def need_series(self) -> linrec.RationalSeries:
        if self.series is None:
            raise ValidationError("this command needs a [series] block")
        return self.series

    def need_system(self) -> retset.RationalSystem:
        if self.system is None:
            raise ValidationError("this command needs a [system] block")
        return self.system

    def line_of(self, literal: str) -> tuple[int, int]:
        """(line, column offset) of a string literal in the source text."""
        for quote in ('"', "'"):
            needle = quote + literal + quote
            for i, line in enumerate(self.text.splitlines(), 1):
                col = line.find(needle)
                if col >= 0:
                    return i, col + 1
        return 1, 0

    def expr(self, text: str) -> RatFunc:
        return _located(self, text, lambda t, line: parse_scalar(self.field, t, line))


def _load_toml(text: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", 1) or 1
        col = getattr(exc, "colno", 1) or 1
        raise ParseError(str(exc).split(" (at line")[0], line, col) from None


def _int(value: Any, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{name} must be an integer")
    return value


def _int_list(value: Any, name: str) -> list[int]:
    if not isinstance(value, list):
        raise ValidationError(f"{name} must be a list of integers")
    return [_int(v, name) for v in value]


def _str_list(value: Any, name: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ValidationError(f"{name} must be a list of strings")
    return value


def parse_problem(text: str) -> ProblemFile:
    """Validate a problem file; every expression present is parsed eagerly."""
    data = _load_toml(text)
    fblock = data.get("field")
    if not isinstance(fblock, dict) or "p" not in fblock:
        raise ValidationError("a [field] block with p is required")
    modulus = fblock.get("modulus")
    fld = FieldSpec(_int(fblock["p"], "p"), _int(fblock.get("ext_degree", 1), "ext_degree"),
                    _int_list(modulus, "modulus") if modulus is not None else None)
    params = dict(DEFAULTS)
    for key, value in data.get("params", {}).items():
        if key not in DEFAULTS:
            raise ValidationError(f"unknown parameter {key!r}")
        params[key] = _int(value, key)
    pf = ProblemFile(text, data, fld, None, params=params)
    if "group" in data:
        gens = _str_list(data["group"].get("gens", []), "gens")
        pf.group = multgroup.GroupSpec([pf.expr(g) for g in gens], field=fld, seed=params["seed"])
    if "series" in data:
        s = data["series"]
        num, den = s.get("num", "0"), s.get("den", "1")
        pf.series = linrec.RationalSeries(_xpoly(pf, num), _xpoly(pf, den))
    if "system" in data:
        s = data["system"]
        phi = _str_list(s.get("phi", []), "phi")
        x0 = _str_list(s.get("x0", []), "x0")
        if "dim" in s and _int(s["dim"], "dim") != len(phi):
            raise ValidationError("dim does not match the number of phi coordinates")
        f = s.get("f", "x1")
        allowed = set(retset._names(len(phi))) | retset._scalar_names(fld)
        for text in phi + [f]:
            _located(pf, text, lambda t, line: grammar.check_variables(grammar.parse_expr(t, line), allowed))
        for text in x0:
            pf.expr(text)
        pf.system = retset.RationalSystem.from_strings(fld, phi, f, x0)
    return pf


def _located(pf: ProblemFile, text: str, parse: Callable[[str, int], Any]) -> Any:
    """Run ``parse`` and shift error positions to the literal's place in the file."""
    line, offset = pf.line_of(text)
    try:
        return parse(text, line)
    except ParseError as exc:
        raise ParseError(exc.message, exc.line, exc.column + offset, exc.expected) from None


def _xpoly(pf: ProblemFile, text: str) -> linrec.XPoly:
    return _located(pf, text, lambda t, line: linrec.parse_xpoly(pf.field, t, line))


# -- commands ------------------------------------------------------------------------

@dataclass
class Report:
    command: str
    records: list[dict]
    result: dict
    exit_code: int
    inputs: dict


def _frac(x: Fraction) -> str:
    return str(x)


def _group_echo(G: multgroup.GroupSpec | None) -> list[str] | None:
    return None if G is None else [str(h) for h in G.gens]


def _map_from(pf: ProblemFile, block: dict) -> torusdyn.MonomialMap:
    G = pf.need_group()
    expo = [_int_list(r, "expo") for r in block.get("expo", [])]
    coeff = block.get("coeff")
    coeff = None if coeff is None else [_int_list(c, "coeff") for c in coeff]
    return torusdyn.MonomialMap.build(G, expo, coeff)


def _point(pf: ProblemFile) -> torusdyn.TorusPoint:
    G = pf.need_group()
    block = pf.block("point")
    if "exponents" in block:
        return torusdyn.TorusPoint.from_exponents(G, [_int_list(r, "exponents") for r in block["exponents"]])
    values = _str_list(block.get("values", []), "values")
    return torusdyn.TorusPoint.from_values(G, [pf.expr(v) for v in values])


def _functional(pf: ProblemFile, d: int) -> torusdyn.MonomialFunctional:
    G = pf.need_group()
    block = pf.data.get("functional")
    if block is None:
        return torusdyn.MonomialFunctional.coordinate(G, d)
    kappa = _int_list(block.get("kappa", [0] * len(G)), "kappa")
    powers = _int_list(block.get("powers", [1] + [0] * (d - 1)), "powers")
    if len(powers) != d or len(kappa) != len(G):
        raise ValidationError("functional does not match the map dimension or group size")
    return torusdyn.MonomialFunctional(multgroup.ExponentVector(tuple(kappa)), tuple(powers))


def cmd_member(pf: ProblemFile) -> Report:
    G = pf.need_group()
    q = pf.block("query")
    texts = [q["element"]] if "element" in q else _str_list(q.get("elements", []), "elements")
    if not texts:
        raise ValidationError("query needs element or elements")
    records, all_in = [], True
    for text in texts:
        x = pf.expr(text)
        cert = multgroup.membership(x, G) if not x.is_zero() else None
        rec = {"record": "membership", "element": str(x),
               "verdict": "Member" if cert is not None else "NonMember"}
        if cert is not None:
            rec["exponents"] = cert.to_list()
        all_in &= cert is not None
        records.append(rec)
    result = {"verdict": "Member" if all_in else "NonMember"}
    return Report("member", records, result, EXIT_OK if all_in else EXIT_NEGATIVE,
                  {"group": _group_echo(G), "elements": [r["element"] for r in records]})


def cmd_polya(pf: ProblemFile) -> Report:
    F = pf.need_series()
    G = pf.group
    P = pf.params
    out = linrec.polya_decompose(F, G, M_max=P["M_max"], N_max=P["N_max"])
    inputs = {"series": str(F), "group": _group_echo(G), "M_max": P["M_max"], "N_max": P["N_max"]}
    if isinstance(out, linrec.PolyaDecomposition):
        linrec.reconstruct_and_verify(out)
        result = {"verdict": "Decomposed", **out.to_dict()}
        return Report("polya", [], result, EXIT_OK, inputs)
    return Report("polya", [], out.to_dict(), EXIT_NEGATIVE, inputs)


def cmd_section(pf: ProblemFile) -> Report:
    F = pf.need_series()
    q = pf.block("query")
    M, b = _int(q.get("M", 1), "M"), _int(q.get("b", 0), "b")
    S = linrec.section(F, M, b)
    count = min(pf.params["H"], 50) + 1
    direct = [linrec.coefficient_at(F, M * n + b) for n in range(count)]
    if S.coefficients(count) != direct:
        raise AssertionError("section disagrees with direct coefficients")
    records = [{"record": "coefficient", "n": n, "value": str(v)} for n, v in enumerate(direct)]
    result = {"section": str(S), "order": S.order, "checked_terms": count}
    return Report("section", records, result, EXIT_OK, {"series": str(F), "M": M, "b": b})


def cmd_orbit(pf: ProblemFile) -> Report:
    H = pf.params["H"]
    if "monoid" in pf.data:
        maps = [_map_from(pf, m) for m in pf.data["monoid"].get("maps", [])]
        if not maps:
            raise ValidationError("[monoid] needs a nonempty maps list")
        x = _point(pf)
        f = _functional(pf, maps[0].dim)
        depth = pf.params["depth"]
        records = [{"record": "word", "word": list(w), "f": v.to_list()}
                   for w, v in torusdyn.monoid_values(maps, x, f, depth)]
        return Report("orbit", records, {"kind": "monoid", "depth": depth, "words": len(records)},
                      EXIT_OK, {"group": _group_echo(pf.group), "point": x.matrix(),
                                "maps": [[list(r) for r in m.expo] for m in maps]})
    if "map" in pf.data:
        phi = _map_from(pf, pf.data["map"])
        x = _point(pf)
        f = _functional(pf, phi.dim)
        records = []
        for n, E in enumerate(torusdyn.orbit_exponents(phi, x, H + 1)):
            value = torusdyn._functional_exponents(f, E)
            records.append({"record": "orbit", "n": n, "point": E, "f": value})
        result = {"kind": "monomial", "steps": H}
        return Report("orbit", records, result, EXIT_OK,
                      {"group": _group_echo(phi.group), "expo": [list(r) for r in phi.expo],
                       "point": x.matrix()})
    S = pf.need_system()
    records = []
    point = list(S.x0)
    for n in range(H + 1):
        if n:
            try:
                point = S.step(point)
            except ZeroDivisionError:
                return Report("orbit", records, {"verdict": "IndeterminacyHit", "step": n},
                              EXIT_NEGATIVE, _system_echo(S))
            height = max((v.height() for v in point), default=0)
            if height > pf.params["height_budget"]:
                return Report("orbit", records, {"verdict": "HeightBudgetExceeded", "step": n,
                                                 "height": height}, EXIT_NEGATIVE, _system_echo(S))
        records.append({"record": "orbit", "n": n, "point": [str(v) for v in point]})
    return Report("orbit", records, {"kind": "rational", "steps": H}, EXIT_OK, _system_echo(S))


def _system_echo(S: retset.RationalSystem) -> dict:
    return {"phi": list(S.phi_text), "f": S.f_text, "x0": [str(v) for v in S.x0]}


def cmd_cor13(pf: ProblemFile) -> Report:
    phi = _map_from(pf, pf.block("map"))
    x = _point(pf)
    f = _functional(pf, phi.dim)
    L = pf.params["L"]
    rr = torusdyn.residue_recurrences(phi, x, f, L=L)
    records = [{"record": "residue", "j": j, "recurrences": [r.to_dict() for r in row]}
               for j, row in enumerate(rr.recurrences)]
    result = {"L": rr.L, "preperiod": rr.preperiod, "verified_upto": 60}
    return Report("cor13", records, result, EXIT_OK,
                  {"group": _group_echo(phi.group), "expo": [list(r) for r in phi.expo],
                   "coeff": [c.to_list() for c in phi.coeff], "point": x.matrix(),
                   "kappa": f.kappa.to_list(), "powers": list(f.powers)})


def cmd_retset(pf: ProblemFile) -> Report:
    G = pf.need_group()
    H = pf.params["H"]
    window = pf.params["window"]
    b_max = pf.params["b_max"]
    if pf.system is None and pf.series is not None:
        sets = linrec.return_set_of_series(pf.series, G, H)
        records = [{"record": "coefficient", "n": n, "in_N": n in set(sets.N), "in_N0": n in set(sets.N0)}
                   for n in range(H + 1)]
        rep_n = retset.structure_fit(sets.N, H, b_max, window)
        rep_n0 = retset.structure_fit(sets.N0, H, b_max, window)
        result = {"N": rep_n.to_dict(), "N0": rep_n0.to_dict()}
        return Report("retset", records, result, EXIT_OK,
                      {"series": str(pf.series), "group": _group_echo(G), "H": H})
    S = pf.need_system()
    records = []
    mono = retset.monomial_form(S, G)
    try:
        if mono is not None:
            phi, x, f = mono
            for n, E in enumerate(torusdyn.orbit_exponents(phi, x, H + 1)):
                records.append({"record": "return", "n": n, "member": True,
                                "exponents": torusdyn._functional_exponents(f, E)})
        else:
            for n, val in retset.orbit_values(S, H, pf.params["height_budget"]):
                member = val is not None and not val.is_zero() and multgroup.membership(val, G) is not None
                records.append({"record": "return", "n": n, "member": member,
                                "value": "pole" if val is None else str(val)})
    except retset.IndeterminacyHit as hit:
        return Report("retset", records, {"verdict": "IndeterminacyHit", "step": hit.step},
                      EXIT_NEGATIVE, _system_echo(S))
    except retset.HeightBudgetExceeded as exc:
        return Report("retset", records, {"verdict": "HeightBudgetExceeded", "step": exc.step,
                                          "height": exc.height}, EXIT_NEGATIVE, _system_echo(S))
    members = [r["n"] for r in records if r["member"]]
    report = retset.structure_fit(members, H, b_max, window)
    return Report("retset", records, {"path": "monomial" if mono else "direct", **report.to_dict()},
                  EXIT_OK, {**_system_echo(S), "group": _group_echo(G), "H": H})


def _members(pf: ProblemFile) -> list[int]:
    return _int_list(pf.block("query").get("members", []), "members")


def cmd_fit(pf: ProblemFile) -> Report:
    H = pf.params["H"]
    rep = retset.structure_fit(_members(pf), H, pf.params["b_max"], pf.params["window"])
    return Report("fit", [], rep.to_dict(), EXIT_OK, {"H": H})


def cmd_density(pf: ProblemFile) -> Report:
    H = pf.params["H"]
    w = pf.params["window"] or max(1, int(H ** 0.5))
    est = retset.banach_density_estimate(_members(pf), H, w)
    return Report("density", [], {"density_estimate": _frac(est), "window": w}, EXIT_OK, {"H": H})


def cmd_formset(pf: ProblemFile) -> Report:
    q = pf.block("query")
    d = [Fraction(str(x)) for x in q.get("d", [])]
    spec = retset.FormSetSpec(_int(q.get("p", 2), "p"), tuple(d), tuple(_int_list(q.get("k", []), "k")))
    H = pf.params["H"]
    vals = retset.form_set_members(spec, H)
    return Report("formset", [], {"members": vals, "count": len(vals)}, EXIT_OK,
                  {"p": spec.p, "d": [str(x) for x in spec.d], "k": list(spec.k), "H": H})


def cmd_digits(pf: ProblemFile) -> Report:
    q = pf.block("query")
    H = pf.params["H"]
    query = retset.DigitQuery(_int(q.get("p", 3), "p"), _int(q.get("r", 1), "r"), H)
    sols = retset.digit_solutions(query)
    records = [{"record": "density", "x": x, "running_density": _frac(v)}
               for x, v in retset.running_density(sols, H)]
    return Report("digits", records, {"solutions": sols, "count": len(sols)}, EXIT_OK,
                  {"p": query.p, "r": query.r, "H": H})


def cmd_multdep(pf: ProblemFile) -> Report:
    q = pf.block("query")
    if "powers" in q:
        G = pf.need_group()
        powers = [_int_list(p, "powers") for p in q["powers"]]
        kappas = [_int_list(k, "kappas") for k in q.get("kappas", [[0] * len(G)] * len(powers))]
        res = multdep.functional_dependence(G, kappas, powers)
        inputs = {"group": _group_echo(G), "kappas": kappas, "powers": powers}
    else:
        elems = [pf.expr(s) for s in _str_list(q.get("elements", []), "elements")]
        res = multdep.mult_dependence(elems, pf.field)
        inputs = {"elements": [str(e) for e in elems]}
    if "threshold" in q:
        d, e, r = _int_list(q["threshold"], "threshold")
        inputs["threshold"] = [d, e, r]
        result = {**res.to_dict(), "dichotomy_threshold": multdep.dichotomy_threshold(d, e, r)}
    else:
        result = res.to_dict()
    return Report("multdep", [], result, EXIT_OK if res.dependent else EXIT_NEGATIVE, inputs)


def cmd_places(pf: ProblemFile) -> Report:
    G = pf.need_group()
    try:
        A = multgroup.select_places(G)
    except (RankZero, NoPlaceAssignment) as exc:
        return Report("places", [], {"verdict": type(exc).__name__, "message": str(exc)},
                      EXIT_NEGATIVE, {"group": _group_echo(G)})
    if not multgroup.check_assignment(A):
        raise AssertionError("place assignment failed its own invariants")
    c = multgroup.height_bound_constant(G, A)
    records = [{"record": "place", "basis": str(b), "place": str(v), "valuation": k,
                "exponents": e.to_list()}
               for b, v, k, e in zip(A.basis, A.places, A.pairing, A.basis_exps)]
    return Report("places", records, {"rank": G.rank, "height_constant": _frac(c)}, EXIT_OK,
                  {"group": _group_echo(G)})


HANDLERS: dict[str, Callable[[ProblemFile], Report]] = {
    "member": cmd_member, "polya": cmd_polya, "section": cmd_section, "orbit": cmd_orbit,
    "cor13": cmd_cor13, "retset": cmd_retset, "fit": cmd_fit, "density": cmd_density,
    "formset": cmd_formset, "digits": cmd_digits, "multdep": cmd_multdep, "places": cmd_places,
}


def run_command(cmd: str, pf: ProblemFile) -> Report:
    if cmd not in HANDLERS:
        raise ValidationError(f"unknown command {cmd!r}")
    return HANDLERS[cmd](pf)


# -- entry point ----------------------------------------------------------------------

def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def render(report: Report, seed: int, elapsed: float | None = None) -> Iterator[str]:
    for rec in report.records:
        yield _dump(rec)
    summary = {"record": "summary", "command": report.command, "exit_code": report.exit_code,
               "seed": seed, "inputs": report.inputs, "result": report.result}
    if elapsed is not None:
        summary["elapsed_seconds"] = round(elapsed, 6)
    yield _dump(summary)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="charp-orbits", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", required=True, help="problem file (TOML)")
    ap.add_argument("--horizon", type=int, help="horizon H")
    ap.add_argument("--mmax", type=int, help="largest modulus M tried by polya")
    ap.add_argument("--nmax", type=int, help="largest N accepted by polya")
    ap.add_argument("--seed", type=int, help="seed for randomized factoring")
    ap.add_argument("--window", type=int, help="density window width")
    ap.add_argument("--out", help="write records here instead of stdout")
    ap.add_argument("--timing", action="store_true", help="add elapsed time to the summary")
    return ap


def _threads() -> int:
    raw = os.environ.get("CHARP_ORBITS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValidationError(f"CHARP_ORBITS_THREADS must be an integer, got {raw!r}") from None


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    start = time.perf_counter()
    out = sys.stdout
    try:
        _threads()  # work is single-threaded; the cap is validated only
        try:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ValidationError(f"cannot read {args.input}: {exc.strerror}") from None
        pf = parse_problem(text)
        overrides = {"H": args.horizon, "M_max": args.mmax, "N_max": args.nmax,
                     "seed": args.seed, "window": args.window}
        for key, value in overrides.items():
            if value is not None:
                pf.params[key] = value
        report = run_command(args.command, pf)
    except ParseError as exc:
        _error(out, "ParseError", exc.message, line=exc.line, column=exc.column,
               expected=sorted(exc.expected))
        return EXIT_USAGE
    except (CharpError, ValueError) as exc:
        _error(out, type(exc).__name__, str(exc))
        return EXIT_USAGE
    elapsed = time.perf_counter() - start if args.timing else None
    lines = list(render(report, pf.params["seed"], elapsed))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return report.exit_code


def _error(out, kind: str, message: str, **extra) -> None:
    print(f"charp-orbits: {kind}: {message}", file=sys.stderr)
    out.write(_dump({"record": "error", "error": kind, "message": message, **extra}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
