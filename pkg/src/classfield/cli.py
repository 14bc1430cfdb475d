"""Batch front end: scenario files in, deterministic reports out.

Subcommands: group, mackey, cft, hrv.  Reports are JSON-first with an
optional aligned text rendering; identical scenario and seed give
byte-identical output.  Exit codes: 0 all requested checks passed,
1 at least one check failed, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .abelian import AbHom, FgAbGroup, group_order
from .catalog import catalog
from .cft import (
    Report, Spectrum, ValuationFamily, certify_upsilon_tilde_multiplicative,
    reduced_verification,
    unramified_extension, upsilon_morphism, validate_fnd, validate_urfnd,
    validate_valuation,
)
from .groups import FiniteGroup, Subgroup, abelianization
from .hrv import (
    LaurentField, ZeroValuation, laurent_from_json, project_valuation,
    rank_n_valuation, stack_roundtrip, valuation_axiom_sampler,
)
from .mackey import (
    abelianization_functor, check_cohomological, check_mackey_formula,
    check_stability, fixed_point_functor, full_system, functor_from_json,
    permutation_module, sign_module, subgroup_key_to_id,
    trivial_module, unramified_system, validate_ric_functor,
    validate_subgroup_system,
)
from .ramification import RamificationDatum
from .transfer import commutator_system, transfer


class InputError(ValueError):
    pass


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_group(data) -> FiniteGroup:
    if isinstance(data, dict) and "builtin" in data:
        cat = catalog()
        name = data["builtin"]
        if name not in cat:
            raise InputError(f"unknown builtin group {name!r}")
        return cat[name]
    try:
        return FiniteGroup.from_json(data)
    except ValueError as exc:
        raise InputError(f"invalid group data: {exc}") from exc


def _load_subgroup(group: FiniteGroup, data) -> Subgroup:
    try:
        if "elements" in data:
            return Subgroup(group, data["elements"])
        if "generators" in data:
            return group.generated_subgroup(data["generators"])
    except ValueError as exc:
        raise InputError(f"invalid subgroup: {exc}") from exc
    raise InputError("subgroup needs 'elements' or 'generators'")


def _report_json(report: Report) -> list[dict]:
    return [{"name": c.name, "status": "pass" if c.passed else "fail",
             "witness": _as_json(c.witness)} for c in report.checks]


def _as_json(obj):
    if obj is None or isinstance(obj, (bool, int, str, float)):
        return obj
    if isinstance(obj, (list, tuple)):
        return [_as_json(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _as_json(v) for k, v in obj.items()}
    return str(obj)


def _order_json(value):
    n = group_order(value)
    return "infinite" if n == float("inf") else n


# ---------------------------------------------------------------------------
# group subcommand
# ---------------------------------------------------------------------------

def run_group_report(args) -> tuple[dict, bool]:
    data = _load_json(args.input)
    group = _load_group(data.get("group", data))
    ab, _ = abelianization(group)
    subgroups = group.all_subgroups()
    lattice = {}
    for h in subgroups:
        lattice.setdefault(len(h), 0)
        lattice[len(h)] += 1
    targets = []
    if args.subgroup:
        targets.append(_load_subgroup(group, _load_json(args.subgroup)))
    else:
        targets.extend(h for h in subgroups
                       if 1 < h.index <= 12)
    tables = []
    from .groups import commutator_subgroup
    r_g = commutator_subgroup(group.full_subgroup())
    for h in targets:
        r_h = commutator_subgroup(h)
        table = [transfer(group, h, r_h, r_g, x) for x in range(group.order)]
        tables.append({"subgroup": subgroup_key_to_id(h.elements),
                       "index": h.index, "transfer": table})
    report = {
        "order": group.order,
        "abelianization": ab.to_json(),
        "subgroup_counts": {str(k): v for k, v in sorted(lattice.items())},
        "transfer_tables": tables,
        "checks": [{"name": "group_valid", "status": "pass", "witness": None}],
    }
    return report, True


# ---------------------------------------------------------------------------
# mackey subcommand
# ---------------------------------------------------------------------------

def _build_module(group: FiniteGroup, data: dict):
    kind = data.get("kind", "trivial")
    if kind == "trivial":
        ab = FgAbGroup.from_json(data.get(
            "underlying", {"free_rank": 1, "invariant_factors": []}))
        return trivial_module(group, ab)
    if kind == "sign":
        kernel = _load_subgroup(group, data["kernel"])
        return sign_module(group, kernel, torsion=data.get("torsion", 0))
    if kind == "permutation":
        stab = _load_subgroup(group, data["stabilizer"])
        sign_kernel = None
        if "sign_kernel" in data:
            sign_kernel = _load_subgroup(group, data["sign_kernel"])
        return permutation_module(group, stab, torsion=data.get("torsion", 0),
                                  sign_kernel=sign_kernel)
    raise InputError(f"unknown module kind {kind!r}")


def _build_system(group: FiniteGroup, data, datum=None):
    if data is None or data.get("kind", "full") == "full":
        return full_system(group)
    if data["kind"] == "unramified":
        if datum is None:
            raise InputError("unramified system needs a ramification block")
        return unramified_system(datum)
    from .mackey import system_from_json
    return system_from_json(group, data)


def _build_functor(group: FiniteGroup, data: dict, system, datum=None):
    kind = data.get("kind")
    if kind == "fixed_point":
        module = _build_module(group, data.get("module", {}))
        return fixed_point_functor(module, system)
    if kind == "abelianization":
        return abelianization_functor(system, commutator_system(system))
    if kind == "tables":
        return functor_from_json(group, data["functor"])
    raise InputError(f"unknown functor kind {kind!r}")


def run_mackey_check(args) -> tuple[dict, bool]:
    data = _load_json(args.input)
    group = _load_group(data["group"])
    datum = None
    if "ramification" in data:
        datum = _ramification(group, data["ramification"])
    system = _build_system(group, data.get("system"), datum)
    report = Report()
    sysrep = validate_subgroup_system(system)
    report.add("subgroup_system_valid", sysrep.passed, sysrep.witness)
    phi = _build_functor(group, data["functor"], system, datum)
    for name, check in (("ric_axioms", validate_ric_functor),
                        ("stability", check_stability),
                        ("cohomological", check_cohomological)):
        r = check(phi)
        report.add(name, r.passed, r.witness)
    if system.is_mackey:
        r = check_mackey_formula(phi)
        report.add("mackey_formula", r.passed, r.witness)
    out = {"checks": _report_json(report),
           "values": {subgroup_key_to_id(k): v.to_json()
                      for k, v in sorted(phi.values.items())}}
    return out, report.passed


# ---------------------------------------------------------------------------
# cft subcommand
# ---------------------------------------------------------------------------

def _ramification(group: FiniteGroup, data: dict) -> RamificationDatum:
    try:
        return RamificationDatum(group, data["modulus"], tuple(data["d"]),
                                 frozenset(data.get("primes_P", ())))
    except ValueError as exc:
        raise InputError(f"invalid ramification datum: {exc}") from exc


def _valuation(c, data: dict, system) -> ValuationFamily:
    if "omega" not in data:
        raise InputError("valuation block needs an 'omega' entry")
    m = data["omega"].get("modulus", 0)
    omega = FgAbGroup(1) if m == 0 else FgAbGroup(0, (m,))
    comp_data = data.get("components")
    components = {}
    if comp_data == "identity" or comp_data is None:
        for k in system.points():
            if c.values[k] != omega:
                raise InputError(
                    "identity valuation needs C(H) = Omega everywhere")
            components[k] = AbHom.identity(omega)
    elif comp_data == "zero":
        components = {k: AbHom.zero(c.values[k], omega)
                      for k in system.points()}
    else:
        for k in system.points():
            key = subgroup_key_to_id(k)
            if key not in comp_data:
                raise InputError(f"valuation component missing for {key}")
            components[k] = AbHom(c.values[k], omega,
                                  tuple(tuple(r) for r in comp_data[key]))
    return ValuationFamily(c, omega, components)


def run_cft_scenario(args) -> tuple[dict, bool]:
    data = _load_json(args.input)
    group = _load_group(data["group"])
    if "ramification" not in data:
        raise InputError("scenario needs a 'ramification' block")
    datum = _ramification(group, data["ramification"])
    system = _build_system(group, data.get("system"), datum)
    if "functor" not in data:
        raise InputError("scenario needs a 'functor' block")
    c = _build_functor(group, data["functor"], system, datum)
    if "valuation" not in data:
        raise InputError("scenario needs a 'valuation' block")
    vfam = _valuation(c, data["valuation"], system)

    spec_data = data.get("spectrum", {"kind": "unramified"})
    if isinstance(spec_data, dict) and "pairs" in spec_data:
        ext: dict = {k: set() for k in system.points()}
        for hpart, upart in spec_data["pairs"]:
            hkey = tuple(sorted(hpart))
            ext[hkey].add(tuple(sorted(upart)))
        for k in system.points():
            ext[k].add(k)
        extension = {k: sorted(v) for k, v in ext.items()}
    elif spec_data.get("kind") == "unramified":
        extension = unramified_extension(system, datum)
    else:
        raise InputError("spectrum needs 'pairs' or kind 'unramified'")
    spectrum = Spectrum(system, extension)

    report = Report()
    val = validate_valuation(vfam, datum)
    report.add("valuation_valid", val.passed, val.first_failure())
    ur_spec = Spectrum(system, unramified_extension(system, datum))
    ur = validate_urfnd(c, vfam, ur_spec, datum)
    report.add("urfnd_valid", ur.passed, ur.first_failure())
    fnd = validate_fnd(c, vfam, spectrum, datum)
    report.add("fnd_valid", fnd.passed, fnd.first_failure())

    tables = []
    if fnd.passed:
        rsys = commutator_system(system)
        morphism, table_map = upsilon_morphism(
            c, vfam, datum, spectrum, rsys, fnd_validated=True)
        from .mackey import validate_functor_morphism
        mrep = validate_functor_morphism(morphism)
        report.add("upsilon_is_morphism", mrep.passed, mrep.witness)
        report.add("upsilon_all_iso",
                   all(t.is_iso for t in table_map.values()))
        report.add("upsilon_lift_independent",
                   all(t.lift_independent in (True, None)
                       for t in table_map.values()))
        rv = reduced_verification(morphism, "prime", rsys, class_functor=c)
        report.add("reduction_agreement", rv.agreement,
                   rv.full_witness if not rv.agreement else None)
        if args.certify:
            for pair in spectrum.points():
                cert = certify_upsilon_tilde_multiplicative(
                    c, vfam, datum, pair)
                report.add(f"upsilon_tilde_multiplicative:"
                           f"{subgroup_key_to_id(pair[0])}|"
                           f"{subgroup_key_to_id(pair[1])}",
                           cert.passed, cert.first_failure())
        tables = [table_map[p].to_json() for p in spectrum.points()]
    out = {"checks": _report_json(report), "tables": tables}
    return out, report.passed


# ---------------------------------------------------------------------------
# hrv subcommand
# ---------------------------------------------------------------------------

def run_hrv_eval(args) -> tuple[dict, bool]:
    data = _load_json(args.input)
    tasks = data.get("tasks", ["valuation"])
    seed = args.seed if args.seed is not None else data.get("seed", 0)
    report = Report()
    results: dict = {"checks": [], "valuations": [], "roundtrips": []}
    elements = [laurent_from_json(e) for e in data.get("elements", [])]
    if "valuation" in tasks:
        for i, x in enumerate(elements):
            try:
                v = rank_n_valuation(x)
                entry = {"index": i, "value": list(v),
                         "projections": {str(r): list(project_valuation(v, r))
                                         for r in range(1, x.field.rank + 1)}}
            except ZeroValuation as exc:
                entry = {"index": i, "error": str(exc)}
                report.add("valuation_defined", False, i)
            results["valuations"].append(entry)
    if "roundtrip" in tasks or "axioms" in tasks:
        fields = {(x.field.characteristic, x.field.rank,
                   x.field.window_lo, x.field.window_hi): x.field
                  for x in elements}
        if "field" in data:
            f = data["field"]
            field = LaurentField(f["p"], f["rank"],
                                 tuple(f["window"]["lo"]),
                                 tuple(f["window"]["hi"]))
            fields[(field.characteristic, field.rank,
                    field.window_lo, field.window_hi)] = field
        for field in fields.values():
            if "roundtrip" in tasks:
                r = stack_roundtrip(field, seed=seed,
                                    samples=data.get("samples", 1000))
                report.add("stack_roundtrip", r.passed,
                           r.violations[:3] or None)
                results["roundtrips"].append(
                    {"rank": field.rank, "p": field.characteristic,
                     "samples": r.samples, "skipped": r.skipped,
                     "violations": len(r.violations)})
            if "axioms" in tasks:
                r = valuation_axiom_sampler(field, seed=seed,
                                            samples=data.get("samples", 500))
                report.add("valuation_axioms", r.passed,
                           r.violations[:3] or None)
    results["checks"] = _report_json(report)
    return results, report.passed


# ---------------------------------------------------------------------------
# rendering and entry point
# ---------------------------------------------------------------------------

def _render_text(out: dict) -> str:
    lines = []
    for check in out.get("checks", []):
        status = check["status"].upper()
        witness = "" if check["witness"] is None else f"  witness={check['witness']}"
        lines.append(f"{status:<6} {check['name']}{witness}")
    for key in sorted(out):
        if key == "checks":
            continue
        lines.append(f"{key}: {json.dumps(out[key], sort_keys=True)}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="classfield",
        description="checks and reciprocity computations over finite models")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("group", run_group_report), ("mackey", run_mackey_check),
                     ("cft", run_cft_scenario), ("hrv", run_hrv_eval)):
        p = sub.add_parser(name)
        p.add_argument("--input", required=True)
        p.add_argument("--out")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--certify", action="store_true")
        p.add_argument("--format", choices=("json", "text"), default="json")
        if name == "group":
            p.add_argument("--subgroup")
        p.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    try:
        out, passed = args.fn(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    rendered = (json.dumps(out, sort_keys=True, indent=2) + "\n"
                if args.format == "json" else _render_text(out))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
