"""Command-line driver.

Exit codes: 0 when everything passes, 1 on a verification failure (the
report is still printed), 2 on malformed input.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import cohomology as coh
from .delzant import DelzantPolytope, NotGenericError, PolytopeError, check_delzant, enumerate_vertices, restrict_to_circle
from .exact import format_rational
from .fixedpoints import FixedPointSet, betti_from_morse, normalize_moment, validate
from .formats import FormatError, class_from_obj, dumps, loads, parse_input, rational_field, serialize
from .verifier import (
    NO_CONTRADICTION,
    PreconditionError,
    contradiction_certificate,
    full_report,
    kernel_combination,
    restriction_rank_2_to_4,
)

COMMANDS = ("ingest", "validate", "integrate", "canonical", "witness", "contradict", "report")
POLYTOPE_ONLY = {"canonical", "witness", "report"}

PASS, FAIL, BAD_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    input_path: str
    xi: tuple[int, ...] | None = None
    output_path: str | None = None
    flags: dict = field(default_factory=dict)


def parse_xi(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(a) for a in text.split(","))
    except ValueError:
        raise InputError(f"--xi must be comma-separated integers, got {text!r}") from None


def bundled(name: str) -> Path:
    """Path of a data file shipped with the package."""
    return Path(str(resources.files("circleloc") / "data" / name))


_FACTOR = re.compile(r"^(omega|1|tau:\d+|canon:[^\^*]+)(?:\^(\d+))?$")


def eval_class(expr: str, s: FixedPointSet, polytope: DelzantPolytope | None, xi, graph=None):
    """Evaluate ``omega``, ``tau:<facet>``, ``canon:<id>`` joined by ``*`` with ``^k`` powers."""
    result = coh.identity_class(s)
    canon = None
    for raw in expr.replace(" ", "").split("*"):
        m = _FACTOR.match(raw)
        if not m:
            raise InputError(f"cannot parse class factor {raw!r}")
        atom, power = m.group(1), int(m.group(2) or 1)
        if atom == "omega":
            factor = coh.symplectic_class(s)
        elif atom == "1":
            factor = coh.identity_class(s)
        elif polytope is None:
            raise InputError(f"{atom!r} needs a polytope input")
        elif atom.startswith("tau:"):
            facet = int(atom[4:])
            if facet >= len(polytope.halfspaces):
                raise InputError(f"facet index {facet} out of range")
            factor = coh.divisor_class(polytope, xi, facet, graph)
        else:
            pid = atom[6:]
            if canon is None:
                canon = coh.canonical_classes(coh.flow_up_basis(polytope, xi, s, graph), s)
            if pid not in canon:
                raise InputError(f"no fixed point with id {pid!r}")
            factor = canon[pid].cls
        result = coh.multiply(result, factor ** power)
    return result


def _load(config: RunConfig):
    obj = parse_input(config.input_path)
    if isinstance(obj, DelzantPolytope):
        if config.xi is None and config.command != "ingest":
            raise InputError(f"{config.command} on a polytope requires --xi")
        return obj
    if config.xi is not None:
        raise InputError("--xi is only allowed with polytope input")
    if config.command in POLYTOPE_ONLY:
        raise InputError(f"{config.command} requires a polytope input")
    return obj


def _fixed_points(obj, xi, graph=None) -> FixedPointSet:
    if isinstance(obj, DelzantPolytope):
        return restrict_to_circle(obj, xi, graph=graph)
    return obj


def _cmd_ingest(config, obj):
    if isinstance(obj, FixedPointSet):
        return PASS, {"kind": "fixed_points", "data": serialize(obj),
                      "betti": betti_from_morse(obj).to_list()}
    graph = enumerate_vertices(obj)
    rep = check_delzant(obj, graph)
    out = {"kind": "polytope", "data": serialize(obj), "delzant": rep}
    if config.xi is not None and rep["pass"]:
        out["fixed_points"] = serialize(restrict_to_circle(obj, config.xi, graph=graph))
    return (PASS if rep["pass"] else FAIL), out


def _cmd_validate(config, obj):
    s = _fixed_points(obj, config.xi)
    rep = validate(s)
    return (PASS if rep.passed else FAIL), rep.to_dict()


def _cmd_integrate(config, obj):
    expr = config.flags.get("class")
    if not expr:
        raise InputError("integrate needs --class")
    graph = enumerate_vertices(obj) if isinstance(obj, DelzantPolytope) else None
    s = _fixed_points(obj, config.xi, graph)
    if not s.is_normalized():
        s = normalize_moment(s)
    c = eval_class(expr, s, obj if graph else None, config.xi, graph)
    return PASS, coh.integrate(c, s).to_dict()


def _cmd_canonical(config, obj):
    graph = enumerate_vertices(obj)
    s = restrict_to_circle(obj, config.xi, graph=graph)
    canon = coh.canonical_classes(coh.flow_up_basis(obj, config.xi, s, graph), s)
    rows = []
    ok = True
    for pid, cc in canon.items():
        mem = coh.membership_necessary(cc.cls, s)
        ok = ok and cc.certified and mem.passed
        rows.append({**cc.to_dict(), "membership": mem.to_dict()})
    return (PASS if ok else FAIL), {"pass": ok, "classes": rows}


def _cmd_witness(config, obj):
    graph = enumerate_vertices(obj)
    s = restrict_to_circle(obj, config.xi, graph=graph)
    if s.dim != 8:
        raise InputError("witness needs a 4-dimensional polytope")
    canon = coh.canonical_classes(coh.flow_up_basis(obj, config.xi, s, graph), s)
    w = restriction_rank_2_to_4(canon, s)
    ok = w.full_rank and w.unimodal
    return (PASS if ok else FAIL), {"pass": ok, **w.to_dict()}


def _cmd_contradict(config, obj):
    raw = loads(Path(config.input_path).read_text())
    claimed = [class_from_obj(c, f"claimed[{i}]") for i, c in enumerate(raw.get("claimed", []))]
    if not claimed:
        raise InputError("contradict needs a 'claimed' list of classes in the input file")
    s = normalize_moment(obj)
    if config.flags.get("kernel") or "c" not in raw:
        ker = kernel_combination(s, claimed)
        if not ker:
            return PASS, {"status": NO_CONTRADICTION, "reason": "restriction to index-4 points is injective"}
        c = list(ker[0])
    else:
        c = [rational_field(x, f"c[{i}]") for i, x in enumerate(raw["c"])]
    try:
        cert = contradiction_certificate(s, claimed, c)
    except PreconditionError as exc:
        return FAIL, {"status": "precondition_violation", "error": str(exc), "points": exc.points}
    if cert == NO_CONTRADICTION:
        return PASS, {"status": NO_CONTRADICTION, "alpha_coeffs": [format_rational(x) for x in c]}
    out = cert.to_dict()
    out["terms_nonnegative"] = cert.terms_nonnegative()
    return FAIL, out


def _cmd_report(config, obj):
    rep = full_report(obj, config.xi)
    return (PASS if rep["pass"] else FAIL), rep


HANDLERS = {
    "ingest": _cmd_ingest,
    "validate": _cmd_validate,
    "integrate": _cmd_integrate,
    "canonical": _cmd_canonical,
    "witness": _cmd_witness,
    "contradict": _cmd_contradict,
    "report": _cmd_report,
}


def _run_one(config: RunConfig) -> tuple[int, dict]:
    try:
        obj = _load(config)
        return HANDLERS[config.command](config, obj)
    except coh.CanonicalSolveError as exc:
        return FAIL, {"error": str(exc)}
    except (FormatError, InputError, PolytopeError, coh.ClassError) as exc:
        return BAD_INPUT, {"error": str(exc)}
    except NotGenericError as exc:
        return BAD_INPUT, {"error": str(exc), "edge": list(exc.edge)}
    except ValueError as exc:
        return BAD_INPUT, {"error": str(exc)}


def run(config: RunConfig) -> tuple[int, str]:
    """Execute one command; returns the exit code and the JSON text."""
    if config.command not in HANDLERS:
        return BAD_INPUT, dumps({"error": f"unknown command {config.command!r}"})
    path = Path(config.input_path)
    if path.is_dir():
        results = {}
        code = PASS
        for f in sorted(path.glob("*.json")):
            c, out = _run_one(RunConfig(config.command, str(f), config.xi, None, config.flags))
            results[f.name] = {"exit": c, "result": out}
            code = max(code, c)
        text = dumps(results)
    else:
        code, out = _run_one(config)
        text = dumps(out)
    if config.output_path:
        Path(config.output_path).write_text(text + "\n")
    return code, text


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="circleloc", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("input", help="JSON input file, a directory of them, or the name of a bundled example")
    ap.add_argument("--xi", help="circle direction as comma-separated integers, e.g. 1,2,4,8")
    ap.add_argument("--class", dest="cls", help="class expression for integrate, e.g. omega^4 or tau:0*canon:v1")
    ap.add_argument("--kernel", action="store_true",
                    help="contradict: replace the given coefficients by a kernel vector")
    ap.add_argument("-o", "--output", help="also write the JSON result to this file")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    path = args.input
    if not Path(path).exists() and bundled(path).exists():
        path = str(bundled(path))
    try:
        xi = parse_xi(args.xi) if args.xi else None
    except InputError as exc:
        print(dumps({"error": str(exc)}))
        return BAD_INPUT
    flags = {"kernel": args.kernel}
    if args.cls:
        flags["class"] = args.cls
    code, text = run(RunConfig(args.command, path, xi, args.output, flags))
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
