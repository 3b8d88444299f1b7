"""Command-line entry point: ``blockforge <subcommand> ...``.

Exit codes: 0 success or verified, 1 a computed negative answer (not
realized, infeasible), 2 usage or input error, 3 a resource budget ran out.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .errors import BlockforgeError, GeometryError, NotRealizableError, ResourceLimitError, ValidationError

OK, NEGATIVE, USAGE, BUDGET = 0, 1, 2, 3
log = logging.getLogger("blockforge")


class _Out:
    """Human-readable or JSON reporting on stdout."""

    def __init__(self, as_json: bool, quiet: bool):
        self.as_json, self.quiet = as_json, quiet

    def emit(self, data: dict, text: str | None = None) -> None:
        if self.as_json:
            print(json.dumps(data, indent=2, default=str))
        elif not self.quiet:
            print(text if text is not None else _pretty(data))


def _pretty(data, indent=0) -> str:
    lines = []
    pad = "  " * indent
    for key, value in data.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_pretty(value, indent + 1))
        elif isinstance(value, list) and len(value) > 12:
            lines.append(f"{pad}{key}: [{len(value)} items]")
        else:
            lines.append(f"{pad}{key}: {value}")
    return "\n".join(lines)


def _dims(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError as exc:
        raise ValidationError(f"dimensions look like 3x2, got {text!r}") from exc


def _language(arg: str):
    """A language file, a catalog / gate name, or an expression prefixed with ``expr:``."""
    from .io import load_language
    from .languages import BooleanFunction, named_language, truth_table_language

    if os.path.exists(arg):
        return load_language(arg)
    if arg.startswith("expr:"):
        return truth_table_language(BooleanFunction.from_expression(arg[5:]))
    try:
        from .catalog import NAMES, language_of

        if arg in NAMES:
            return language_of(arg)
        return named_language(arg)
    except ValidationError as exc:
        raise ValidationError(f"{arg!r} is neither a file nor a known language name") from exc


def _complex(arg: str):
    from .io import load_complex

    if os.path.exists(arg):
        return load_complex(arg)
    from .catalog import NAMES, catalog

    if arg in NAMES:
        return catalog(arg).complex
    raise ValidationError(f"{arg}: no such file or catalog entry")


def _save(path, cplx) -> None:
    from .io import save_complex

    if path:
        save_complex(path, cplx)


# ------------------------------------------------------------------ commands


def cmd_gsm(args, out: _Out) -> int:
    from .gsm import enumerate_gsm
    from .io import manifold_to_dict

    cplx = _complex(args.complex)
    gsm = enumerate_gsm(cplx, strategy=args.strategy, max_atoms=args.max_atoms)
    data = manifold_to_dict(cplx, gsm)
    if args.output:
        from .io import write_json

        write_json(args.output, data)
    text = [f"ground energy {data['ground_energy']}, gap {data['gap']}, {len(gsm.masks)} ground states"]
    text += [f"  {g['ports']}  occupied {g['occupied']}" for g in data["ground_states"][:64]]
    if args.vdw:
        data["vdw"] = _vdw_report(cplx, gsm, args.c6)
        v = data["vdw"]
        text.append(f"vdW (C6={args.c6}): logical width {v['width']:.6g}, gap {v['gap']:.6g}, ratio {v['ratio']:.6g}")
        text += [f"  {c['occupation']}  E={c['energy']:.6g}" for c in v["lowest"]]
    out.emit(data, "\n".join(text))
    return OK


def _vdw_report(cplx, gsm, c6) -> dict:
    import numpy as np

    from .gsm import vdw_energies, vdw_quality

    if cplx.positions is None:
        raise ValidationError("the vdW model needs positions")
    if c6 is None or c6 <= 0:
        raise ValidationError("--vdw needs a positive --c6")
    e = vdw_energies(cplx.positions, cplx.detunings, c6)
    width, gap, ratio = vdw_quality(cplx.positions, cplx.detunings, c6, gsm.masks)
    order = np.argsort(e, kind="stable")[:16]
    n = cplx.n_atoms
    lowest = [{"occupation": "".join(str(int(m) >> i & 1) for i in range(n)), "energy": float(e[m])} for m in order]
    return {"c6": c6, "width": width, "gap": gap, "ratio": ratio, "lowest": lowest}


def cmd_verify(args, out: _Out) -> int:
    from .gsm import realizes_language

    cplx = _complex(args.complex)
    lang = _language(args.language)
    verdict = realizes_language(cplx, lang, max_atoms=args.max_atoms)
    gsm = verdict.manifold
    data = {"realizes": verdict.ok, "reason": verdict.reason, "ground_states": len(gsm.masks),
            "ground_energy": str(gsm.ground_energy), "gap": str(gsm.gap)}
    if not verdict.ok:
        print(f"counterexample: {verdict.reason}", file=sys.stderr)
    out.emit(data, "realizes the language" if verdict.ok else "does not realize the language")
    return OK if verdict.ok else NEGATIVE


def cmd_amalgamate(args, out: _Out) -> int:
    from .amalgamation import Placement, amalgamate, verify_amalgamation

    c1, c2 = _complex(args.first), _complex(args.second)
    placement = Placement.parse(args.placement) if args.placement else None
    demote = False if args.keep_ports else None
    result = amalgamate(c1, c2, args.gamma, placement=placement, abstract=args.abstract or None, demote=demote,
                        allow_cross_blockade=args.allow_cross_blockade)
    report = verify_amalgamation(c1, c2, args.gamma, result, demote=demote, max_atoms=None)
    _save(args.output, result)
    data = {"atoms": result.n_atoms, "ports": list(result.port_labels), **report.as_dict()}
    out.emit(data)
    return OK if report.ok else NEGATIVE


def cmd_compile(args, out: _Out) -> int:
    from .compiler import compile_function, constrain_output
    from .languages import BooleanFunction

    if args.expr is not None:
        f = BooleanFunction.from_expression(args.expr, args.inputs)
    else:
        if args.inputs is None:
            raise ValidationError("--table needs --inputs")
        f = BooleanFunction.from_index(args.inputs, int(args.table, 0))
    res = compile_function(f, crossover=args.crossover, wires=args.wires, nor_variant=args.nor,
                           geometric=args.geometric, verify=not args.no_verify)
    cplx = res.complex
    if args.constrain is not None:
        cplx = constrain_output(cplx, "y", args.constrain)
    _save(args.output, cplx)
    data = {**res.summary(), "atoms": cplx.n_atoms, "ports": list(cplx.port_labels)}
    out.emit(data)
    return OK if res.verified is not False else NEGATIVE


def cmd_search(args, out: _Out) -> int:
    from .search import check_unit_disk, distinct_graphs, search_minimal

    lang = _language(args.language)
    res = search_minimal(lang, args.atoms, find_all=args.all, time_budget=args.time_budget,
                         max_nodes=args.max_nodes, exact_size=args.exact_size)
    data = res.summary()
    if res.solutions:
        from .io import complex_to_dict

        sols = distinct_graphs([s.complex for s in res.solutions], lang) if args.all else [res.solutions[0].complex]
        data["distinct_solutions"] = len(sols)
        if args.geometry:
            data["unit_disk"] = [check_unit_disk(c.graph, seed=args.seed).status for c in sols]
        if args.output:
            from .io import write_json

            write_json(args.output, [complex_to_dict(c) for c in sols])
    if res.feasible is None:
        out.emit(data, f"undecided within the budget: {res.note}")
        return BUDGET
    if res.feasible:
        out.emit(data, f"feasible with {args.atoms} atoms\n" + _pretty(data))
        return OK
    out.emit(data, f"infeasible with at most {args.atoms} atoms "
                   f"({res.certificates} verified Farkas certificates, {res.nodes} nodes)")
    return NEGATIVE


def cmd_metrics(args, out: _Out) -> int:
    from .metrics import geometry_report

    cplx = _complex(args.complex)
    if cplx.positions is None:
        raise ValidationError("metrics need a complex with positions")
    rep = geometry_report(cplx)
    data = {**rep.as_dict(), "geometry_consistent": cplx.geometry_consistent()}
    out.emit(data)
    return OK if rep.valid else NEGATIVE


def cmd_optimize(args, out: _Out) -> int:
    from .optimizer import AnnealConfig, optimize_geometry

    cplx = _complex(args.complex)
    config = AnnealConfig(max_iterations=args.iterations, restarts=args.restarts, seed=args.seed)
    res = optimize_geometry(cplx, args.objective, config, c6=args.c6, jobs=args.jobs)
    if args.trace:
        res.write_trace(args.trace)
    _save(args.output, res.complex)
    data = {"objective": res.objective, "success": res.success, "restart_objectives": res.restart_objectives,
            **res.report.as_dict()}
    out.emit(data)
    return OK if res.success else NEGATIVE


def cmd_lang(args, out: _Out) -> int:
    from .io import language_to_dict, write_json
    from .languages import (BooleanFunction, LatticeSpec, fib_check, language_summary, named_language,
                            parity_check, tessellated_language, truth_table_language)

    needed = {"truth-table": "expr", "tessellate": "lattice", "named": "name"}.get(args.mode)
    if needed and not getattr(args, needed):
        raise ValidationError(f"lang {args.mode} needs --{needed}")
    if args.expr:
        lang = truth_table_language(BooleanFunction.from_expression(args.expr, args.inputs))
    elif args.name:
        from .catalog import NAMES, language_of

        lang = language_of(args.name) if args.name in NAMES else named_language(args.name)
    elif args.lattice:
        check = {"parity": parity_check, "z2": parity_check, "fib": fib_check}[args.check]
        lang = tessellated_language(LatticeSpec(args.lattice, _dims(args.dims), _boundary(args.boundary)), check)
    else:
        raise ValidationError("give --expr, --name or --lattice")
    if args.output:
        write_json(args.output, language_to_dict(lang))
    out.emit({"word_length": lang.word_length, "size": len(lang), "words": lang.strings()},
             language_summary(lang))
    return OK


def cmd_catalog(args, out: _Out) -> int:
    from .catalog import NAMES, catalog

    if args.action == "list":
        rows = []
        for name in NAMES:
            e = catalog(name)
            rows.append({"name": name, "atoms": e.complex.n_atoms, "minimal_atom_count": e.minimal_atom_count,
                         "robustness": e.verification.get("robustness"), "description": e.description})
        text = "\n".join(
            f"{r['name']:<13} {r['atoms']:>3} atoms  xi={r['robustness'] if r['robustness'] is None else round(r['robustness'], 4)}"
            f"  {r['description']}" for r in rows)
        out.emit({"entries": rows}, text)
        return OK
    if not args.name:
        raise ValidationError("catalog show needs a name")
    entry = catalog(args.name)
    if args.output:
        _save(args.output, entry.complex)
    if args.language_output:
        from .io import language_to_dict, write_json

        write_json(args.language_output, language_to_dict(entry.language))
    data = entry.as_dict()
    out.emit(data, _pretty({k: v for k, v in data.items() if k != "complex"}))
    return OK


def _boundary(text: str) -> str:
    return {"open": "open-rough", "rough": "open-rough", "smooth": "open-smooth"}.get(text, text)


def cmd_tessellate(args, out: _Out) -> int:
    from .languages import LatticeSpec
    from .tessellation import build_fibonacci, build_surface_code

    dims = _dims(args.dims)
    boundary = _boundary(args.boundary)
    if args.model == "surface-code":
        tess = build_surface_code(LatticeSpec("square", dims, boundary), geometric=args.geometric)
    else:
        tess = build_fibonacci(LatticeSpec("honeycomb", dims, boundary), interposer=args.interposer,
                               geometric=args.geometric)
    if args.verify:
        tess.verify()
    _save(args.output, tess.complex)
    out.emit(tess.summary())
    return NEGATIVE if tess.verified is False else OK


def cmd_render(args, out: _Out) -> int:
    from .render import write_svg

    cplx = _complex(args.complex)
    target = args.output or os.path.splitext(os.path.basename(args.complex))[0] + ".svg"
    write_svg(target, cplx, disks=not args.no_disks)
    out.emit({"written": target})
    return OK


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    def global_flags(parser, default):
        # subcommands repeat the flags with suppressed defaults so they do not mask the global ones
        parser.add_argument("--jobs", type=int, default=default(os.cpu_count() or 1), help="worker processes")
        parser.add_argument("--seed", type=int, default=default(0))
        parser.add_argument("--quiet", action="store_true", default=default(False))
        parser.add_argument("--json", action="store_true", default=default(False), help="machine-readable stdout")

    p = argparse.ArgumentParser(prog="blockforge", description="Design and verify Rydberg-atom complexes.")
    global_flags(p, lambda v: v)
    sub = p.add_subparsers(dest="command", metavar="command")

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        global_flags(sp, lambda v: argparse.SUPPRESS)
        sp.set_defaults(func=func)
        return sp

    sp = add("gsm", cmd_gsm, "enumerate the ground-state manifold of a complex")
    sp.add_argument("complex")
    sp.add_argument("--strategy", choices=["auto", "mis", "elimination"], default="auto")
    sp.add_argument("--vdw", action="store_true", help="also report energies with C6/r^6 interactions")
    sp.add_argument("--c6", type=float, default=None)
    sp.add_argument("--max-atoms", type=int, default=None)
    sp.add_argument("-o", "--output")

    sp = add("verify", cmd_verify, "check that a complex realizes a language")
    sp.add_argument("complex")
    sp.add_argument("language", help="language JSON, a name such as NOR, or expr:<expression>")
    sp.add_argument("--max-atoms", type=int, default=None)

    sp = add("amalgamate", cmd_amalgamate, "identify ports of two complexes")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--gamma", required=True, help="port pairs, e.g. Q:A or Q:A,R:B")
    sp.add_argument("--placement", help="dx,dy,theta[,mirror] for the second complex")
    sp.add_argument("--abstract", action="store_true")
    sp.add_argument("--keep-ports", action="store_true", help="never demote identified ports")
    sp.add_argument("--allow-cross-blockade", action="store_true")
    sp.add_argument("-o", "--output")

    sp = add("compile", cmd_compile, "compile a Boolean function into a complex")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--expr", help='e.g. "x1 nor x2"')
    src.add_argument("--table", help="truth table as an integer (row 0 is the lowest bit)")
    sp.add_argument("--inputs", type=int)
    sp.add_argument("--constrain", type=int, choices=[0, 1])
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--abstract", action="store_true", help="blockade graph and detunings only (default)")
    mode.add_argument("--geometric", action="store_true", help="also synthesize a unit-disk layout")
    sp.add_argument("--crossover", choices=["complex", "gates"], default="complex")
    sp.add_argument("--wires", choices=["direct", "lnk"], default="direct")
    sp.add_argument("--nor", choices=["NOR_triangle", "NOR_ring"], default="NOR_triangle")
    sp.add_argument("--no-verify", action="store_true")
    sp.add_argument("-o", "--output")

    sp = add("search", cmd_search, "decide whether a language fits in a number of atoms")
    sp.add_argument("language")
    sp.add_argument("--atoms", type=int, required=True)
    sp.add_argument("--all", action="store_true", help="report every solution up to symmetry")
    sp.add_argument("--exact-size", action="store_true")
    sp.add_argument("--time-budget", type=float)
    sp.add_argument("--max-nodes", type=int)
    sp.add_argument("--geometry", action="store_true", help="try to embed the solutions as unit-disk graphs")
    sp.add_argument("-o", "--output")

    sp = add("metrics", cmd_metrics, "robustness, spread and validity of a geometry")
    sp.add_argument("complex")

    sp = add("optimize", cmd_optimize, "optimize a geometry")
    sp.add_argument("complex")
    sp.add_argument("--objective", choices=["robustness", "vdw"], default="robustness")
    sp.add_argument("--c6", type=float)
    sp.add_argument("--iterations", type=int, default=2000)
    sp.add_argument("--restarts", type=int, default=8)
    sp.add_argument("--trace", help="CSV file for the best run's trace")
    sp.add_argument("-o", "--output")

    sp = add("lang", cmd_lang, "build a language")
    sp.add_argument("mode", nargs="?", choices=["truth-table", "tessellate", "named"],
                    help="optional; restricts which of --expr, --lattice, --name is expected")
    sp.add_argument("--expr")
    sp.add_argument("--inputs", type=int)
    sp.add_argument("--name")
    sp.add_argument("--lattice", choices=["square", "honeycomb"])
    sp.add_argument("--dims", default="2x2")
    sp.add_argument("--boundary", default="periodic")
    sp.add_argument("--check", choices=["parity", "z2", "fib"], default="parity")
    sp.add_argument("-o", "--output")

    sp = add("catalog", cmd_catalog, "list or show built-in complexes")
    sp.add_argument("action", choices=["list", "show"])
    sp.add_argument("name", nargs="?")
    sp.add_argument("-o", "--output", help="write the complex")
    sp.add_argument("--language-output", help="write the language")

    sp = add("tessellate", cmd_tessellate, "tile a lattice with a cell complex")
    sp.add_argument("--model", choices=["surface-code", "fibonacci"], required=True)
    sp.add_argument("--dims", required=True, help="LxW, e.g. 2x2")
    sp.add_argument("--boundary", default="periodic",
                    choices=["periodic", "open", "rough", "smooth", "open-rough", "open-smooth"])
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--interposer", action="store_true", help="LNK on every interior Fibonacci edge")
    sp.add_argument("--geometric", action="store_true")
    sp.add_argument("-o", "--output")

    sp = add("render", cmd_render, "draw a complex as SVG")
    sp.add_argument("complex")
    sp.add_argument("--no-disks", action="store_true")
    sp.add_argument("-o", "--output")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return USAGE
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    out = _Out(args.json, args.quiet)
    try:
        return args.func(args, out)
    except ResourceLimitError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return BUDGET
    except NotRealizableError as exc:
        print(f"negative result: {exc}", file=sys.stderr)
        return NEGATIVE
    except (ValidationError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except BlockforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
