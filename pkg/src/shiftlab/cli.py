"""Command-line front end.

Every subcommand emits JSONL records (one JSON object per line) with a
schema version, the library version, a hash of the effective configuration
and the seed, so identical invocations produce byte-identical output.
Exit codes: 0 success, 1 usage error, 2 domain error.
"""

import argparse
import hashlib
import json
import sys
from fractions import Fraction

from . import __version__
from .words import parse_word, format_word
from .shifts import parse_shift_spec, parse_gapset
from .graphs import block_graph
from .entropy import growth_entropy, perron_entropy, gap_entropy_root
from .hofbauer import (alpha_beta_map, neg_beta_map, map_from_branch_table,
                       golden_ratio, build_diagram, closed_component,
                       diagram_decomposition)
from .decomp import (natural_coded_decomposition, check_w_specification,
                     obstruction_upper_bound, enumerate_left_constraints,
                     enumerate_right_constraints, ank_table,
                     theoremc_multiplicity, Case1FatGapDecomposition,
                     WidenedGapDecomposition, f1_partial_at_root)
from .thermo import (LocallyConstantPotential, pressure, equilibrium_markov,
                     zero_temperature_path, geometric_schedule, measure_entropy)
from .ergopt import (max_ergodic_average, glue_subshift, glued_entropy,
                     distance_potential, maximizer_entropy_profile)
from .errors import ShiftLabError, InvalidSpecError

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_map_spec(spec: str):
    """Map spec strings: alphabeta:alpha=0:beta=2, negbeta:beta=1.8,
    pwm:file=<path>; beta/alpha accept decimals, fractions and 'golden'."""
    parts = spec.split(":")
    kind = parts[0]
    opts = {}
    for p in parts[1:]:
        if "=" not in p:
            raise InvalidSpecError(f"malformed map option {p!r}")
        k, v = p.split("=", 1)
        opts[k] = v

    def number(text):
        if text == "golden":
            return golden_ratio(), 200
        return Fraction(text), None

    if kind == "alphabeta":
        alpha, bits_a = number(opts.get("alpha", "0"))
        beta, bits_b = number(opts.get("beta", "2"))
        return alpha_beta_map(alpha, beta, dyadic_bits=bits_a or bits_b)
    if kind == "negbeta":
        beta, bits = number(opts.get("beta", "2"))
        return neg_beta_map(beta, dyadic_bits=bits)
    if kind == "pwm":
        rows = []
        with open(opts["file"], "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                lo, hi, slope, intercept = (Fraction(t) for t in line.split())
                rows.append((lo, hi, slope, intercept))
        return map_from_branch_table(rows)
    raise InvalidSpecError(f"unknown map kind {kind!r}")


def parse_betas(text: str) -> list[float]:
    """Geometric schedule grammar start:factor:stop."""
    toks = text.split(":")
    if len(toks) != 3:
        raise InvalidSpecError("beta schedule grammar is start:factor:stop")
    return geometric_schedule(float(toks[0]), float(toks[1]), float(toks[2]))


def emit(args, payload: dict, stream=sys.stdout):
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func",) and v is not None}
    blob = json.dumps(config, sort_keys=True, default=str)
    record = {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "command": args.command,
        "config_hash": hashlib.sha256(blob.encode()).hexdigest()[:16],
        "seed": getattr(args, "seed", 0),
    }
    record.update(payload)
    stream.write(json.dumps(record, sort_keys=True, default=str) + "\n")


def shift_of(args):
    return parse_shift_spec(args.shift, getattr(args, "horizon", None))


def graph_of(args, lang, r_needed: int = 1):
    k = getattr(args, "block", None)
    if k is None:
        k = max(r_needed - 1, 1)
    return block_graph(lang, k)


def decomposition_of(args, lang):
    kind = getattr(args, "kind", "natural")
    if kind == "natural":
        return natural_coded_decomposition(lang)
    if kind == "hofbauer":
        tmap = parse_map_spec(args.map)
        diagram = build_diagram(tmap, args.depth)
        comp = closed_component(diagram)
        return diagram_decomposition(diagram, comp, args.cut)
    if kind == "case1":
        return Case1FatGapDecomposition(lang)
    if kind == "widened":
        return WidenedGapDecomposition(lang)
    raise InvalidSpecError(f"unknown decomposition kind {kind!r}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_entropy(args):
    if args.method == "root":
        toks = args.shift.split(":")
        if toks[0] == "sgap":
            est = gap_entropy_root(parse_gapset(toks[1:]), 2, tol=args.tol)
        elif toks[0] == "fatsgap":
            n = int(toks[1][2:])
            est = gap_entropy_root(parse_gapset(toks[2:]), n, tol=args.tol)
        else:
            raise InvalidSpecError("root method applies to sgap/fatsgap specs")
    elif args.method == "perron":
        lang = shift_of(args)
        est = perron_entropy(graph_of(args, lang), tol=args.tol)
    else:
        lang = shift_of(args)
        est = growth_entropy(lang, args.n)
    emit(args, est.to_dict())


def cmd_count(args):
    lang = shift_of(args)
    emit(args, {"n": args.n, "count": lang.count_words(args.n)})


def cmd_words(args):
    lang = shift_of(args)
    words = lang.enumerate_words(args.n)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for w in words:
                fh.write(format_word(w) + "\n")
        emit(args, {"n": args.n, "count": len(words), "out": args.out})
    else:
        for w in words:
            sys.stdout.write(format_word(w) + "\n")


def cmd_decompose(args):
    if args.kind == "hofbauer":
        d = decomposition_of(args, None)
    else:
        d = decomposition_of(args, shift_of(args))
    est = obstruction_upper_bound(d, args.n)
    emit(args, est.to_dict())


def cmd_spec_check(args):
    if args.kind == "hofbauer":
        d = decomposition_of(args, None)
    else:
        d = decomposition_of(args, shift_of(args))
    cert = check_w_specification(d, args.M, args.tmax, args.len, seed=args.seed)
    emit(args, cert.to_dict())


def cmd_constraints(args):
    lang = shift_of(args)
    fn = enumerate_left_constraints if args.side == "left" else enumerate_right_constraints
    found = fn(lang, args.n, args.ext)
    emit(args, {"side": args.side, "n": args.n, "count": len(found),
                "constraints": [{"word": format_word(w), "witness": format_word(v)}
                                for w, v in found]})


def cmd_hofbauer(args):
    tmap = parse_map_spec(args.map)
    diagram = build_diagram(tmap, args.depth)
    payload = {
        "map": tmap.label,
        "vertices": len(diagram.vertices),
        "edges": len(diagram.edges),
        "depth": diagram.depth,
        "complete": diagram.complete,
    }
    try:
        comp = closed_component(diagram)
        sub, _ = diagram.vertex_graph().subgraph(comp.vertex_ids)
        payload["component_size"] = len(comp.vertex_ids)
        payload["component_entropy"] = perron_entropy(sub).value
        payload["component_certified_closed"] = comp.certified_closed
    except ShiftLabError as exc:
        payload["component_error"] = str(exc)
    if args.export:
        with open(args.export + ".edges", "w", encoding="utf-8") as fh:
            for src, label, dst in diagram.edges:
                fh.write(f"{src} {label} {dst}\n")
        with open(args.export + ".vertices", "w", encoding="utf-8") as fh:
            for v in diagram.vertices:
                fh.write(f"{v.vid} {v.symbol} {float(v.lo)!r} {float(v.hi)!r}\n")
        payload["export"] = args.export
    emit(args, payload)


def cmd_pressure(args):
    lang = shift_of(args)
    phi = LocallyConstantPotential.from_file(args.pot)
    graph = graph_of(args, lang, phi.r)
    rep = pressure(graph, phi, args.beta)
    emit(args, rep.to_dict())


def cmd_equilibrium(args):
    lang = shift_of(args)
    phi = LocallyConstantPotential.from_file(args.pot)
    graph = graph_of(args, lang, phi.r)
    mu = equilibrium_markov(graph, phi, args.beta)
    emit(args, {
        "beta": args.beta,
        "entropy": measure_entropy(mu),
        "integral": mu.expectation(phi),
        "stationary": [float(x) for x in mu.stationary],
        "transitions": [
            {"src": format_word(graph.state_words[e.src]),
             "word": format_word(e.word), "p": float(p)}
            for e, p in zip(mu.graph.edges, mu.edge_probs)],
    })


def cmd_zerotemp(args):
    lang = shift_of(args)
    f = LocallyConstantPotential.from_file(args.pot)
    graph = graph_of(args, lang, f.r)
    for point in zero_temperature_path(graph, f, parse_betas(args.betas)):
        emit(args, point.to_dict())


def cmd_maximize(args):
    lang = shift_of(args)
    f = LocallyConstantPotential.from_file(args.pot)
    graph = graph_of(args, lang, f.r)
    res = max_ergodic_average(graph, f)
    emit(args, {"value": float(res["value"]),
                "cycle_word": format_word(res["cycle"].word()),
                "cycle_length": res["cycle"].length()})


def cmd_glue(args):
    lang = shift_of(args)
    with open(args.words, "r", encoding="utf-8") as fh:
        blocks = [parse_word(line) for line in fh if line.strip()]
    glued = glue_subshift(blocks, lang, args.t, horizon=args.n + 1)
    growth = growth_entropy(glued, args.n)
    exact = glued_entropy(glued)
    emit(args, {"t": args.t, "blocks": len(blocks),
                "growth_entropy": growth.value, "exact_entropy": exact.value})


def cmd_profile(args):
    lang = shift_of(args)
    f = LocallyConstantPotential.from_file(args.pot)
    graph = graph_of(args, lang, f.r)
    rep = maximizer_entropy_profile(graph, f, parse_betas(args.betas))
    rep["cycle_word"] = format_word(rep["cycle_word"])
    emit(args, rep)


def cmd_theoremc(args):
    gaps = parse_gapset(args.S.split(":"))
    horizon = 2 ** (args.ell + 1) + 2
    from .shifts import build_fat_sgap
    lang = build_fat_sgap(gaps, args.N, horizon=horizon)
    if args.case == "1":
        d = Case1FatGapDecomposition(lang)
    elif args.case == "2":
        d = WidenedGapDecomposition(lang)
    else:
        d = natural_coded_decomposition(lang)
    rep = theoremc_multiplicity(gaps, args.N, d, args.ell, case="auto")
    emit(args, rep.to_dict())


def cmd_ank(args):
    gaps = parse_gapset(args.S.split(":"))
    table = ank_table(gaps, args.N, args.nmax, args.kmax)
    root = gap_entropy_root(gaps, args.N, tol=1e-10)
    partial_lo, partial_hi = f1_partial_at_root(gaps, args.N, root.extras["x0"])
    emit(args, {
        "row_sums_ok": table.row_sums_ok,
        "entries": {f"A[{n}][{k}]": table.a(n, k)
                    for n in range(1, min(args.nmax, 8) + 1)
                    for k in range(1, min(args.kmax, 4) + 1)},
        "f1_at_root": [partial_lo, partial_hi],
        "root_entropy": root.value,
    })


def build_parser() -> Parser:
    p = Parser(prog="shiftlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, shift=True):
        if shift:
            sp.add_argument("--shift", required=True, help="shift spec string")
            sp.add_argument("--horizon", type=int, default=None)
        sp.add_argument("--seed", type=int, default=0)
        return sp

    sp = common(sub.add_parser("entropy"))
    sp.add_argument("--method", choices=["growth", "perron", "root"], default="growth")
    sp.add_argument("--n", type=int, default=12)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--block", type=int, default=None)
    sp.set_defaults(func=cmd_entropy)

    sp = common(sub.add_parser("count"))
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_count)

    sp = common(sub.add_parser("words"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_words)

    sp = common(sub.add_parser("decompose"))
    sp.add_argument("--kind", choices=["natural", "hofbauer", "case1", "widened"],
                    default="natural")
    sp.add_argument("--n", type=int, default=12)
    sp.add_argument("--map", default=None)
    sp.add_argument("--depth", type=int, default=16)
    sp.add_argument("--cut", type=int, default=1)
    sp.set_defaults(func=cmd_decompose)

    sp = common(sub.add_parser("spec-check"))
    sp.add_argument("--kind", choices=["natural", "hofbauer", "case1", "widened"],
                    default="natural")
    sp.add_argument("--M", type=int, default=1)
    sp.add_argument("--tmax", type=int, default=6)
    sp.add_argument("--len", type=int, default=8)
    sp.add_argument("--map", default=None)
    sp.add_argument("--depth", type=int, default=16)
    sp.add_argument("--cut", type=int, default=1)
    sp.set_defaults(func=cmd_spec_check)

    sp = common(sub.add_parser("constraints"))
    sp.add_argument("--side", choices=["left", "right"], default="left")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--ext", type=int, default=6)
    sp.set_defaults(func=cmd_constraints)

    sp = common(sub.add_parser("hofbauer"), shift=False)
    sp.add_argument("--map", required=True)
    sp.add_argument("--depth", type=int, default=16)
    sp.add_argument("--export", default=None)
    sp.set_defaults(func=cmd_hofbauer)

    for name, fn in (("pressure", cmd_pressure), ("equilibrium", cmd_equilibrium)):
        sp = common(sub.add_parser(name))
        sp.add_argument("--pot", required=True)
        sp.add_argument("--beta", type=float, default=1.0)
        sp.add_argument("--block", type=int, default=None)
        sp.set_defaults(func=fn)

    sp = common(sub.add_parser("zerotemp"))
    sp.add_argument("--pot", required=True)
    sp.add_argument("--betas", default="2:2:65536")
    sp.add_argument("--block", type=int, default=None)
    sp.set_defaults(func=cmd_zerotemp)

    sp = common(sub.add_parser("maximize"))
    sp.add_argument("--pot", required=True)
    sp.add_argument("--block", type=int, default=None)
    sp.set_defaults(func=cmd_maximize)

    sp = common(sub.add_parser("glue"))
    sp.add_argument("--words", required=True, help="file of words to glue")
    sp.add_argument("--t", type=int, default=0)
    sp.add_argument("--n", type=int, default=64)
    sp.set_defaults(func=cmd_glue)

    sp = common(sub.add_parser("profile"))
    sp.add_argument("--pot", required=True)
    sp.add_argument("--betas", default="1:2:4096")
    sp.add_argument("--block", type=int, default=None)
    sp.set_defaults(func=cmd_profile)

    sp = common(sub.add_parser("theoremc"), shift=False)
    sp.add_argument("--N", type=int, default=3)
    sp.add_argument("--ell", type=int, default=2)
    sp.add_argument("--case", choices=["auto", "1", "2"], default="auto")
    sp.add_argument("--S", default="powers:2")
    sp.set_defaults(func=cmd_theoremc)

    sp = common(sub.add_parser("ank"), shift=False)
    sp.add_argument("--S", default="powers:2")
    sp.add_argument("--N", type=int, default=3)
    sp.add_argument("--nmax", type=int, default=16)
    sp.add_argument("--kmax", type=int, default=5)
    sp.set_defaults(func=cmd_ank)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    try:
        args.func(args)
    except ShiftLabError as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2
    except FileNotFoundError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
