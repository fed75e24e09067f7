"""Command-line entry point: ``qssamp <subcommand> [--flags]``.

Exit codes: 0 success, 2 validation, 3 no valid target state, 4 simulation,
5 I/O, 6 sensitivity range, 7 ensemble generation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import analog_sim, cost_model, interpolation, markov_core
from .errors import NoValidJError, QSSampError, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NO_VALID_J = 3
EXIT_SIMULATION = 4
EXIT_IO = 5
EXIT_SENSITIVITY = 6
EXIT_GENERATION = 7


class CommandError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _emit(text, out=None):
    if out:
        try:
            with open(out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise CommandError(EXIT_IO, f"cannot write {out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _load(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CommandError(EXIT_IO, f"cannot read {path}: {exc}") from exc
    try:
        return markov_core.chain_from_json(text)
    except ValidationError as exc:
        raise CommandError(EXIT_VALIDATION, f"{path}: {type(exc).__name__}: {exc}") from exc


def _dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args):
    params = {k: getattr(args, k) for k in ("p", "q", "laziness", "up", "down") if getattr(args, k) is not None}
    try:
        chain = markov_core.gen_family(args.family, args.n, args.seed, **params)
    except ValidationError as exc:
        raise CommandError(EXIT_GENERATION, str(exc)) from exc
    _emit(markov_core.chain_to_json(chain) + "\n", args.out)


def cmd_analyze(args):
    chain = _load(args.chain)
    if not 0 <= args.j < chain.n:
        raise CommandError(EXIT_VALIDATION, f"--j {args.j} out of range for n={chain.n}")
    stats = markov_core.chain_statistics(chain, args.eps_mix, args.j)
    pi_j = float(stats.pi[args.j])
    doc = {
        "n": chain.n,
        "pi": stats.pi.tolist(),
        "delta": stats.delta,
        "t_mix": stats.t_mix,
        "eps_mix": stats.eps_mix,
        "t_hit": stats.t_hit,
        "j": args.j,
        "reversible": markov_core.is_reversible(chain, stats.pi),
        "s_star": 1.0 - pi_j / (1.0 - pi_j) if 0.0 < pi_j < 0.5 else "undefined",
    }
    if args.format == "csv":
        keys = ["n", "delta", "t_mix", "eps_mix", "t_hit", "j", "reversible", "s_star"]
        text = ",".join(keys) + "\n" + ",".join(str(doc[k]) for k in keys) + "\n"
    else:
        text = _dumps(doc)
    _emit(text, args.out)


def cmd_interp(args):
    chain = _load(args.chain)
    if not 0 <= args.j < chain.n:
        raise CommandError(EXIT_VALIDATION, f"--j {args.j} out of range for n={chain.n}")
    try:
        Ps = interpolation.interpolated_chain(chain, args.j, args.s)
        pi = markov_core.stationary_distribution(chain)
        doc = {"j": args.j, "s": args.s, "P": Ps.P.tolist()}
        if args.s < 1.0 and markov_core.is_reversible(chain, pi):
            doc["pi_s"] = interpolation.interpolated_stationary(chain, args.j, args.s, pi).tolist()
        pj = float(pi[args.j])
        doc["s_star"] = 1.0 - pj / (1.0 - pj) if 0.0 < pj < 0.5 else "undefined"
    except ValidationError as exc:
        raise CommandError(EXIT_VALIDATION, str(exc)) from exc
    _emit(_dumps(doc), args.out)


def cmd_simulate(args):
    chain = _load(args.chain)
    if not 0 <= args.j < chain.n:
        raise CommandError(EXIT_VALIDATION, f"--j {args.j} out of range for n={chain.n}")
    try:
        sp = "auto" if args.s_prime == "auto" else float(args.s_prime)
        config = analog_sim.ProtocolConfig(
            eps=args.eps,
            s_prime=sp,
            gap_estimate_stage1=args.gap_stage1,
            gap_estimate_stage2=args.gap_stage2,
            copies_stage1=args.copies,
            copies_stage2=args.copies,
            t_per_round=args.t_per_round,
            pointer_size=args.pointer_size,
            mode=args.mode,
            seed=args.seed,
        )
    except ValueError as exc:
        raise CommandError(EXIT_VALIDATION, str(exc)) from exc
    try:
        result = analog_sim.run_protocol(chain, args.j, config)
    except NoValidJError as exc:
        raise CommandError(EXIT_NO_VALID_J, str(exc)) from exc
    except QSSampError as exc:
        raise CommandError(EXIT_SIMULATION, f"{type(exc).__name__}: {exc}") from exc
    _emit(_dumps(result.to_dict()), args.out)


def _sweep_file(outdir, eps, pi_j):
    return os.path.join(outdir, f"sweep_eps{eps:g}_pij{pi_j:g}.csv")


def cmd_sweep(args):
    try:
        rows = cost_model.sweep_AB(args.pi_j, args.eps, args.grid)
    except ValidationError as exc:
        raise CommandError(EXIT_VALIDATION, str(exc)) from exc
    if args.format == "json":
        text = _dumps({"columns": ["s_prime", "alpha", "beta", "A", "B"], "rows": rows.tolist(),
                       "summary": cost_model.sweep_summary(args.pi_j, args.eps, rows)})
    else:
        text = cost_model.sweep_to_csv(rows)
    _emit(text, args.out)


def cmd_figure1(args):
    try:
        os.makedirs(args.out, exist_ok=True)
    except OSError as exc:
        raise CommandError(EXIT_IO, f"cannot create {args.out}: {exc}") from exc
    for eps, pi_j in cost_model.FIGURE1_PRESETS:
        rows = cost_model.sweep_AB(pi_j, eps, args.grid)
        path = _sweep_file(args.out, eps, pi_j)
        _emit(cost_model.sweep_to_csv(rows), path)
        s = cost_model.sweep_summary(pi_j, eps, rows)
        sys.stdout.write(
            f"eps={eps:g} pi_j={pi_j:g} s_star={s['s_star']:.17g} argmin_A={s['argmin_A']:.17g} "
            f"min_A={s['min_A']:.17g} file={path}\n"
        )


def cmd_sensitivity(args):
    bad = [c for c in args.C if not 0.0 < c < 2.0]
    if bad:
        raise CommandError(
            EXIT_SENSITIVITY,
            f"C values out of (0, 2): {', '.join(format(c, 'g') for c in bad)}; "
            "a gap estimate at least twice the true gap gives no overlap guarantee",
        )
    rows = [cost_model.compare_sensitivity_routes(c, args.eps, args.delta) for c in args.C]
    for r in rows:
        r["which_gap"] = args.which_gap
    keys = ["C", "eps", "delta", "which_gap", "copies", "baseline_copies", "delta_overlap",
            "extra_copies_cost", "alt_cost", "cheaper"]
    if args.format == "json":
        text = _dumps(rows)
    else:
        lines = [",".join(keys)]
        for r in rows:
            lines.append(",".join(format(r[k], ".17g") if isinstance(r[k], float) else str(r[k]) for k in keys))
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)


def _hitbound_ensemble(args):
    out = []
    for family in args.family:
        for n in range(args.n_min, args.n_max + 1):
            for k in range(args.count):
                seed = args.seed + k
                chain = markov_core.gen_family(family, n, seed)
                pi = markov_core.stationary_distribution(chain)
                j = int(interpolation.valid_targets(pi)[np.argmin(pi[interpolation.valid_targets(pi)])])
                out.append((f"{family}-n{n}-seed{seed}", chain, j))
    return out


def cmd_hitbound(args):
    try:
        ens = _hitbound_ensemble(args)
    except (ValidationError, NoValidJError) as exc:
        raise CommandError(EXIT_GENERATION, str(exc)) from exc
    rule = "star" if args.s_prime == "star" else float(args.s_prime)
    rows = cost_model.hitbound_audit(ens, rule, archive_dir=args.archive)
    _emit(cost_model.hitbound_to_csv(rows), args.out)


# ---------------------------------------------------------------------------
# parser


def _unit_float(text):
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"{text} is not finite")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="qssamp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a chain from a named family")
    g.add_argument("--family", required=True, choices=sorted(markov_core.FAMILIES))
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    for name in ("p", "q", "laziness", "up", "down"):
        g.add_argument(f"--{name}", type=_unit_float)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", help="stationary distribution, gap, mixing and hitting times")
    a.add_argument("chain")
    a.add_argument("--eps-mix", type=_unit_float, default=0.25)
    a.add_argument("--j", type=int, default=0)
    a.add_argument("--format", choices=["json", "csv"], default="json")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    i = sub.add_parser("interp", help="interpolated chain P(s) toward an absorbing state")
    i.add_argument("chain")
    i.add_argument("--j", type=int, required=True)
    i.add_argument("--s", type=_unit_float, required=True)
    i.add_argument("--out")
    i.set_defaults(func=cmd_interp)

    s = sub.add_parser("simulate", help="run the two-stage pointer protocol")
    s.add_argument("chain")
    s.add_argument("--j", type=int, required=True)
    s.add_argument("--eps", type=_unit_float, default=0.05)
    s.add_argument("--s-prime", default="auto")
    s.add_argument("--gap-stage1", type=_unit_float)
    s.add_argument("--gap-stage2", type=_unit_float)
    s.add_argument("--copies", type=int)
    s.add_argument("--t-per-round", type=_unit_float)
    s.add_argument("--pointer-size", type=int)
    s.add_argument("--mode", choices=["exact-conditional", "sampled"], default="exact-conditional")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--format", choices=["json"], default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="A and B coefficients over a grid of s'")
    w.add_argument("--pi-j", type=_unit_float, required=True)
    w.add_argument("--eps", type=_unit_float, required=True)
    w.add_argument("--grid", type=int, default=512)
    w.add_argument("--format", choices=["csv", "json"], default="csv")
    w.add_argument("--out")
    w.set_defaults(func=cmd_sweep)

    f = sub.add_parser("figure1", help="sweeps for the two reference (eps, pi_j) presets")
    f.add_argument("--out", required=True, help="output directory")
    f.add_argument("--grid", type=int, default=512)
    f.set_defaults(func=cmd_figure1)

    c = sub.add_parser("sensitivity", help="copy counts and overlaps for overestimated gaps")
    c.add_argument("--C", type=_unit_float, nargs="+", required=True)
    c.add_argument("--eps", type=_unit_float, default=0.05)
    c.add_argument("--delta", type=_unit_float, default=0.01, help="true spectral gap")
    c.add_argument("--which-gap", choices=["stage1", "stage2"], default="stage2")
    c.add_argument("--format", choices=["csv", "json"], default="csv")
    c.add_argument("--out")
    c.set_defaults(func=cmd_sensitivity)

    h = sub.add_parser("hitbound", help="audit the interpolated-gap versus hitting-time bound")
    h.add_argument("--family", nargs="+", default=["complete"], choices=sorted(markov_core.FAMILIES))
    h.add_argument("--n-min", type=int, default=3)
    h.add_argument("--n-max", type=int, default=8)
    h.add_argument("--count", type=int, default=1, help="chains per (family, n)")
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--s-prime", default="star")
    h.add_argument("--archive", help="directory for chains whose ratio is below 1")
    h.add_argument("--format", choices=["csv"], default="csv")
    h.add_argument("--out")
    h.set_defaults(func=cmd_hitbound)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CommandError as exc:
        sys.stderr.write(f"qssamp {args.command}: {exc}\n")
        return exc.code
    except ValidationError as exc:
        sys.stderr.write(f"qssamp {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
