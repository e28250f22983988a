"""Command-line front end.

    engagement-lab eval --p 0.5 --q 0.5 --v 3 --w 1
    engagement-lab simulate --p 0.5 --q 0.5 --v 3 --replications 1000000 --out run.json
    engagement-lab figure --id fig4 --out data/
    engagement-lab tree --preset appendix-d --dmax 5

Every command accepts ``--config file.json`` whose keys are flag names
(``replications``, ``v``, ...); flags given on the command line win.
Exit status: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, figures, manifolds, population, satiation, survey, tree
from .core import ContentParams, ModelPoint, expected_engagement, expected_utility, g_engagement, g_utility, participates
from .distributions import ValueDist
from .exceptions import NumericalError, ValidationError
from .output import write_csv, write_json
from .simulation import SimConfig, simulate_batch, simulate_sessions

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


def _parse_values(text: str) -> ValueDist:
    """``"1:0.5,4:0.5"`` -> finite distribution."""
    try:
        pairs = [item.split(":") for item in text.split(",") if item.strip()]
        return ValueDist.finite([(float(v), float(p)) for v, p in pairs])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"cannot parse value distribution {text!r}; expected 'v1:p1,v2:p2'") from None


def _meta(args, **extra) -> dict:
    meta = {"command": args.command, "seed": getattr(args, "seed", None), "version": __version__}
    meta.update(extra)
    return {k: v for k, v in meta.items() if v is not None}


def _point(args) -> ModelPoint:
    return ModelPoint.of(args.p, args.q, args.v, args.w)


def cmd_eval(args) -> str:
    pt = _point(args)
    out = {
        "p": pt.p, "q": pt.q, "v_bar": pt.v_bar, "w": pt.w,
        "g_s": g_utility(pt), "g_t": g_engagement(pt),
        "e_s": expected_utility(pt), "e_t": expected_engagement(pt), "participates": participates(pt),
    }
    if args.out:
        write_json(args.out, {"meta": _meta(args), "result": out})
    return f"e_s={out['e_s']:.10g} e_t={out['e_t']:.10g} participates={out['participates']}"


def cmd_simulate(args) -> str:
    values = _parse_values(args.values) if args.values else None
    cfg = SimConfig(_point(args), values, args.replications, args.seed, args.force_participation)
    summary = simulate_batch(cfg)
    if args.out:
        write_json(args.out, {"meta": _meta(args, replications=args.replications), "summary": summary.to_dict()})
    return (f"mean_t={summary.mean_t:.6g} (se {summary.se_t:.2g}) mean_s={summary.mean_s:.6g} (se {summary.se_s:.2g}) "
            f"closed e_t={expected_engagement(cfg.point):.6g} e_s={expected_utility(cfg.point):.6g}")


def cmd_manifold(args) -> str:
    m = manifolds.example_manifold(args.curve, args.q0, args.v0, alpha=args.alpha, epsilon=args.epsilon,
                                   z_max=args.z_max, grid_resolution=args.resolution)
    report = manifolds.find_optima(m, args.w)
    if args.out:
        out = Path(args.out)
        if out.suffix == ".json":
            write_json(out, {"meta": _meta(args), "optima": report.to_dict()})
        else:
            write_csv(out, manifolds.SWEEP_COLUMNS, manifolds.sweep_rows(m, args.w), _meta(args, curve=args.curve))
    return f"z_s={report.coord_s:.6g} z_t={report.coord_t:.6g} classification={report.classification.value}"


def cmd_gamma(args) -> str:
    pt = satiation.GammaPoint(args.p, args.gamma, args.v, args.w)
    ts, et, es = satiation.t_star(pt), satiation.gamma_engagement(pt), satiation.gamma_utility(pt)
    line = f"t_star={ts} e_t={et:.10g} e_s={es:.10g}"
    result = {"t_star": ts, "e_t": et, "e_s": es}
    if args.replications:
        summary = satiation.simulate_gamma_batch(pt, args.replications, args.seed)
        result["simulation"] = summary.to_dict()
        line += f" sim_t={summary.mean_t:.6g} sim_s={summary.mean_s:.6g}"
    if args.out:
        write_json(args.out, {"meta": _meta(args), "result": result})
    return line


def cmd_survey(args) -> str:
    pt = _point(args)
    report = survey.classify_regime(pt)
    if args.out:
        if args.replications:
            sessions = simulate_sessions(SimConfig(pt, None, args.replications, args.seed, force_participation=True))
            rows = survey.binned_rows(pt, sessions, args.min_samples)
        else:
            rows = [(t, survey.conditional_utility(pt, t), float("nan"), 0) for t in range(1, args.tmax + 1)]
        write_csv(args.out, survey.SWEEP_COLUMNS, rows,
                  _meta(args, regime=report.regime, monotone=report.monotone, t_star=report.t_star))
    return (f"regime={report.regime} monotone={report.monotone} t_star={report.t_star} "
            f"regretful_use={survey.regretful_use(pt):.6g}")


def cmd_population(args) -> str:
    params = ContentParams(args.p, args.q, args.v)
    pop = population.Population.uniform(args.a, args.b)
    m = population.population_metrics(params, pop)
    if args.out:
        write_json(args.out, {"meta": _meta(args), "w_star": population.participation_threshold(params),
                              "metrics": m.to_dict(), "population": pop.to_dict()})
    return " ".join(f"{k}={v:.10g}" for k, v in m.to_dict().items())


TREE_PRESETS = {
    "appendix-d": {"p": 0.01, "q": 0.0, "w": 1.0, "values": "1.011:0.5,1.05:0.5"},
    "fig6": {"p": 0.5, "q": 0.5, "w": 1.0, "values": "1:0.5,4:0.5"},
}


def cmd_tree(args) -> str:
    settings = dict(TREE_PRESETS[args.preset]) if args.preset else {}
    for key in ("p", "q", "w", "values"):
        if getattr(args, key) is not None:
            settings[key] = getattr(args, key)
    missing = [k for k in ("p", "q", "values") if k not in settings]
    if missing:
        raise ValidationError(f"tree needs --preset or all of --p --q --values (missing {', '.join(missing)})")
    values = _parse_values(settings["values"])
    report = tree.optimize_branching(tree.iid_family(settings["p"], settings["q"], values, settings.get("w", 1.0)), args.dmax)
    if args.out:
        write_csv(args.out, tree.SWEEP_COLUMNS, report.table, _meta(args, preset=args.preset, d_s=report.d_s, d_t=report.d_t))
    return f"d_s={report.d_s} d_t={report.d_t}"


def cmd_figure(args) -> str:
    if args.list:
        return "\n".join(f"{fid}: {desc} {json.dumps(prm, sort_keys=True)}" for fid, desc, prm in figures.figure_presets())
    if not args.id:
        raise ValidationError("figure needs --id (or --list)")
    columns, rows, params = figures.run_preset(args.id)
    meta = _meta(args, preset=args.id, params=json.dumps(params, sort_keys=True))
    out = Path(args.out)
    csv_path = out / f"{args.id}.csv"
    write_csv(csv_path, columns, rows, meta)
    write_json(out / f"{args.id}.json", {"meta": meta, "columns": list(columns), "n_rows": len(rows)})
    return f"wrote {len(rows)} rows to {csv_path}"


def _add_point_args(sp, need_q=True, need_w=True):
    sp.add_argument("--p", type=float, default=None, help="moreishness in [0, 1)")
    if need_q:
        sp.add_argument("--q", type=float, default=None, help="span in [0, 1)")
    sp.add_argument("--v", type=float, default=None, help="mean item value")
    if need_w:
        sp.add_argument("--w", type=float, default=1.0, help="outside option per step")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="engagement-lab", description="Dual-system engagement model toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(sp, seed=False):
        sp.add_argument("--config", default=None, help="JSON file of defaults; flags override")
        sp.add_argument("--out", default=None, help="output file")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("eval", help="closed-form E[S], E[T]")
    _add_point_args(sp)
    common(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("simulate", help="Monte Carlo sessions")
    _add_point_args(sp)
    sp.add_argument("--replications", type=int, default=100_000)
    sp.add_argument("--values", default=None, help="per-item values 'v1:p1,v2:p2' (mean must equal --v)")
    sp.add_argument("--force-participation", action="store_true")
    common(sp, seed=True)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("manifold", help="optima along an example curve")
    sp.add_argument("--curve", choices=("quality", "moreishness", "both"), default="moreishness")
    sp.add_argument("--q0", type=float, default=0.5)
    sp.add_argument("--v0", type=float, default=3.0)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--epsilon", type=float, default=None)
    sp.add_argument("--z-max", type=float, default=0.999)
    sp.add_argument("--resolution", type=int, default=10_000)
    sp.add_argument("--w", type=float, default=1.0)
    common(sp)
    sp.set_defaults(func=cmd_manifold)

    sp = sub.add_parser("gamma", help="geometric-satiation variant")
    _add_point_args(sp, need_q=False)
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--replications", type=int, default=0, help="also simulate this many sessions")
    common(sp, seed=True)
    sp.set_defaults(func=cmd_gamma)

    sp = sub.add_parser("survey", help="E[S | T = t] and regime")
    _add_point_args(sp)
    sp.add_argument("--tmax", type=int, default=50)
    sp.add_argument("--replications", type=int, default=0, help="simulate sessions and bin by length")
    sp.add_argument("--min-samples", type=int, default=1)
    common(sp, seed=True)
    sp.set_defaults(func=cmd_survey)

    sp = sub.add_parser("population", help="metrics with W ~ U[a, b]")
    _add_point_args(sp, need_w=False)
    sp.add_argument("--a", type=float, default=0.5, help="lowest outside option")
    sp.add_argument("--b", type=float, default=1.0, help="highest outside option")
    common(sp)
    sp.set_defaults(func=cmd_population)

    sp = sub.add_parser("tree", help="optimal branching factor for a tree feed")
    sp.add_argument("--preset", choices=sorted(TREE_PRESETS), default=None)
    sp.add_argument("--p", type=float, default=None, help="per-branch moreishness")
    sp.add_argument("--q", type=float, default=None)
    sp.add_argument("--w", type=float, default=None)
    sp.add_argument("--values", default=None, help="branch values 'v1:p1,v2:p2'")
    sp.add_argument("--dmax", type=int, default=20)
    common(sp)
    sp.set_defaults(func=cmd_tree)

    sp = sub.add_parser("figure", help="emit figure data for a preset")
    sp.add_argument("--id", default=None, choices=sorted(figures.PRESETS))
    sp.add_argument("--list", action="store_true", help="list presets and exit")
    common(sp, seed=True)
    sp.set_defaults(func=cmd_figure, out=".")
    return parser


def _required(args):
    need = {"eval": ("p", "q", "v"), "simulate": ("p", "q", "v"), "survey": ("p", "q", "v"),
            "population": ("p", "q", "v"), "gamma": ("p", "v", "gamma")}.get(args.command, ())
    missing = [k for k in need if getattr(args, k, None) is None]
    if missing:
        raise ValidationError(f"{args.command}: missing --{' --'.join(missing)}")


def parse(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(config, dict):
            raise ValidationError("config file must hold a JSON object")
        # second pass: config values become defaults, explicit flags still win
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(k.replace("-", "_") for k in config) - known)
        if unknown:
            raise ValidationError(f"unknown config keys for {args.command}: {', '.join(unknown)}")
        sub.set_defaults(**{k.replace("-", "_"): v for k, v in config.items()})
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse(argv)
        _required(args)
        print(args.func(args))
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
