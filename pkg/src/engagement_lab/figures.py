"""Figure presets: fixed parameterisations that emit the data behind each plot.

Each preset returns ``(columns, rows, params)`` and is deterministic; the
seed is recorded but only presets that simulate consume it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import manifolds, population, satiation, tree
from .core import g_engagement_array, g_utility_array, participates_array
from .distributions import ValueDist
from .exceptions import ValidationError
from .satiation import GammaPoint

__all__ = ["Preset", "PRESETS", "figure_presets", "run_preset"]

GRID_COLUMNS = ("p", "q", "v_bar", "w", "g_s", "g_t", "e_s", "e_t", "participates")
FIG5_COLUMNS = ("curve",) + satiation.SWEEP_COLUMNS
FIG6_COLUMNS = ("p", "q", "d_s", "d_t")


@dataclass(frozen=True)
class Preset:
    id: str
    description: str
    params: dict
    columns: tuple
    build: Callable[[dict], list]


def _curve_rows(which, params):
    m = manifolds.example_manifold(
        which, params["q0"], params["v0"], alpha=params.get("alpha", 0.0),
        z_max=params["z_max"], grid_resolution=params["resolution"],
    )
    return manifolds.sweep_rows(m, params["w"])


def _pq_grid(params, v_of_p):
    ps = np.linspace(0.0, params["p_max"], params["n_p"])
    qs = np.linspace(0.0, params["q_max"], params["n_q"])
    pp, qq = np.meshgrid(ps, qs, indexing="ij")
    pp, qq = pp.ravel(), qq.ravel()
    vv = v_of_p(pp)
    w = params["w"]
    gs = g_utility_array(pp, qq, vv, w)
    gt = g_engagement_array(pp, qq)
    part = participates_array(pp, qq, vv, w)
    es = np.where(part, np.maximum(gs, 0.0), 0.0)
    et = np.where(part, gt, 0.0)
    return [
        (float(a), float(b), float(c), float(w), float(d), float(e), float(f), float(g), int(h))
        for a, b, c, d, e, f, g, h in zip(pp, qq, vv, gs, gt, es, et, part)
    ]


def _fig2(params):
    return _pq_grid(params, lambda p: np.full_like(p, params["v_bar"]))


def _fig3(params):
    return _pq_grid(params, lambda p: params["v0"] + params["alpha"] * p)


def _fig4(params):
    ps = np.linspace(0.0, params["p_max"], params["n_p"])
    pop = population.Population.uniform(params["w_low"], params["w_high"])
    q, v0, alpha = params["q"], params["v0"], params["alpha"]
    return population.sweep_rows([(p, q, v0 + alpha * p) for p in ps], pop)


def _fig5(params):
    rows = []
    ps = np.linspace(0.0, params["p_max"], params["n_p"])
    g, w = params["gamma"], params["w"]
    for label, v_of_p in (("moreishness", lambda p: params["v0"]), ("both", lambda p: params["v0"] + params["alpha"] * p)):
        for p in ps:
            pt = GammaPoint(float(p), g, float(v_of_p(p)), w)
            rows.append((label, pt.p, g, pt.v_bar, w, satiation.t_star(pt),
                         satiation.gamma_engagement(pt), satiation.gamma_utility(pt)))
    return rows


def fig6_values() -> ValueDist:
    return ValueDist.finite([(1.0, 0.5), (4.0, 0.5)])


def fig6_grid(params) -> tuple[np.ndarray, np.ndarray]:
    ps = np.round(np.arange(params["n_p"]) * params["step"] + params["start"], 10)
    qs = np.round(np.arange(params["n_q"]) * params["step"] + params["start"], 10)
    return ps, qs


def _fig6(params):
    ps, qs = fig6_grid(params)
    values = fig6_values()
    return tree.sweep_rows(lambda p, q: tree.iid_family(p, q, values, params["w"]), ps, qs, params["d_max"])


PRESETS = {
    "fig1-left": Preset(
        "fig1-left",
        "utility and engagement along the pure-moreishness curve (z, q0, v0)",
        {"q0": 0.5, "v0": 3.0, "w": 1.0, "z_max": 0.999, "resolution": 1000},
        manifolds.SWEEP_COLUMNS,
        lambda prm: _curve_rows("moreishness", prm),
    ),
    "fig1-right": Preset(
        "fig1-right",
        "utility and engagement along (z, q0, v0 + alpha z)",
        {"q0": 0.5, "v0": 3.0, "alpha": 1.0, "w": 1.0, "z_max": 0.999, "resolution": 1000},
        manifolds.SWEEP_COLUMNS,
        lambda prm: _curve_rows("both", prm),
    ),
    "fig2": Preset(
        "fig2",
        "E[S] and E[T] over a (p, q) grid at fixed v_bar",
        {"v_bar": 3.0, "w": 1.0, "p_max": 0.95, "q_max": 0.95, "n_p": 96, "n_q": 96},
        GRID_COLUMNS,
        _fig2,
    ),
    "fig3": Preset(
        "fig3",
        "E[S] and E[T] over a (p, q) grid with v_bar = v0 + alpha p",
        {"v0": 3.0, "alpha": 1.0, "w": 1.0, "p_max": 0.95, "q_max": 0.95, "n_p": 96, "n_q": 96},
        GRID_COLUMNS,
        _fig3,
    ),
    "fig4": Preset(
        "fig4",
        "population metrics along (p, q, v0 + alpha p) with W ~ U[w_low, w_high]",
        {"q": 0.5, "v0": 1.0, "alpha": 0.7, "w_low": 0.5, "w_high": 1.0, "p_max": 0.95, "n_p": 96},
        population.SWEEP_COLUMNS,
        _fig4,
    ),
    "fig5": Preset(
        "fig5",
        "geometric-satiation variant along the moreishness curve and the value-rising curve",
        {"gamma": 0.5, "v0": 3.0, "alpha": 1.0, "w": 1.0, "p_max": 0.99, "n_p": 100},
        FIG5_COLUMNS,
        _fig5,
    ),
    "fig6": Preset(
        "fig6",
        "utility- and engagement-optimal branching factor over (p, q), values 1 or 4 w.p. 1/2",
        {"start": 0.05, "step": 0.1, "n_p": 10, "n_q": 10, "w": 1.0, "d_max": 20},
        FIG6_COLUMNS,
        _fig6,
    ),
}


def figure_presets() -> list[tuple[str, str, dict]]:
    return [(p.id, p.description, dict(p.params)) for p in PRESETS.values()]


def run_preset(fig_id: str) -> tuple[tuple, list, dict]:
    try:
        preset = PRESETS[fig_id]
    except KeyError:
        raise ValidationError(f"unknown figure id {fig_id!r}; choose from {', '.join(PRESETS)}") from None
    return preset.columns, preset.build(preset.params), dict(preset.params)
