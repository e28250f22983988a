"""Content manifolds and the utility/engagement optimisers.

A platform does not choose ``(p, q, v_bar)`` directly; it moves along a
*content manifold*, the set of parameter triples its feasible content and
design choices can reach.  Three kinds are supported:

* ``curve``: a map ``z -> (p, q, v_bar)`` on a closed interval, searched on
  a uniform grid;
* ``mixture``: convex combinations of up to 16 sources, searched on a
  lattice of the simplex (at most 4 sources);
* ``point_set``: an explicit finite list.

:func:`find_optima` returns the utility maximiser and the engagement
maximiser subject to participation, and classifies how they disagree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from ._validation import (
    check_finite,
    check_params_array,
    check_positive,
    check_positive_int,
    check_simplex,
    check_unit_interval,
)
from .core import (
    ContentParams,
    ModelPoint,
    OutsideOption,
    expected_engagement,
    expected_utility,
    g_engagement,
    g_engagement_array,
    g_utility,
    g_utility_array,
    participates_array,
)
from .exceptions import InfeasibleManifoldError, UnexplainedDisagreementError, ValidationError

__all__ = [
    "Alignment",
    "Manifold",
    "OptimaReport",
    "AlignmentBound",
    "example_manifold",
    "mix",
    "find_optima",
    "analytic_optima_example2",
    "analytic_optima_example3",
    "check_two_conditions",
    "alignment_bound_check",
    "sweep_rows",
]

MAX_MIXTURE_SOURCES = 16
MAX_GRIDDED_SOURCES = 4
SWEEP_COLUMNS = ("z", "p", "q", "v_bar", "g_s", "g_t", "participates")


class Alignment(str, Enum):
    ALIGNED = "aligned"
    HIGHER_MOREISHNESS = "higher_moreishness"
    HIGHER_SPAN_LOWER_VALUE = "higher_span_lower_value"
    NON_STRICT = "non_strict"


@dataclass(frozen=True)
class _Grid:
    coords: list  # z values, weight tuples or point indices, in search order
    p: np.ndarray
    q: np.ndarray
    v_bar: np.ndarray

    def params(self, i: int) -> ContentParams:
        return ContentParams(self.p[i], self.q[i], self.v_bar[i])


@dataclass(frozen=True, eq=False)
class Manifold:
    """A closed, bounded family of content parameters.

    Use the :meth:`curve`, :meth:`mixture` and :meth:`point_set` constructors.
    When ``w`` is supplied the manifold is checked to contain at least one
    point at which the user participates.
    """

    kind: str
    curve_fn: Optional[Callable] = None
    z_lo: float = 0.0
    z_hi: float = 1.0
    sources: tuple = ()
    points: tuple = ()
    grid_resolution: int = 10_000
    label: str = ""
    w: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("curve", "mixture", "point_set"):
            raise ValidationError(f"unknown manifold kind {self.kind!r}")
        object.__setattr__(self, "grid_resolution", check_positive_int(self.grid_resolution, "grid_resolution"))
        if self.kind == "curve":
            if self.curve_fn is None:
                raise ValidationError("a curve manifold needs a mapping z -> (p, q, v_bar)")
            lo, hi = check_finite(self.z_lo, "z_lo"), check_finite(self.z_hi, "z_hi")
            if hi < lo:
                raise ValidationError("curve domain must satisfy z_lo <= z_hi")
        elif self.kind == "mixture":
            if not (1 <= len(self.sources) <= MAX_MIXTURE_SOURCES):
                raise ValidationError(f"a mixture needs between 1 and {MAX_MIXTURE_SOURCES} sources")
            if len(self.sources) > MAX_GRIDDED_SOURCES:
                raise ValidationError(
                    f"mixtures of more than {MAX_GRIDDED_SOURCES} sources are not gridded; "
                    "pass the candidate mixtures as a point_set"
                )
        elif len(self.points) == 0:
            raise ValidationError("a point_set manifold needs at least one point")
        # force grid construction so invalid parameters surface here
        self._grid
        if self.w is not None:
            w = check_positive(self.w, "w")
            if not np.any(participates_array(self._grid.p, self._grid.q, self._grid.v_bar, w)):
                raise InfeasibleManifoldError(f"no point of the manifold admits participation at W={w}")

    @classmethod
    def curve(cls, fn, z_lo, z_hi, grid_resolution=10_000, w=None, label="") -> "Manifold":
        """``fn`` maps an array of ``z`` to a tuple of ``(p, q, v_bar)`` arrays."""
        return cls("curve", curve_fn=fn, z_lo=z_lo, z_hi=z_hi, grid_resolution=grid_resolution, w=w, label=label)

    @classmethod
    def mixture(cls, sources: Sequence[ContentParams], grid_resolution=100, w=None, label="") -> "Manifold":
        return cls("mixture", sources=tuple(sources), grid_resolution=grid_resolution, w=w, label=label)

    @classmethod
    def point_set(cls, points: Sequence[ContentParams], w=None, label="") -> "Manifold":
        return cls("point_set", points=tuple(points), grid_resolution=max(1, len(points)), w=w, label=label)

    def at(self, coord) -> ContentParams:
        """Parameters at a curve value, weight vector or point index."""
        if self.kind == "curve":
            p, q, v = self.curve_fn(np.asarray([float(coord)]))
            return ContentParams(float(np.ravel(p)[0]), float(np.ravel(q)[0]), float(np.ravel(v)[0]))
        if self.kind == "mixture":
            return mix(list(zip(self.sources, coord)))
        return self.points[int(coord)]

    @cached_property
    def _grid(self) -> _Grid:
        if self.kind == "curve":
            z = np.linspace(self.z_lo, self.z_hi, self.grid_resolution)
            p, q, v = (np.broadcast_to(np.asarray(a, float), z.shape) for a in self.curve_fn(z))
            coords = list(z)
        elif self.kind == "mixture":
            weights = _simplex_lattice(len(self.sources), self.grid_resolution)
            src = np.array([s.as_tuple() for s in self.sources])
            mixed = weights @ src
            p, q, v = mixed[:, 0], mixed[:, 1], mixed[:, 2]
            coords = [tuple(row) for row in weights]
        else:
            arr = np.array([pt.as_tuple() for pt in self.points])
            p, q, v = arr[:, 0], arr[:, 1], arr[:, 2]
            coords = list(range(len(self.points)))
        arr = check_params_array(np.column_stack([p, q, v]), name=f"{self.kind} manifold")
        return _Grid(coords, arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy())

    def __len__(self):
        return len(self._grid.coords)


def _simplex_lattice(k: int, resolution: int) -> np.ndarray:
    """All weight vectors with entries in ``{0, 1/r, ..., 1}``, lexicographic."""
    rows = [c for c in itertools.product(range(resolution + 1), repeat=k - 1) if sum(c) <= resolution]
    out = np.array([list(c) + [resolution - sum(c)] for c in rows], dtype=float) / resolution
    return out


def example_manifold(which: str, q0: float, v0: float, alpha: float = 0.0, epsilon: Optional[float] = None,
                     z_max: float = 0.999, grid_resolution: int = 10_000, w=None) -> Manifold:
    """The three single-parameter curves used to illustrate the model.

    ``quality``
        ``(0, q0 + z, v0 + z)`` for ``z`` in ``[0, epsilon]``.
    ``moreishness``
        ``(z, q0, v0)`` for ``z`` in ``[0, z_max]``.
    ``both``
        ``(z, q0, v0 + alpha z)`` for ``z`` in ``[0, z_max]``.

    The moreishness curves are open at ``z = 1``; ``z_max`` closes them.
    """
    q0 = check_unit_interval(q0, "q0")
    v0 = check_positive(v0, "v0")
    alpha = check_finite(alpha, "alpha")
    if alpha < 0:
        raise ValidationError("alpha must be nonnegative")
    if which == "quality":
        if epsilon is None:
            raise ValidationError("the quality curve needs epsilon")
        epsilon = check_finite(epsilon, "epsilon")
        if epsilon < 0 or epsilon >= 1.0 - q0:
            raise ValidationError(f"epsilon must lie in [0, 1 - q0) = [0, {1 - q0}) so the span stays below 1")

        def fn(z):
            return np.zeros_like(z), q0 + z, v0 + z

        return Manifold.curve(fn, 0.0, epsilon, grid_resolution, w=w, label="quality")
    z_max = check_unit_interval(z_max, "z_max")
    if which == "moreishness":

        def fn(z):
            return z, np.full_like(z, q0), np.full_like(z, v0)

        return Manifold.curve(fn, 0.0, z_max, grid_resolution, w=w, label="moreishness")
    if which == "both":

        def fn(z):
            return z, np.full_like(z, q0), v0 + alpha * z

        return Manifold.curve(fn, 0.0, z_max, grid_resolution, w=w, label="both")
    raise ValidationError(f"unknown example manifold {which!r}; expected quality, moreishness or both")


def mix(sources: Sequence[tuple[ContentParams, float]]) -> ContentParams:
    """Parameters of a feed drawing each item from source ``i`` with probability ``a_i``.

    The result is the weight-averaged ``(p, q, v_bar)``.
    """
    if len(sources) == 0:
        raise ValidationError("mix needs at least one source")
    weights = check_simplex([a for _, a in sources])
    arr = np.array([c.as_tuple() for c, _ in sources])
    p, q, v = weights @ arr
    return ContentParams(float(p), float(q), float(v))


@dataclass(frozen=True)
class OptimaReport:
    omega_s: ContentParams
    omega_t: ContentParams
    s_at_s: float
    s_at_t: float
    t_at_s: float
    t_at_t: float
    classification: Alignment
    coord_s: object = None
    coord_t: object = None
    index_s: int = 0
    index_t: int = 0

    def to_dict(self) -> dict:
        def coord(c):
            if isinstance(c, tuple):
                return [float(x) for x in c]
            return c if isinstance(c, int) else float(c)

        return {
            "omega_s": dict(zip(("p", "q", "v_bar"), self.omega_s.as_tuple())),
            "omega_t": dict(zip(("p", "q", "v_bar"), self.omega_t.as_tuple())),
            "s_at_s": self.s_at_s,
            "s_at_t": self.s_at_t,
            "t_at_s": self.t_at_s,
            "t_at_t": self.t_at_t,
            "classification": self.classification.value,
            "coord_s": coord(self.coord_s),
            "coord_t": coord(self.coord_t),
        }


def find_optima(manifold: Manifold, w: OutsideOption | float = 1.0) -> OptimaReport:
    """Grid-search the utility and engagement maximisers.

    Ties go to the earliest grid point (smallest ``z``; lexicographically
    smallest weights; lowest point index).
    """
    w = w.w if isinstance(w, OutsideOption) else check_positive(w, "w")
    grid = manifold._grid
    gs = g_utility_array(grid.p, grid.q, grid.v_bar, w)
    gt = g_engagement_array(grid.p, grid.q)
    feasible = participates_array(grid.p, grid.q, grid.v_bar, w)
    if not feasible.any():
        raise InfeasibleManifoldError(f"no point of the manifold admits participation at W={w}")
    i_s = int(np.argmax(gs))
    i_t = int(np.argmax(np.where(feasible, gt, -np.inf)))
    omega_s, omega_t = grid.params(i_s), grid.params(i_t)
    point_s, point_t = ModelPoint(omega_s, OutsideOption(w)), ModelPoint(omega_t, OutsideOption(w))
    if i_s == i_t:
        label = Alignment.ALIGNED
    else:
        label = check_two_conditions(omega_s, omega_t, w)
    return OptimaReport(
        omega_s=omega_s,
        omega_t=omega_t,
        s_at_s=expected_utility(point_s),
        s_at_t=expected_utility(point_t),
        t_at_s=expected_engagement(point_s),
        t_at_t=expected_engagement(point_t),
        classification=label,
        coord_s=grid.coords[i_s],
        coord_t=grid.coords[i_t],
        index_s=i_s,
        index_t=i_t,
    )


def check_two_conditions(omega_s: ContentParams, omega_t: ContentParams, w: float = 1.0) -> Alignment:
    """Explain a strict disagreement between the two maximisers.

    Returns ``higher_moreishness`` when the engagement maximiser is more
    moreish.  Otherwise it must have strictly higher span and strictly lower
    value; anything else raises :class:`UnexplainedDisagreementError`.  Pairs whose
    disagreement is not strict in both objectives are ``non_strict``.
    """
    ow = OutsideOption(w)
    ps, pt = ModelPoint(omega_s, ow), ModelPoint(omega_t, ow)
    strict = g_utility(ps) > g_utility(pt) and g_engagement(pt) > g_engagement(ps)
    if not strict:
        return Alignment.NON_STRICT
    if omega_t.p > omega_s.p:
        return Alignment.HIGHER_MOREISHNESS
    if omega_t.q > omega_s.q and omega_t.v_bar < omega_s.v_bar:
        return Alignment.HIGHER_SPAN_LOWER_VALUE
    raise UnexplainedDisagreementError(
        f"strict disagreement with p_T <= p_S but not (q_T > q_S and v_T < v_S): omega_s={omega_s}, omega_t={omega_t}"
    )


def analytic_optima_example2(q: float, v_bar: float, w: float = 1.0) -> float:
    """Engagement-maximising moreishness on the pure-moreishness curve.

    It is the zero of ``g_utility`` in ``p``: ``1 - W / ((v_bar - W)/(1 - q) + W)``.
    """
    q = check_unit_interval(q, "q")
    v_bar, w = check_positive(v_bar, "v_bar"), check_positive(w, "w")
    if v_bar <= w:
        raise ValidationError("v_bar must exceed W, otherwise nobody participates anywhere on the curve")
    return 1.0 - w / ((v_bar - w) / (1.0 - q) + w)


def analytic_optima_example3(q: float, v0: float, alpha: float, w: float = 1.0) -> tuple[float, float]:
    """``(z_S, z_T)`` on the curve ``(z, q, v0 + alpha z)``.

    ``z_S`` solves ``alpha/(1-q) = W/(1-z)^2`` (clamped at 0); ``z_T`` is the
    larger root of ``alpha z^2 - (alpha - v0 + W q) z + (W - v0) = 0``.
    """
    q = check_unit_interval(q, "q")
    v0, alpha, w = check_positive(v0, "v0"), check_positive(alpha, "alpha"), check_positive(w, "w")
    if v0 <= w:
        raise ValidationError("v0 must exceed W")
    z_s = max(0.0, 1.0 - math.sqrt(w * (1.0 - q) / alpha))
    b = alpha - v0 + w * q
    z_t = (b + math.sqrt(b * b - 4.0 * alpha * (w - v0))) / (2.0 * alpha)
    return z_s, z_t


@dataclass(frozen=True)
class AlignmentBound:
    lhs: float
    rhs: float
    holds: bool
    report: Optional[OptimaReport] = None


def alignment_bound_check(manifold: Manifold, w: OutsideOption | float, alpha_cap: float, beta_cap: float,
                          v0: float) -> AlignmentBound:
    """Check the near-optimality bound for low-moreishness, near-constant-value manifolds.

    Requires ``p <= alpha_cap`` and ``|v_bar - v0| < beta_cap`` everywhere on
    the manifold (``v_bar == v0`` when ``beta_cap == 0``).  Returns
    ``E[S(w_T)]`` and ``E[S(w_S)] - 2 beta E[T(w_S)] - alpha (v0 + beta)/(1 - alpha)``.
    """
    w_val = w.w if isinstance(w, OutsideOption) else check_positive(w, "w")
    alpha_cap = check_unit_interval(alpha_cap, "alpha_cap")
    beta_cap = check_finite(beta_cap, "beta_cap")
    v0 = check_positive(v0, "v0")
    if beta_cap < 0:
        raise ValidationError("beta_cap must be nonnegative")
    grid = manifold._grid
    if np.any(grid.p > alpha_cap):
        raise ValidationError(f"manifold has p above alpha_cap={alpha_cap}")
    dev = np.abs(grid.v_bar - v0)
    if beta_cap == 0.0:
        ok = np.all(dev == 0.0)
    else:
        ok = np.all(dev <= beta_cap - 1e-12)
    if not ok:
        raise ValidationError(f"manifold has |v_bar - v0| not below beta_cap={beta_cap}")
    report = find_optima(manifold, w_val)
    lhs = report.s_at_t
    rhs = report.s_at_s - 2.0 * beta_cap * report.t_at_s - alpha_cap * (v0 + beta_cap) / (1.0 - alpha_cap)
    return AlignmentBound(lhs, rhs, bool(lhs >= rhs), report)


def sweep_rows(manifold: Manifold, w: float = 1.0) -> list[tuple]:
    """Rows ``(z, p, q, v_bar, g_s, g_t, participates)`` over a curve or point set."""
    if manifold.kind == "mixture":
        raise ValidationError("sweeps are defined for curves and point sets")
    grid = manifold._grid
    gs = g_utility_array(grid.p, grid.q, grid.v_bar, w)
    gt = g_engagement_array(grid.p, grid.q)
    part = participates_array(grid.p, grid.q, grid.v_bar, w)
    return [
        (float(z), float(p), float(q), float(v), float(a), float(b), int(c))
        for z, p, q, v, a, b, c in zip(grid.coords, grid.p, grid.q, grid.v_bar, gs, gt, part)
    ]
