"""Pointwise geometric predicates evaluated on deterministic sample grids.

A grid point is ``r cos(theta) + I r sin(theta)`` for every radius, angle and
imaginary unit of a :class:`SampleGrid`. Truncated series are only trusted
where the estimated tail (see :func:`slicereg.series.tail_estimate`) stays
below ``truncation_tol``; other points are skipped and counted, never passed.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputFormatError, InsufficientSamples, NotNormalized, ParameterOutOfRange
from .quat import (
    UNIT_I,
    UNIT_J,
    UNIT_K,
    Quaternion,
    UnitImaginary,
    qarg_array,
    qinv_array,
    qmul_array,
    qnorm_array,
)
from .series import (
    DEFAULT_DEGREE,
    TruncatedSeries,
    evaluate_many,
    slice_derivative,
    star_inverse,
    star_mul,
    tail_estimate,
)

DEFAULT_RADII = (0.1, 0.3, 0.5, 0.7, 0.9)
DEFAULT_ANGLES = 64
DEFAULT_UNITS = 8
DEFAULT_TOL = 1e-9
SINGULAR_EPS = 1e-10
TRUNCATION_TOL = 1e-9
DEFAULT_SEPARATION = 1e-3

_FIXED_UNITS = (
    UNIT_I,
    UNIT_J,
    UNIT_K,
    UnitImaginary.normalized(1.0, 1.0, 1.0),
)


@dataclass(frozen=True)
class SampleGrid:
    """Radii x angles x imaginary units; units past the fixed four come from ``seed``."""

    radii: tuple[float, ...] = DEFAULT_RADII
    angles_per_circle: int = DEFAULT_ANGLES
    units: tuple[UnitImaginary, ...] = field(default=())
    seed: int = 0

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if not radii or any(not 0.0 < r < 1.0 for r in radii):
            raise ParameterOutOfRange("grid radii must lie strictly inside (0, 1)")
        if self.angles_per_circle < 1:
            raise ParameterOutOfRange("angles_per_circle must be positive")
        object.__setattr__(self, "radii", radii)
        if not self.units:
            object.__setattr__(self, "units", generate_units(DEFAULT_UNITS, self.seed))

    @classmethod
    def generate(
        cls,
        radii: Sequence[float] = DEFAULT_RADII,
        angles: int = DEFAULT_ANGLES,
        n_units: int = DEFAULT_UNITS,
        seed: int = 0,
    ) -> "SampleGrid":
        return cls(tuple(radii), int(angles), generate_units(n_units, seed), int(seed))

    @classmethod
    def default(cls, seed: int = 0) -> "SampleGrid":
        return cls.generate(seed=seed)

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.angles_per_circle) / self.angles_per_circle

    def slice_points(self, unit: UnitImaginary) -> np.ndarray:
        """Grid points on one slice, shape ``(radii, angles, 4)``."""
        r = np.asarray(self.radii)[:, None]
        th = self.angles[None, :]
        x = r * np.cos(th)
        y = r * np.sin(th)
        pts = np.empty(x.shape + (4,))
        pts[..., 0] = x
        pts[..., 1:] = y[..., None] * unit.to_array()
        return pts

    def points(self) -> np.ndarray:
        """All grid points, shape ``(units, radii, angles, 4)``."""
        return np.stack([self.slice_points(u) for u in self.units])

    @property
    def size(self) -> int:
        return len(self.units) * len(self.radii) * self.angles_per_circle

    def to_dict(self) -> dict:
        return {
            "radii": list(self.radii),
            "angles": self.angles_per_circle,
            "n_units": len(self.units),
            "seed": self.seed,
            "units": [u.to_list() for u in self.units],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SampleGrid":
        if not isinstance(data, dict):
            raise InputFormatError("grid JSON must be an object")
        try:
            radii = data.get("radii", DEFAULT_RADII)
            angles = int(data.get("angles", DEFAULT_ANGLES))
            seed = int(data.get("seed", 0))
            if "units" in data:
                units = tuple(UnitImaginary.normalized(*map(float, u)) for u in data["units"])
                return cls(tuple(radii), angles, units, seed)
            return cls.generate(radii, angles, int(data.get("n_units", DEFAULT_UNITS)), seed)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ParameterOutOfRange):
                raise
            raise InputFormatError(f"malformed grid: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "SampleGrid":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"invalid grid JSON: {exc}") from exc


def generate_units(n: int, seed: int = 0) -> tuple[UnitImaginary, ...]:
    """``i, j, k, (i+j+k)/sqrt 3`` followed by seeded random unit directions."""
    if n < 1:
        raise ParameterOutOfRange("a grid needs at least one imaginary unit")
    units = list(_FIXED_UNITS[:n])
    rng = np.random.default_rng(seed)
    while len(units) < n:
        v = rng.standard_normal(3)
        nv = float(np.linalg.norm(v))
        if nv > 1e-6:
            units.append(UnitImaginary.normalized(*(v / nv)))
    return tuple(units)


# ---------------------------------------------------------------------------
# conditions


class Condition(enum.Enum):
    POSITIVE_DERIV_REAL_PART = "positive-deriv-real-part"
    SLICE_STARLIKE = "slice-starlike"
    SLICE_CONVEX = "slice-convex"
    SPIRALLIKE = "spirallike"
    BOUNDED_ROTATION = "bounded-rotation"
    P_CLASS_RATIO = "p-class-ratio"
    INJECTIVITY = "injectivity"


@dataclass(frozen=True)
class SpiralParams:
    """Spiral type ``gamma`` in ``(-pi/2, pi/2)``; ``lambda = e^{-i gamma}``."""

    gamma: float

    def __post_init__(self):
        if not abs(self.gamma) < math.pi / 2:
            raise ParameterOutOfRange(f"spiral type must satisfy |gamma| < pi/2, got {self.gamma}")

    @property
    def lam_angle(self) -> float:
        return -self.gamma


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    passed: bool
    worst_margin: float
    witness: Quaternion | None
    points_checked: int
    skipped_singular: int = 0
    skipped_truncation: int = 0
    tolerance: float = DEFAULT_TOL
    slice_margins: tuple[float, ...] = ()
    witness_pair: tuple[Quaternion, Quaternion] | None = None

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "witness": None if self.witness is None else self.witness.to_list(),
            "points_checked": self.points_checked,
            "skipped_singular": self.skipped_singular,
            "skipped_truncation": self.skipped_truncation,
            "tolerance": self.tolerance,
            "slice_margins": list(self.slice_margins),
            "witness_pair": None if self.witness_pair is None else [q.to_list() for q in self.witness_pair],
        }


def _trusted_radii(series: Sequence[TruncatedSeries], radii: Sequence[float], tol: float) -> np.ndarray:
    r = np.asarray(radii, dtype=float)
    mask = np.ones(r.shape, dtype=bool)
    for s in series:
        mask &= tail_estimate(s, r) <= tol
    return mask


def _shift_down(f: TruncatedSeries) -> TruncatedSeries:
    """``f(q) / q`` for ``f(0) = 0`` (drop the constant coefficient)."""
    return TruncatedSeries(f.coeffs[1:])


def _ratio_series(f: TruncatedSeries) -> TruncatedSeries:
    """``p = q d_s f * f^{-*}``, computed as ``(d_s f) * (f / q)^{-*}``."""
    d = slice_derivative(f)
    # the star reciprocal of a polynomial is an infinite series
    n = max(d.degree, DEFAULT_DEGREE)
    return star_mul(d, star_inverse(_shift_down(f), degree=n), degree=n)


def _quantity(cond: Condition, f: TruncatedSeries, pts: np.ndarray, spiral: SpiralParams | None, units=None):
    """Tested real quantity at ``pts`` (shape ``(units, ..., 4)``) plus a mask of singular points."""
    singular = np.zeros(pts.shape[:-1], dtype=bool)
    if cond is Condition.POSITIVE_DERIV_REAL_PART:
        return evaluate_many(slice_derivative(f), pts)[..., 0], singular
    if cond is Condition.BOUNDED_ROTATION:
        d = evaluate_many(slice_derivative(f), pts)
        singular = qnorm_array(d) <= SINGULAR_EPS
        return np.pi / 2 - qarg_array(d), singular
    if cond is Condition.P_CLASS_RATIO:
        return evaluate_many(_ratio_series(f), pts)[..., 0], singular
    if cond in (Condition.SLICE_STARLIKE, Condition.SPIRALLIKE):
        fv = evaluate_many(f, pts)
        dv = evaluate_many(slice_derivative(f), pts)
        singular = qnorm_array(fv) <= SINGULAR_EPS
        qq = pts
        if cond is Condition.SPIRALLIKE:
            # e^{-I gamma} q with I the unit of the sampled slice; real points sit on every slice
            g = spiral.gamma
            u = np.array([v.to_array() for v in units]).reshape((len(units),) + (1,) * (pts.ndim - 2) + (3,))
            rot = np.zeros_like(pts)
            rot[..., 0] = math.cos(g)
            rot[..., 1:] = -math.sin(g) * u
            qq = qmul_array(rot, pts)
        val = qmul_array(qmul_array(qinv_array(fv), qq), dv)[..., 0]
        return val, singular
    if cond is Condition.SLICE_CONVEX:
        d1 = slice_derivative(f)
        dv = evaluate_many(d1, pts)
        d2v = evaluate_many(slice_derivative(d1), pts)
        singular = qnorm_array(dv) <= SINGULAR_EPS
        val = qmul_array(qmul_array(qinv_array(dv), pts), d2v)[..., 0] + 1.0
        return val, singular
    raise ValueError(f"unsupported condition {cond}")


def _series_for(cond: Condition, f: TruncatedSeries) -> list[TruncatedSeries]:
    d1 = slice_derivative(f)
    if cond in (Condition.POSITIVE_DERIV_REAL_PART, Condition.BOUNDED_ROTATION):
        return [d1]
    if cond in (Condition.SLICE_STARLIKE, Condition.SPIRALLIKE):
        return [f, d1]
    if cond is Condition.SLICE_CONVEX:
        return [d1, slice_derivative(d1)]
    return [_ratio_series(f)]


_NEEDS_NORMALIZED = {
    Condition.SLICE_STARLIKE,
    Condition.SLICE_CONVEX,
    Condition.SPIRALLIKE,
    Condition.P_CLASS_RATIO,
}


def check_condition(
    f: TruncatedSeries,
    cond: Condition | str | SpiralParams,
    grid: SampleGrid | None = None,
    tol: float = DEFAULT_TOL,
    spiral: SpiralParams | None = None,
    truncation_tol: float = TRUNCATION_TOL,
) -> ConditionReport:
    """Evaluate a positivity condition at every trusted grid point.

    ``worst_margin`` is the minimum of the tested quantity; the check passes
    when it exceeds ``tol``. Passing a :class:`SpiralParams` as ``cond``
    selects the spirallike condition of that type.
    """
    if isinstance(cond, SpiralParams):
        cond, spiral = Condition.SPIRALLIKE, cond
    cond = Condition(cond)
    if cond is Condition.INJECTIVITY:
        raise ValueError("use check_injectivity_slice for injectivity")
    if cond is Condition.SPIRALLIKE and spiral is None:
        spiral = SpiralParams(0.0)
    grid = grid or SampleGrid.default()
    if cond in _NEEDS_NORMALIZED and not f.is_normalized():
        raise NotNormalized(f"{cond.value} needs a normalized series (a0 = 0, a1 = 1)")

    trusted = _trusted_radii(_series_for(cond, f), grid.radii, truncation_tol)
    if not trusted.any():
        raise InsufficientSamples(
            f"truncation tail exceeds {truncation_tol:g} at every grid radius; raise the degree or shrink the radii"
        )
    pts = grid.points()[:, trusted]
    vals, singular = _quantity(cond, f, pts, spiral, grid.units)
    n_skip_trunc = int((~trusted).sum()) * len(grid.units) * grid.angles_per_circle

    valid = ~singular & np.isfinite(vals)
    n_sing = int((~valid).sum())
    if not valid.any():
        raise InsufficientSamples("every trusted grid point is singular")
    masked = np.where(valid, vals, np.inf)
    flat = int(np.argmin(masked))
    worst = float(masked.reshape(-1)[flat])
    witness = Quaternion.from_seq(pts.reshape(-1, 4)[flat])
    slice_margins = tuple(float(m) for m in masked.reshape(len(grid.units), -1).min(axis=1))
    return ConditionReport(
        condition=cond.value,
        passed=worst > tol,
        worst_margin=worst,
        witness=witness,
        points_checked=int(valid.sum()),
        skipped_singular=n_sing,
        skipped_truncation=n_skip_trunc,
        tolerance=tol,
        slice_margins=slice_margins,
    )


def check_injectivity_slice(
    f: TruncatedSeries,
    I: UnitImaginary,
    grid: SampleGrid | None = None,
    separation: float = DEFAULT_SEPARATION,
    tol: float = DEFAULT_TOL,
    truncation_tol: float = TRUNCATION_TOL,
) -> ConditionReport:
    """Pairwise collision search on the grid points of slice ``I``.

    Fails when two points farther apart than ``separation`` have images
    within ``separation / 2``. A pass is only a necessary condition.
    """
    grid = grid or SampleGrid.default()
    trusted = _trusted_radii([f], grid.radii, truncation_tol)
    if not trusted.any():
        raise InsufficientSamples("truncation tail exceeds tolerance at every grid radius")
    pts = grid.slice_points(I)[trusted].reshape(-1, 4)
    vals = evaluate_many(f, pts)
    dz = qnorm_array(pts[:, None, :] - pts[None, :, :])
    df = qnorm_array(vals[:, None, :] - vals[None, :, :])
    eligible = np.triu(dz > separation, k=1)
    margins = np.where(eligible, df - separation / 2, np.inf)
    flat = int(np.argmin(margins))
    a, b = np.unravel_index(flat, margins.shape)
    worst = float(margins[a, b])
    passed = worst > tol
    qa = Quaternion.from_seq(pts[a])
    qb = Quaternion.from_seq(pts[b])
    return ConditionReport(
        condition=Condition.INJECTIVITY.value,
        passed=passed,
        worst_margin=worst,
        witness=qa,
        points_checked=len(pts),
        skipped_truncation=int((~trusted).sum()) * grid.angles_per_circle,
        tolerance=tol,
        slice_margins=(worst,),
        witness_pair=(qa, qb),
    )


def spiral_curve(params: SpiralParams, w0: Quaternion, t: float) -> Quaternion:
    """``e^{-t lambda} w0`` with ``lambda = e^{-i gamma}``, multiplying on the left."""
    A = math.exp(-t * math.cos(params.gamma))
    B = t * math.sin(params.gamma)
    c = Quaternion(A * math.cos(B), A * math.sin(B), 0.0, 0.0)
    return c * w0
