"""Numerical verifiers for the quantitative inequalities of slice regular function theory.

Each verifier returns a :class:`BoundReport`. ``max_violation`` is the largest
amount by which a bound is exceeded (clipped at zero) and ``tightness`` the
smallest slack, so equality cases show up as ``tightness`` near zero.
Hypotheses that can be sampled are sampled and listed; the others are
recorded as asserted by the caller.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    HypothesisFailed,
    InputFormatError,
    InsufficientSamples,
    NonzeroConstantTerm,
    NotIntrinsic,
    NotNormalized,
    ParameterOutOfRange,
    PrerequisiteNotMet,
    SchwarzViolation,
)
from .geocheck import (
    DEFAULT_TOL,
    TRUNCATION_TOL,
    Condition,
    ConditionReport,
    SampleGrid,
    _ratio_series,
    _trusted_radii,
    check_condition,
    check_injectivity_slice,
)
from .quat import UNIT_I, Quaternion, UnitImaginary, orthogonal_unit, qmul_array, qnorm_array
from .series import (
    COEFF_EPS,
    TruncatedSeries,
    bullet_compose,
    evaluate_many,
    slice_derivative,
    split_coefficients,
    tail_estimate,
)

EXTREMAL_TOL = 1e-8


@dataclass(frozen=True)
class BoundReport:
    bound_kind: str
    passed: bool
    max_violation: float
    tightness: float | None
    witness: Quaternion | None
    parameters: dict = field(default_factory=dict)
    hypotheses: dict = field(default_factory=lambda: {"sampled": [], "asserted": []})
    tolerance: float = DEFAULT_TOL
    details: dict = field(default_factory=dict)

    @property
    def extremal(self) -> bool:
        return self.tightness is not None and self.tightness < EXTREMAL_TOL

    def to_dict(self) -> dict:
        return {
            "bound_kind": self.bound_kind,
            "passed": self.passed,
            "max_violation": self.max_violation,
            "tightness": self.tightness,
            "extremal": self.extremal,
            "witness": None if self.witness is None else self.witness.to_list(),
            "parameters": self.parameters,
            "hypotheses": self.hypotheses,
            "tolerance": self.tolerance,
            "details": self.details,
        }


def _report(kind, lhs_minus_rhs, witness, tol, **extra) -> BoundReport:
    """Build a report from signed excesses ``value - bound`` (positive = violated)."""
    excess = np.asarray(lhs_minus_rhs, dtype=float).reshape(-1)
    worst = float(excess.max()) if excess.size else -math.inf
    tightness = float(-worst) if excess.size else None
    viol = max(0.0, worst)
    return BoundReport(
        bound_kind=kind,
        passed=viol <= tol,
        max_violation=viol,
        tightness=tightness,
        witness=witness,
        tolerance=tol,
        **extra,
    )


def _require_normalized(f: TruncatedSeries, what: str) -> None:
    if not f.is_normalized():
        raise NotNormalized(f"{what} needs a normalized series (a0 = 0, a1 = 1)")


def _require_intrinsic(f: TruncatedSeries, what: str) -> None:
    if not f.is_real():
        raise NotIntrinsic(f"{what} is stated for intrinsic (real-coefficient) series")


def _require_trusted(series: Sequence[TruncatedSeries], r: float, tol: float) -> None:
    for s in series:
        est = float(tail_estimate(s, r))
        if est > tol:
            raise InsufficientSamples(
                f"truncation tail estimate {est:.3g} exceeds {tol:g} at r = {r}; raise the degree"
            )


# ---------------------------------------------------------------------------
# envelopes on the grid


class Envelope(enum.Enum):
    CARATHEODORY = "caratheodory"
    DISTORTION = "distortion"
    GROWTH = "growth"
    ROTATION_RATIO = "rotation-ratio"


def _envelope_bounds(kind: Envelope, r: np.ndarray):
    if kind is Envelope.CARATHEODORY:
        return (1 - r) / (1 + r), (1 + r) / (1 - r)
    if kind is Envelope.DISTORTION:
        return (1 - r) / (1 + r) ** 3, (1 + r) / (1 - r) ** 3
    if kind is Envelope.GROWTH:
        return r / (1 + r) ** 2, r / (1 - r) ** 2
    return (1 - r) / (1 + r), (1 + r) / (1 - r)


def verify_envelope(
    f: TruncatedSeries,
    kind: Envelope | str,
    grid: SampleGrid | None = None,
    tol: float = DEFAULT_TOL,
    prerequisite: ConditionReport | None = None,
    truncation_tol: float = TRUNCATION_TOL,
) -> BoundReport:
    """Check the lower and upper envelope of the chosen quantity at every trusted grid point.

    The Carathéodory envelope bounds ``Re d_s f`` from below and ``|d_s f|``
    from above and needs ``Re d_s f > 0``; that report is computed on the
    grid when not supplied and must pass. The other kinds need ``f``
    intrinsic and normalized; univalence is sampled on the slice of ``i``.
    """
    kind = Envelope(kind)
    grid = grid or SampleGrid.default()
    _require_normalized(f, kind.value)
    hyp = {"sampled": [], "asserted": []}
    d = slice_derivative(f)
    if kind is Envelope.CARATHEODORY:
        pre = prerequisite or check_condition(f, Condition.POSITIVE_DERIV_REAL_PART, grid, tol, truncation_tol=truncation_tol)
        if pre.condition != Condition.POSITIVE_DERIV_REAL_PART.value or not pre.passed:
            raise PrerequisiteNotMet("the Carathéodory envelope needs a passing positive-deriv-real-part report")
        hyp["sampled"].append("positive-deriv-real-part")
        used = [d]
    else:
        _require_intrinsic(f, kind.value)
        inj = check_injectivity_slice(f, UNIT_I, grid, truncation_tol=truncation_tol)
        if not inj.passed:
            raise HypothesisFailed("sampled injectivity on the slice of i fails; f is not univalent")
        hyp["sampled"].append("injectivity on slice i")
        hyp["asserted"].append("univalence on the unit ball")
        used = [f, d] if kind is not Envelope.ROTATION_RATIO else [_ratio_series(f)]

    trusted = _trusted_radii(used, grid.radii, truncation_tol)
    if not trusted.any():
        raise InsufficientSamples("truncation tail exceeds tolerance at every grid radius")
    pts = grid.points()[:, trusted]
    rr = np.broadcast_to(np.asarray(grid.radii)[trusted][None, :, None], pts.shape[:-1])
    lo, hi = _envelope_bounds(kind, rr)
    if kind is Envelope.CARATHEODORY:
        dv = evaluate_many(d, pts)
        low_val, high_val = dv[..., 0], qnorm_array(dv)
    elif kind is Envelope.DISTORTION:
        low_val = high_val = qnorm_array(evaluate_many(d, pts))
    elif kind is Envelope.GROWTH:
        low_val = high_val = qnorm_array(evaluate_many(f, pts))
    else:
        low_val = high_val = qnorm_array(evaluate_many(_ratio_series(f), pts))
    excess_lo = lo - low_val
    excess_hi = high_val - hi
    excess = np.maximum(excess_lo, excess_hi)
    flat_pts = pts.reshape(-1, 4)
    witness = Quaternion.from_seq(flat_pts[int(np.argmax(excess))])
    return _report(
        kind.value,
        excess,
        witness,
        tol,
        parameters={"radii": [float(r) for r in np.asarray(grid.radii)[trusted]], "units": len(grid.units)},
        hypotheses=hyp,
        details={
            "lower_tightness": float(-excess_lo.max()),
            "lower_witness": flat_pts[int(np.argmax(excess_lo))].tolist(),
            "upper_tightness": float(-excess_hi.max()),
            "upper_witness": flat_pts[int(np.argmax(excess_hi))].tolist(),
            "points_checked": int(excess.size),
            "skipped_truncation": int((~trusted).sum()) * len(grid.units) * grid.angles_per_circle,
        },
    )


def integral_mean_bound(
    f: TruncatedSeries,
    I: UnitImaginary = UNIT_I,
    r: float = 0.5,
    resolution: int = 256,
    tol: float = DEFAULT_TOL,
    truncation_tol: float = TRUNCATION_TOL,
) -> BoundReport:
    """Trapezoidal ``r int_0^{2 pi} |d_s f(r e^{I theta})| d theta`` against ``2 pi r (1+r)/(1-r)^2``."""
    if not 0.0 < r < 1.0:
        raise ParameterOutOfRange("integral mean needs 0 < r < 1")
    _require_normalized(f, "integral mean")
    _require_intrinsic(f, "integral mean")
    d = slice_derivative(f)
    _require_trusted([d], r, truncation_tol)
    value = integral_mean(d, I, r, resolution)
    bound = 2 * math.pi * r * (1 + r) / (1 - r) ** 2
    return _report(
        "integral-mean",
        [value - bound],
        None,
        tol,
        parameters={"r": r, "unit": I.to_list(), "resolution": resolution},
        hypotheses={"sampled": [], "asserted": ["f in S and intrinsic"]},
        details={"value": value, "bound": bound},
    )


def integral_mean(d: TruncatedSeries, I: UnitImaginary, r: float, resolution: int) -> float:
    """``r int_0^{2 pi} |d(r e^{I theta})| d theta`` by the periodic trapezoid rule."""
    th = 2 * math.pi * np.arange(resolution) / resolution
    pts = _circle(r, th, I)
    vals = qnorm_array(evaluate_many(d, pts))
    return float(r * vals.sum() * (2 * math.pi / resolution))


def _circle(r: float, theta: np.ndarray, I: UnitImaginary) -> np.ndarray:
    pts = np.zeros(theta.shape + (4,))
    pts[..., 0] = r * np.cos(theta)
    pts[..., 1:] = (r * np.sin(theta))[..., None] * I.to_array()
    return pts


def koebe_quarter(
    f: TruncatedSeries,
    grid: SampleGrid | None = None,
    tol: float = DEFAULT_TOL,
    truncation_tol: float = TRUNCATION_TOL,
) -> BoundReport:
    """Per radius, ``min |f|`` over the sampled sphere must reach ``r/(1+r)^2``."""
    grid = grid or SampleGrid.default()
    _require_normalized(f, "quarter theorem")
    _require_intrinsic(f, "quarter theorem")
    trusted = _trusted_radii([f], grid.radii, truncation_tol)
    if not trusted.any():
        raise InsufficientSamples("truncation tail exceeds tolerance at every grid radius")
    radii = np.asarray(grid.radii)[trusted]
    pts = grid.points()[:, trusted]
    vals = qnorm_array(evaluate_many(f, pts))
    per_r = vals.transpose(1, 0, 2).reshape(len(radii), -1)
    mins = per_r.min(axis=1)
    bounds = radii / (1 + radii) ** 2
    excess = bounds - mins
    k = int(np.argmax(excess))
    pts_r = pts.transpose(1, 0, 2, 3).reshape(len(radii), -1, 4)
    witness = Quaternion.from_seq(pts_r[k, int(np.argmin(per_r[k]))])
    return _report(
        "koebe-quarter",
        excess,
        witness,
        tol,
        parameters={"radii": radii.tolist(), "units": len(grid.units)},
        hypotheses={"sampled": [], "asserted": ["f in S and intrinsic"]},
        details={"min_modulus": mins.tolist(), "covering_radius": bounds.tolist()},
    )


# ---------------------------------------------------------------------------
# area theorem


@dataclass(frozen=True)
class LaurentTail:
    """Coefficients of ``q + sum_{n>=0} q^{-n} a_n`` on the exterior of the unit ball."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, copy=True)
        if c.ndim != 2 or c.shape[1] != 4:
            raise InputFormatError("tail coefficients must have shape (M + 1, 4)")
        if c.shape[0] < 2:
            raise InputFormatError("a Laurent tail needs M >= 1 (at least a0 and a1)")
        if not np.all(np.isfinite(c)):
            raise InputFormatError("tail coefficients must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def M(self) -> int:
        return self.coeffs.shape[0] - 1

    def area_sum(self) -> float:
        n = np.arange(self.M + 1)
        return float(np.sum(n * np.sum(self.coeffs**2, axis=1)))

    @classmethod
    def from_dict(cls, data) -> "LaurentTail":
        if not isinstance(data, dict) or not isinstance(data.get("coeffs"), list):
            raise InputFormatError("tail JSON must be an object with a 'coeffs' array")
        try:
            arr = np.array(data["coeffs"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise InputFormatError(f"malformed tail coefficients: {exc}") from exc
        if "degree" in data and data["degree"] != arr.shape[0] - 1:
            raise InputFormatError("'degree' does not match the number of tail coefficients")
        return cls(arr)

    @classmethod
    def from_json(cls, text: str) -> "LaurentTail":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"invalid tail JSON: {exc}") from exc

    def to_dict(self) -> dict:
        return {"degree": self.M, "coeffs": self.coeffs.tolist()}


def _laurent_values(b: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``z + sum_n b_n z^{-n}`` for complex ``b``."""
    out = z.astype(complex)
    zi = 1.0 / z
    p = np.ones_like(out)
    for bn in b:
        out = out + bn * p
        p = p * zi
    return out


def _shoelace_area(w: np.ndarray) -> float:
    """Green's formula ``1/2 |sum (x dy - y dx)|`` for the closed polygon ``w``."""
    x, y = w.real, w.imag
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * abs(float(np.sum(x * yn - xn * y)))


def _sampled_exterior_injective(b: np.ndarray, radii=(1.02, 1.1, 1.3, 1.7, 2.5), angles: int = 96, sep: float = 1e-3) -> bool:
    th = 2 * math.pi * np.arange(angles) / angles
    z = np.concatenate([r * np.exp(1j * th) for r in radii])
    w = _laurent_values(b, z)
    dz = np.abs(z[:, None] - z[None, :])
    dw = np.abs(w[:, None] - w[None, :])
    bad = np.triu((dz > sep) & (dw <= sep / 2), k=1)
    return not bad.any()


@dataclass(frozen=True)
class AreaResult:
    formula_value: float
    oracle_value: float
    report: BoundReport

    def __iter__(self):
        yield self.formula_value
        yield self.oracle_value

    @property
    def relative_error(self) -> float:
        return abs(self.formula_value - self.oracle_value) / abs(self.formula_value)


def area_complement(tail: LaurentTail, I: UnitImaginary = UNIT_I, boundary_resolution: int = 4096, rel_tol: float = 0.01) -> AreaResult:
    """Area formula ``pi (2 - sum n |a_n|^2)`` against a contour-integral oracle.

    On the slice of ``I`` the tail splits as ``f_1 + f_2 J``; the oracle adds
    the areas enclosed by the images of the unit circle under ``f_1`` and
    ``z + f_2``. Univalence of both is sampled on exterior circles and a
    failure raises :class:`HypothesisFailed`.
    """
    J = orthogonal_unit(I)
    split = split_coefficients(TruncatedSeries(tail.coeffs), I, J)
    b1, b2 = split.f1_coeffs, split.f2_coeffs
    if not (_sampled_exterior_injective(b1) and _sampled_exterior_injective(b2)):
        raise HypothesisFailed("sampled univalence of f1 or z + f2 on the exterior fails")
    th = 2 * math.pi * np.arange(boundary_resolution) / boundary_resolution
    z = np.exp(1j * th)
    oracle = _shoelace_area(_laurent_values(b1, z)) + _shoelace_area(_laurent_values(b2, z))
    formula = math.pi * (2.0 - tail.area_sum())
    rel = abs(formula - oracle) / abs(formula) if formula else abs(oracle)
    report = BoundReport(
        bound_kind="area",
        passed=rel <= rel_tol,
        max_violation=max(0.0, rel - rel_tol),
        tightness=rel_tol - rel,
        witness=None,
        parameters={"unit": I.to_list(), "split_unit": J.to_list(), "resolution": boundary_resolution},
        hypotheses={"sampled": ["univalence of f1 and z + f2 on exterior circles"], "asserted": []},
        tolerance=rel_tol,
        details={"formula_value": formula, "oracle_value": oracle, "relative_error": rel},
    )
    return AreaResult(formula, oracle, report)


# ---------------------------------------------------------------------------
# coefficient inequalities


class CoefficientKind(enum.Enum):
    AREA_SUM = "area-sum"
    BIEBERBACH = "bieberbach"
    STARLIKE_COEFF = "starlike-coeff"
    CONVEX_COEFF = "convex-coeff"


def coefficient_bounds(f: TruncatedSeries | LaurentTail, kind: CoefficientKind | str, tol: float = DEFAULT_TOL) -> BoundReport:
    """Coefficient inequalities; class membership is asserted by the caller.

    ``area-sum`` reads the coefficients as a Laurent tail and checks
    ``sum n |a_n|^2 <= 2`` and ``|a_1| <= sqrt 2``. The other kinds check
    ``|a_n| <= n`` or ``|a_n| <= 1`` for ``n >= 2``.
    """
    kind = CoefficientKind(kind)
    coeffs = f.coeffs
    norms = qnorm_array(coeffs)
    asserted = {
        CoefficientKind.AREA_SUM: "univalent Laurent tail",
        CoefficientKind.BIEBERBACH: "univalent with coefficients in one slice",
        CoefficientKind.STARLIKE_COEFF: "starlike",
        CoefficientKind.CONVEX_COEFF: "convex on a slice",
    }[kind]
    hyp = {"sampled": [], "asserted": [asserted]}
    if kind is CoefficientKind.AREA_SUM:
        n = np.arange(len(norms))
        s = float(np.sum(n * norms**2))
        a1 = float(norms[1]) if len(norms) > 1 else 0.0
        return _report(
            kind.value,
            [s - 2.0, a1 - math.sqrt(2.0)],
            None,
            tol,
            hypotheses=hyp,
            details={"area_sum": s, "a1_norm": a1},
        )
    n = np.arange(2, len(norms))
    bound = n.astype(float) if kind is not CoefficientKind.CONVEX_COEFF else np.ones(len(n))
    excess = norms[2:] - bound
    witness = None
    if excess.size:
        k = int(np.argmax(excess))
        witness = Quaternion.from_seq(coeffs[2 + k])
    return _report(
        kind.value,
        excess,
        witness,
        tol,
        parameters={"degree": len(norms) - 1},
        hypotheses=hyp,
        details={"per_n_slack": (-excess).tolist()},
    )


def rogosinski(f: TruncatedSeries, g: TruncatedSeries, tol: float = DEFAULT_TOL) -> BoundReport:
    """``sum_{k<=n} |a_k|^2 <= sum_{k<=n} |b_k|^2`` for every available ``n``."""
    n = min(f.degree, g.degree)
    sf = np.cumsum(f.norms()[1 : n + 1] ** 2)
    sg = np.cumsum(g.norms()[1 : n + 1] ** 2)
    excess = sf - sg
    return _report(
        "rogosinski",
        excess,
        None,
        tol,
        parameters={"degree": n},
        hypotheses=_subordination_hypotheses(f),
        details={"worst_n": int(np.argmax(excess)) + 1 if excess.size else None, "per_n_slack": (-excess).tolist()},
    )


# ---------------------------------------------------------------------------
# norms and subordination


class NormKind(enum.Enum):
    M_INF = "MInf"
    M_P = "MP"
    M_INF_SLICE = "MInfSlice"
    M_P_SLICE = "MPSlice"


@dataclass(frozen=True)
class MNorm:
    kind: NormKind
    p: float | None = None
    unit: UnitImaginary | None = None

    @classmethod
    def inf(cls) -> "MNorm":
        return cls(NormKind.M_INF)

    @classmethod
    def mp(cls, p: float) -> "MNorm":
        return cls(NormKind.M_P, p)

    @classmethod
    def inf_slice(cls, I: UnitImaginary) -> "MNorm":
        return cls(NormKind.M_INF_SLICE, None, I)

    @classmethod
    def mp_slice(cls, p: float, I: UnitImaginary) -> "MNorm":
        return cls(NormKind.M_P_SLICE, p, I)


#: Normalizing factor in front of the sphere integral in ``M_p``.
MP_NORMALIZATION = 1.0 / (4.0 * math.pi)
#: The angle parametrization of the 3-sphere covers it twice.
SPHERE_MULTIPLICITY = 2


def sphere_measure(r: float) -> float:
    """Surface measure ``2 pi^2 r^3`` of the 3-sphere of radius ``r``."""
    return 2.0 * math.pi**2 * r**3


def _alpha_beta(f: TruncatedSeries, r: float, theta: np.ndarray):
    """Even/odd parts ``alpha, beta`` with ``f(r cos t + J r sin t) = alpha + J beta`` for every ``J``."""
    ref = UNIT_I
    fp = evaluate_many(f, _circle(r, theta, ref))
    fm = evaluate_many(f, _circle(r, -theta, ref))
    alpha = 0.5 * (fp + fm)
    iq = np.array([0.0, *ref.to_array()])
    beta = 0.5 * qmul_array(iq, fm - fp)
    return alpha, beta


def _sphere_nodes(resolution: int):
    """Nodes and weights for the angles ``t1, t2 in [0, 2pi)``, ``t3 in [0, pi]``.

    Weights include the Jacobian ``sin(t1)^2 |sin(t2)|`` (without ``r^3``).
    """
    n1 = resolution
    t1 = 2 * math.pi * np.arange(n1) / n1
    w1 = np.full(n1, 2 * math.pi / n1) * np.sin(t1) ** 2
    n23 = max(8, resolution // 8)
    x, w = np.polynomial.legendre.leggauss(n23)
    half = 0.5 * math.pi * (x + 1.0)
    hw = 0.5 * math.pi * w
    t2 = np.concatenate([half, half + math.pi])
    w2 = np.concatenate([hw, hw]) * np.abs(np.sin(t2))
    t3, w3 = half, hw
    return t1, w1, t2, w2, t3, w3


def m_norm(f: TruncatedSeries, which: MNorm, r: float, resolution: int = 256) -> float:
    """Integral means and maxima on spheres and slice circles of radius ``r``.

    ``MP`` uses the normalization ``1 / (4 pi)`` in front of the sphere
    integral, with the sphere parametrized by ``(t1, t2, t3)``; the double
    cover of that parametrization is divided out, so the total measure is
    :func:`sphere_measure`.
    """
    if not 0.0 <= r < 1.0:
        raise ParameterOutOfRange("norms are defined for 0 <= r < 1")
    if which.p is not None and which.p < 1:
        raise ParameterOutOfRange("p must be at least 1")
    if which.kind in (NormKind.M_INF_SLICE, NormKind.M_P_SLICE):
        th = 2 * math.pi * np.arange(resolution) / resolution
        vals = qnorm_array(evaluate_many(f, _circle(r, th, which.unit)))
        if which.kind is NormKind.M_INF_SLICE:
            return float(vals.max())
        return float(np.mean(vals**which.p) ** (1.0 / which.p))
    if which.kind is NormKind.M_INF:
        # max over J of |alpha + J beta| = sqrt(|a|^2 + |b|^2 + 2 |vec(beta conj(alpha))|)
        th = 2 * math.pi * np.arange(resolution) / resolution
        alpha, beta = _alpha_beta(f, r, th)
        ab = qmul_array(beta, alpha * np.array([1.0, -1.0, -1.0, -1.0]))
        sq = np.sum(alpha**2, -1) + np.sum(beta**2, -1) + 2 * qnorm_array(ab[..., 1:])
        return float(np.sqrt(sq.max()))
    t1, w1, t2, w2, t3, w3 = _sphere_nodes(resolution)
    alpha, beta = _alpha_beta(f, r, t1)
    # unit imaginary direction for (t2, t3); q = r cos t1 + J r sin t1
    J = np.stack(
        [
            np.cos(t2)[:, None] * np.ones_like(t3)[None, :],
            np.sin(t2)[:, None] * np.cos(t3)[None, :],
            np.sin(t2)[:, None] * np.sin(t3)[None, :],
        ],
        axis=-1,
    )
    Jq = np.concatenate([np.zeros(J.shape[:-1] + (1,)), J], axis=-1)
    vals = alpha[:, None, None, :] + qmul_array(Jq[None, :, :, :], beta[:, None, None, :])
    integrand = qnorm_array(vals) ** which.p
    weights = w1[:, None, None] * w2[None, :, None] * w3[None, None, :]
    integral = r**3 * float(np.sum(integrand * weights)) / SPHERE_MULTIPLICITY
    return float((MP_NORMALIZATION * integral) ** (1.0 / which.p))


class SubordinateSeries(TruncatedSeries):
    """``g . w`` carrying the functions it came from and the checks performed."""

    __slots__ = ("g", "w", "certificate")

    def __init__(self, coeffs, g: TruncatedSeries, w: TruncatedSeries, certificate: dict):
        super().__init__(coeffs)
        self.g = g
        self.w = w
        self.certificate = certificate


def _subordination_hypotheses(f: TruncatedSeries) -> dict:
    if isinstance(f, SubordinateSeries):
        return {"sampled": list(f.certificate.get("sampled", [])), "asserted": list(f.certificate.get("asserted", []))}
    return {"sampled": [], "asserted": ["f subordinate to g"]}


def build_subordinate(
    g: TruncatedSeries,
    w: TruncatedSeries,
    grid: SampleGrid | None = None,
    tol: float = DEFAULT_TOL,
    truncation_tol: float = TRUNCATION_TOL,
) -> SubordinateSeries:
    """``f = g . w`` after sampling the Schwarz-function conditions on ``w``.

    Every ``w`` must satisfy ``|w(q)| < 1``; intrinsic ``w`` must also satisfy
    ``|w(q)| <= |q|``. Violations raise :class:`SchwarzViolation`.
    """
    if np.linalg.norm(w.coeffs[0]) > COEFF_EPS:
        raise NonzeroConstantTerm("a subordination needs w(0) = 0")
    grid = grid or SampleGrid.default()
    trusted = _trusted_radii([w], grid.radii, truncation_tol)
    pts = grid.points()[:, trusted]
    wv = qnorm_array(evaluate_many(w, pts))
    if wv.size and wv.max() >= 1.0:
        raise SchwarzViolation("sampled |w(q)| reaches 1 inside the unit ball")
    sampled = ["|w| < 1 on the grid"]
    asserted = ["|w| < 1 on the whole unit ball"]
    intrinsic = w.is_real()
    if intrinsic:
        qn = qnorm_array(pts)
        if wv.size and float((wv - qn).max()) > tol:
            raise SchwarzViolation("sampled |w(q)| exceeds |q| for an intrinsic w")
        sampled.append("|w(q)| <= |q| on the grid")
    f = bullet_compose(g, w)
    cert = {"sampled": sampled, "asserted": asserted, "intrinsic_w": intrinsic, "points": int(wv.size)}
    return SubordinateSeries(f.coeffs, g, w, cert)


def subordination_suite(
    f: TruncatedSeries,
    g: TruncatedSeries,
    I: UnitImaginary = UNIT_I,
    r: float = 0.5,
    p: float = 2.0,
    resolution: int = 256,
    tol: float = DEFAULT_TOL,
) -> BoundReport:
    """Norm inequalities between ``f`` subordinate to ``g`` and the derivative bound at 0."""
    if np.linalg.norm(f.coeffs[0] - g.coeffs[0]) > 1e-12:
        raise PrerequisiteNotMet("subordination needs f(0) = g(0)")
    minf_i_f = m_norm(f, MNorm.inf_slice(I), r, resolution)
    minf_i_g = m_norm(g, MNorm.inf_slice(I), r, resolution)
    mp_i_f = m_norm(f, MNorm.mp_slice(p, I), r, resolution)
    mp_i_g = m_norm(g, MNorm.mp_slice(p, I), r, resolution)
    minf_f = m_norm(f, MNorm.inf(), r, resolution)
    minf_g = m_norm(g, MNorm.inf(), r, resolution)
    mp_f = m_norm(f, MNorm.mp(p), r, resolution)
    s2 = math.sqrt(2.0)
    df0 = float(np.linalg.norm(f.coeffs[1])) if f.degree >= 1 else 0.0
    dg0 = float(np.linalg.norm(g.coeffs[1])) if g.degree >= 1 else 0.0
    checks = {
        "slice_max": (minf_i_f, s2 * minf_i_g),
        "slice_mean": (mp_i_f, 2.0 ** (p + 1) * mp_i_g),
        "sphere_max": (minf_f, s2 * minf_i_g),
        "slice_vs_sphere_max": (s2 * minf_i_g, s2 * minf_g),
        "sphere_mean": (mp_f, 2.0 ** (2 * p + 2) * math.pi**2 * mp_i_g),
        "derivative_at_zero": (df0, dg0),
    }
    excess = [lhs - rhs for lhs, rhs in checks.values()]
    return _report(
        "subordination",
        excess,
        None,
        tol,
        parameters={"r": r, "p": p, "unit": I.to_list(), "resolution": resolution},
        hypotheses=_subordination_hypotheses(f),
        details={
            "inequalities": {k: {"lhs": lhs, "rhs": rhs, "slack": rhs - lhs} for k, (lhs, rhs) in checks.items()},
            "mp_normalization": MP_NORMALIZATION,
            "sphere_measure": sphere_measure(r),
        },
    )


def t_transform_bounds(f: TruncatedSeries, delta: float = 0.5, samples: int = 101, tol: float = DEFAULT_TOL) -> BoundReport:
    """``|d_s f(t)| <= sqrt 2 / (1 - t^2)`` and ``|-2t d_s f(t) + (1 - t^2) d_s^2 f(t)| <= 1/(1 - t^2)``."""
    if not 0.0 < delta < 1.0:
        raise ParameterOutOfRange("delta must lie in (0, 1)")
    t = np.linspace(-delta, delta, samples + 2)[1:-1]
    pts = np.zeros((len(t), 4))
    pts[:, 0] = t
    d1 = slice_derivative(f)
    d2 = slice_derivative(d1)
    v1 = evaluate_many(d1, pts)
    v2 = evaluate_many(d2, pts)
    s = 1.0 - t**2
    first = qnorm_array(v1) - math.sqrt(2.0) / s
    second = qnorm_array(-2.0 * t[:, None] * v1 + s[:, None] * v2) - 1.0 / s
    excess = np.maximum(first, second)
    k = int(np.argmax(excess))
    return _report(
        "t-transform",
        excess,
        Quaternion.real(float(t[k])),
        tol,
        parameters={"delta": delta, "samples": samples},
        hypotheses={"sampled": [], "asserted": ["univalence hypotheses for the Möbius splittings"]},
        details={"first_tightness": float(-first.max()), "second_tightness": float(-second.max())},
    )
