"""Pointwise differential geometry of warped polar metrics g = dr^2 + f(r,theta)^2 dtheta^2.

The warp function f determines everything: the inner product of tangent
vectors, the Gaussian curvature K = -f''/f (primes are radial derivatives),
the gradient, the Laplace-Beltrami operator, the mean curvature f'/f of
centered circles, the Christoffel symbols, and the covariant Hessian.

A note on the Laplacian: for this metric family

    Lap u = u_rr + (f'/f) u_r + (1/f^2) u_tt - (f_theta/f^3) u_t.

The angular second-derivative coefficient is 1/f^2. That coefficient is
forced by Lap = div grad together with the gradient formula
grad u = u_r d/dr + (u_theta/f^2) d/dtheta, and by the flat case f = r,
where the operator must reduce to the classical polar Laplacian
u_rr + u_r/r + u_tt/r^2. Any 1/f variant fails both checks.

All types are immutable after construction and all operations are pure
functions of their inputs; everything here is safe to evaluate concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

from .errors import ConfigError, DomainError, HarmonicityError
from .expressions import compile_expression

TWO_PI = 2.0 * math.pi

ScalarFn = Callable[[float, float], float]

# Default relative steps for the centered finite-difference fallbacks.
# 1e-4*max(1,r) balances truncation against cancellation at double precision
# for first/second derivatives; the nested third-derivative stencils used by
# the Bochner checks use the coarser 1e-3*max(1,r).
FD_STEP_SCALE = 1e-4
NESTED_FD_STEP_SCALE = 1e-3


def normalize_angle(theta: float) -> float:
    """Reduce an angle modulo 2*pi into [0, 2*pi). Idempotent."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    return 0.0 if t == TWO_PI else t


@dataclass(frozen=True)
class Point:
    """A point of the punctured plane in polar coordinates, r > 0, theta in [0, 2*pi)."""

    r: float
    theta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and self.r > 0.0):
            raise DomainError(f"point radius must be positive and finite, got {self.r}")
        if not math.isfinite(self.theta):
            raise DomainError(f"point angle must be finite, got {self.theta}")
        object.__setattr__(self, "theta", normalize_angle(self.theta))


@dataclass(frozen=True)
class TangentVector:
    """Tangent vector a*d/dr + b*d/dtheta in the polar coordinate basis."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"tangent components must be finite, got ({self.a}, {self.b})")


@dataclass(frozen=True)
class ChristoffelSymbols:
    """The three nonzero Christoffel symbols of dr^2 + f^2 dtheta^2.

    gamma_r_tt  = Gamma^r_{theta theta} = -f f'
    gamma_t_rt  = Gamma^theta_{r theta} =  f'/f   (= Gamma^theta_{theta r})
    gamma_t_tt  = Gamma^theta_{theta theta} = f_theta/f

    Every other coordinate symbol vanishes for this metric family.
    """

    gamma_r_tt: float
    gamma_t_rt: float
    gamma_t_tt: float


@dataclass(frozen=True)
class HessianComponents:
    """Coordinate components of the covariant Hessian (symmetric, rt == tr)."""

    rr: float
    rt: float
    tt: float


def _fd_first(fn: Callable[[float], float], x: float, h: float) -> float:
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


def _fd_second(fn: Callable[[float], float], x: float, h: float) -> float:
    return (fn(x + h) - 2.0 * fn(x) + fn(x - h)) / (h * h)


def _radial_step(r: float, scale: float, r_min: float, r_max: float) -> float:
    h = scale * max(1.0, r)
    if math.isfinite(r_max):
        h = min(h, 0.45 * (r_max - r))
    h = min(h, 0.45 * (r - r_min)) if r - r_min > 0 else h
    return max(h, 1e-12)


@dataclass(frozen=True)
class WarpMetric:
    """The warp function f with derivative suppliers; encodes the metric.

    warp(r, theta) must be positive for r_min < r < r_max.  warp_dr and
    warp_drr are radial derivatives, warp_dth the angular derivative.
    curvature, when supplied, must agree with -warp_drr/warp.  warp_dthth
    (second angular derivative) is optional and only consumed by the fully
    analytic Bochner path on angle-dependent warps; when absent it falls
    back to a centered difference of warp_dth.

    has_pole records whether f -> 0 and f' -> 1 as r -> 0+ are claimed; no
    operation requires it, since everything here works away from the pole.
    """

    warp: ScalarFn
    warp_dr: ScalarFn
    warp_drr: ScalarFn
    warp_dth: ScalarFn
    curvature: Optional[ScalarFn] = None
    r_min: float = 0.0
    r_max: float = math.inf
    has_pole: bool = False
    warp_dthth: Optional[ScalarFn] = None
    label: str = "custom"

    def __post_init__(self) -> None:
        if self.r_min < 0.0 or not self.r_min < self.r_max:
            raise DomainError(
                f"need 0 <= r_min < r_max, got r_min={self.r_min}, r_max={self.r_max}"
            )

    @classmethod
    def from_warp(
        cls,
        warp: ScalarFn,
        *,
        r_min: float = 0.0,
        r_max: float = math.inf,
        has_pole: bool = False,
        step_scale: float = FD_STEP_SCALE,
        label: str = "custom",
    ) -> "WarpMetric":
        """Build a metric from the warp alone, deriving f', f'', f_theta by
        centered differences with step step_scale*max(1,r) radially and
        step_scale in theta (declared fallback steps)."""

        def dr(r: float, t: float) -> float:
            h = _radial_step(r, step_scale, r_min, r_max)
            return _fd_first(lambda x: warp(x, t), r, h)

        def drr(r: float, t: float) -> float:
            h = _radial_step(r, step_scale, r_min, r_max)
            return _fd_second(lambda x: warp(x, t), r, h)

        def dth(r: float, t: float) -> float:
            return _fd_first(lambda y: warp(r, y), t, step_scale)

        def dthth(r: float, t: float) -> float:
            return _fd_second(lambda y: warp(r, y), t, step_scale)

        return cls(
            warp=warp,
            warp_dr=dr,
            warp_drr=drr,
            warp_dth=dth,
            curvature=None,
            r_min=r_min,
            r_max=r_max,
            has_pole=has_pole,
            warp_dthth=dthth,
            label=label,
        )

    def require_usable(self, p: Point) -> float:
        """Check p is in the usable domain and return f(p) > 0."""
        if not (self.r_min < p.r < self.r_max):
            raise DomainError(
                f"radius {p.r} outside usable range ({self.r_min}, {self.r_max}) "
                f"of metric {self.label!r}"
            )
        f = self.warp(p.r, p.theta)
        if not (math.isfinite(f) and f > 0.0):
            raise DomainError(f"warp of metric {self.label!r} is {f} at {p}, must be positive")
        return f

    def second_angular_derivative(self, r: float, t: float) -> float:
        if self.warp_dthth is not None:
            return self.warp_dthth(r, t)
        return _fd_first(lambda y: self.warp_dth(r, y), t, FD_STEP_SCALE)


@dataclass(frozen=True)
class FieldSampler:
    """A scalar field u(r, theta) with derivative suppliers.

    First and second derivatives are mandatory; third derivatives are
    optional and enable the fully analytic Bochner checks.  Use from_value
    for a finite-difference fallback with a declared step.
    """

    value: ScalarFn
    d_r: ScalarFn
    d_th: ScalarFn
    d_rr: ScalarFn
    d_rth: ScalarFn
    d_thth: ScalarFn
    d_rrr: Optional[ScalarFn] = None
    d_rrth: Optional[ScalarFn] = None
    d_rthth: Optional[ScalarFn] = None
    d_ththth: Optional[ScalarFn] = None
    label: str = "field"

    @property
    def has_third_derivatives(self) -> bool:
        return None not in (self.d_rrr, self.d_rrth, self.d_rthth, self.d_ththth)

    @classmethod
    def from_value(
        cls,
        value: ScalarFn,
        *,
        step_scale: float = FD_STEP_SCALE,
        r_min: float = 0.0,
        r_max: float = math.inf,
        label: str = "field(fd)",
    ) -> "FieldSampler":
        """Derive all first/second derivatives from the values by centered
        differences: radial step step_scale*max(1,r), angular step step_scale."""

        def hr(r: float) -> float:
            return _radial_step(r, step_scale, r_min, r_max)

        def d_r(r: float, t: float) -> float:
            return _fd_first(lambda x: value(x, t), r, hr(r))

        def d_th(r: float, t: float) -> float:
            return _fd_first(lambda y: value(r, y), t, step_scale)

        def d_rr(r: float, t: float) -> float:
            return _fd_second(lambda x: value(x, t), r, hr(r))

        def d_thth(r: float, t: float) -> float:
            return _fd_second(lambda y: value(r, y), t, step_scale)

        def d_rth(r: float, t: float) -> float:
            h, k = hr(r), step_scale
            return (
                value(r + h, t + k) - value(r + h, t - k)
                - value(r - h, t + k) + value(r - h, t - k)
            ) / (4.0 * h * k)

        return cls(value, d_r, d_th, d_rr, d_rth, d_thth, label=label)


# ---------------------------------------------------------------------------
# Pointwise operations


def inner_product(metric: WarpMetric, p: Point, v1: TangentVector, v2: TangentVector) -> float:
    """g(v1, v2) = a1*a2 + b1*b2*f(p)^2."""
    f = metric.require_usable(p)
    return v1.a * v2.a + v1.b * v2.b * f * f


def gaussian_curvature(metric: WarpMetric, p: Point) -> float:
    """Gaussian curvature K = -f''/f (or the supplied curvature closure)."""
    f = metric.require_usable(p)
    if metric.curvature is not None:
        return metric.curvature(p.r, p.theta)
    return -metric.warp_drr(p.r, p.theta) / f


def mean_curvature_ratio(metric: WarpMetric, p: Point) -> float:
    """Mean curvature f'/f of the centered circle through p."""
    f = metric.require_usable(p)
    return metric.warp_dr(p.r, p.theta) / f


def christoffel(metric: WarpMetric, p: Point) -> ChristoffelSymbols:
    """The three nonzero Christoffel symbols (-f f', f'/f, f_theta/f) at p."""
    f = metric.require_usable(p)
    fr = metric.warp_dr(p.r, p.theta)
    ft = metric.warp_dth(p.r, p.theta)
    return ChristoffelSymbols(gamma_r_tt=-f * fr, gamma_t_rt=fr / f, gamma_t_tt=ft / f)


def gradient(metric: WarpMetric, u: FieldSampler, p: Point) -> TangentVector:
    """grad u = u_r d/dr + (u_theta/f^2) d/dtheta."""
    f = metric.require_usable(p)
    return TangentVector(a=u.d_r(p.r, p.theta), b=u.d_th(p.r, p.theta) / (f * f))


def gradient_norm_sq(metric: WarpMetric, u: FieldSampler, p: Point) -> float:
    """g(grad u, grad u) = u_r^2 + u_theta^2/f^2."""
    f = metric.require_usable(p)
    ur = u.d_r(p.r, p.theta)
    ut = u.d_th(p.r, p.theta)
    return ur * ur + (ut * ut) / (f * f)


def laplace_beltrami(metric: WarpMetric, u: FieldSampler, p: Point) -> float:
    """Lap u = u_rr + (f'/f) u_r + (1/f^2) u_tt - (f_theta/f^3) u_t."""
    f = metric.require_usable(p)
    r, t = p.r, p.theta
    fr = metric.warp_dr(r, t)
    ft = metric.warp_dth(r, t)
    return (
        u.d_rr(r, t)
        + (fr / f) * u.d_r(r, t)
        + u.d_thth(r, t) / (f * f)
        - (ft / (f * f * f)) * u.d_th(r, t)
    )


def covariant_hessian(metric: WarpMetric, u: FieldSampler, p: Point) -> HessianComponents:
    """Coordinate components u_{;ij} = d_i d_j u - Gamma^k_{ij} d_k u.

    For this metric family:
        u_{;rr} = u_rr
        u_{;rt} = u_rt - (f'/f) u_t
        u_{;tt} = u_tt + f f' u_r - (f_theta/f) u_t
    """
    f = metric.require_usable(p)
    r, t = p.r, p.theta
    fr = metric.warp_dr(r, t)
    ft = metric.warp_dth(r, t)
    ur = u.d_r(r, t)
    ut = u.d_th(r, t)
    return HessianComponents(
        rr=u.d_rr(r, t),
        rt=u.d_rth(r, t) - (fr / f) * ut,
        tt=u.d_thth(r, t) + f * fr * ur - (ft / f) * ut,
    )


def hessian_norm_sq(metric: WarpMetric, u: FieldSampler, p: Point) -> float:
    """Orthonormal-frame norm |Hess u|^2 = u_{;rr}^2 + 2 u_{;rt}^2/f^2 + u_{;tt}^2/f^4.

    Raising both indices with g gives the frame-invariant value; its trace
    counterpart g^{ij} u_{;ij} = u_{;rr} + u_{;tt}/f^2 equals the Laplacian.
    """
    f = metric.require_usable(p)
    h = covariant_hessian(metric, u, p)
    f2 = f * f
    return h.rr * h.rr + 2.0 * (h.rt * h.rt) / f2 + (h.tt * h.tt) / (f2 * f2)


# ---------------------------------------------------------------------------
# Bochner identities for harmonic fields

# |Lap u| <= HARMONICITY_RTOL * (1 + |grad u|^2) is required at the evaluation
# point before either Bochner residual is computed; violations are errors,
# not silent degradation.
HARMONICITY_RTOL = 1e-6


def _require_harmonic(metric: WarpMetric, u: FieldSampler, p: Point) -> tuple[float, float]:
    lap = laplace_beltrami(metric, u, p)
    gsq = gradient_norm_sq(metric, u, p)
    if abs(lap) > HARMONICITY_RTOL * (1.0 + gsq):
        raise HarmonicityError(
            f"field {u.label!r} is not harmonic at {p}: |Lap u| = {abs(lap):.3e} "
            f"exceeds {HARMONICITY_RTOL:.0e}*(1+|grad u|^2) = "
            f"{HARMONICITY_RTOL * (1.0 + gsq):.3e}"
        )
    return lap, gsq


def _grad_sq_closure(metric: WarpMetric, u: FieldSampler) -> ScalarFn:
    def q(r: float, t: float) -> float:
        f = metric.warp(r, t)
        ur = u.d_r(r, t)
        ut = u.d_th(r, t)
        return ur * ur + (ut * ut) / (f * f)

    return q


def _grad_sq_first_derivatives(
    metric: WarpMetric, u: FieldSampler, r: float, t: float
) -> tuple[float, float, float]:
    """(q, q_r, q_t) for q = |grad u|^2, using analytic second derivatives of u."""
    f = metric.warp(r, t)
    fr = metric.warp_dr(r, t)
    ft = metric.warp_dth(r, t)
    ur, ut = u.d_r(r, t), u.d_th(r, t)
    urr, urt, utt = u.d_rr(r, t), u.d_rth(r, t), u.d_thth(r, t)
    f2, f3 = f * f, f * f * f
    q = ur * ur + ut * ut / f2
    q_r = 2.0 * ur * urr + 2.0 * ut * urt / f2 - 2.0 * ut * ut * fr / f3
    q_t = 2.0 * ur * urt + 2.0 * ut * utt / f2 - 2.0 * ut * ut * ft / f3
    return q, q_r, q_t


def _grad_sq_laplacian_analytic(
    metric: WarpMetric, u: FieldSampler, p: Point
) -> tuple[float, float, float, float]:
    """(q, q_r, q_t, Lap q) from analytic third derivatives of u.

    The pure second-radial and second-angular derivatives of q need u_rrr,
    u_rrt, u_rtt, u_ttt and the warp's f'' and f_thth; no mixed warp
    derivative enters because the Laplacian has no mixed term.
    """
    r, t = p.r, p.theta
    f = metric.warp(r, t)
    fr = metric.warp_dr(r, t)
    frr = metric.warp_drr(r, t)
    ft = metric.warp_dth(r, t)
    ftt = metric.second_angular_derivative(r, t)
    ur, ut = u.d_r(r, t), u.d_th(r, t)
    urr, urt, utt = u.d_rr(r, t), u.d_rth(r, t), u.d_thth(r, t)
    urrr = u.d_rrr(r, t)  # type: ignore[misc]
    urrt = u.d_rrth(r, t)  # type: ignore[misc]
    urtt = u.d_rthth(r, t)  # type: ignore[misc]
    uttt = u.d_ththth(r, t)  # type: ignore[misc]

    f2, f3, f4 = f * f, f * f * f, f * f * f * f
    q, q_r, q_t = _grad_sq_first_derivatives(metric, u, r, t)
    q_rr = (
        2.0 * urr * urr
        + 2.0 * ur * urrr
        + 2.0 * (urt * urt + ut * urrt) / f2
        - 8.0 * ut * urt * fr / f3
        - 2.0 * ut * ut * frr / f3
        + 6.0 * ut * ut * fr * fr / f4
    )
    q_tt = (
        2.0 * urt * urt
        + 2.0 * ur * urtt
        + 2.0 * (utt * utt + ut * uttt) / f2
        - 8.0 * ut * utt * ft / f3
        - 2.0 * ut * ut * ftt / f3
        + 6.0 * ut * ut * ft * ft / f4
    )
    lap_q = q_rr + (fr / f) * q_r + q_tt / f2 - (ft / f3) * q_t
    return q, q_r, q_t, lap_q


def _resolve_mode(u: FieldSampler, derivative_mode: str) -> str:
    if derivative_mode == "auto":
        return "analytic" if u.has_third_derivatives else "fd"
    if derivative_mode == "analytic" and not u.has_third_derivatives:
        raise DomainError(
            f"field {u.label!r} has no analytic third derivatives; "
            "use derivative_mode='fd' or 'auto'"
        )
    if derivative_mode not in ("analytic", "fd"):
        raise DomainError(f"derivative_mode must be auto|analytic|fd, got {derivative_mode!r}")
    return derivative_mode


def bochner_residual(
    metric: WarpMetric,
    u: FieldSampler,
    p: Point,
    *,
    derivative_mode: str = "auto",
    fd_step_scale: float = NESTED_FD_STEP_SCALE,
) -> float:
    """Residual of the Bochner identity for a harmonic field.

    For harmonic u the identity reads

        (1/2) Lap |grad u|^2 = |Hess u|^2 + K |grad u|^2,

    the gradient-of-Laplacian term having dropped.  Returns
    (1/2) Lap q - |Hess u|^2 - K q with q = |grad u|^2.  The left side uses
    analytic third derivatives when available (derivative_mode 'analytic' or
    'auto'), otherwise nested centered differences of q with step
    fd_step_scale*max(1,r) radially and fd_step_scale in theta.
    """
    _, gsq = _require_harmonic(metric, u, p)
    mode = _resolve_mode(u, derivative_mode)
    hsq = hessian_norm_sq(metric, u, p)
    curv = gaussian_curvature(metric, p)
    if mode == "analytic":
        _, _, _, lap_q = _grad_sq_laplacian_analytic(metric, u, p)
    else:
        q_sampler = FieldSampler.from_value(
            _grad_sq_closure(metric, u),
            step_scale=fd_step_scale,
            r_min=metric.r_min,
            r_max=metric.r_max,
            label="|grad u|^2",
        )
        lap_q = laplace_beltrami(metric, q_sampler, p)
    return 0.5 * lap_q - hsq - curv * gsq


def log_grad_energy_laplacian(
    metric: WarpMetric,
    u: FieldSampler,
    p: Point,
    *,
    derivative_mode: str = "auto",
    fd_step_scale: float = NESTED_FD_STEP_SCALE,
) -> float:
    """Lap log(1 + |grad u|^2) at p (no harmonicity assumption).

    Analytic mode uses the chain rule Lap phi(q) = phi' Lap q + phi'' |grad q|^2;
    fd mode applies the Laplacian to nested centered differences of
    log(1 + q) directly.
    """
    mode = _resolve_mode(u, derivative_mode)
    if mode == "analytic":
        f = metric.require_usable(p)
        q, q_r, q_t, lap_q = _grad_sq_laplacian_analytic(metric, u, p)
        grad_q_sq = q_r * q_r + q_t * q_t / (f * f)
        denom = 1.0 + q
        return lap_q / denom - grad_q_sq / (denom * denom)
    q = _grad_sq_closure(metric, u)
    sampler = FieldSampler.from_value(
        lambda r, t: math.log1p(q(r, t)),
        step_scale=fd_step_scale,
        r_min=metric.r_min,
        r_max=metric.r_max,
        label="log(1+|grad u|^2)",
    )
    return laplace_beltrami(metric, sampler, p)


def bochner2_residual(
    metric: WarpMetric,
    u: FieldSampler,
    p: Point,
    *,
    derivative_mode: str = "auto",
    fd_step_scale: float = NESTED_FD_STEP_SCALE,
) -> float:
    """Residual of the logarithmic Bochner identity for surfaces.

    For any harmonic u on a surface,

        Lap log(1 + |grad u|^2)
            = [2 |Hess u|^2 + 2 K |grad u|^2 (1 + |grad u|^2)] / (1 + |grad u|^2)^2.

    Returns LHS - RHS; derivative handling as in bochner_residual.
    """
    _, gsq = _require_harmonic(metric, u, p)
    hsq = hessian_norm_sq(metric, u, p)
    curv = gaussian_curvature(metric, p)
    denom = 1.0 + gsq
    rhs = (2.0 * hsq + 2.0 * curv * gsq * denom) / (denom * denom)
    lhs = log_grad_energy_laplacian(
        metric, u, p, derivative_mode=derivative_mode, fd_step_scale=fd_step_scale
    )
    return lhs - rhs


# ---------------------------------------------------------------------------
# Metric catalog

MILNOR_CAP_FACTOR = math.e  # warp switches to r*log(r/r0) at r = e*r0


def _flat_metric() -> WarpMetric:
    return WarpMetric(
        warp=lambda r, t: r,
        warp_dr=lambda r, t: 1.0,
        warp_drr=lambda r, t: 0.0,
        warp_dth=lambda r, t: 0.0,
        curvature=lambda r, t: 0.0,
        r_min=0.0,
        has_pole=True,
        warp_dthth=lambda r, t: 0.0,
        label="flat",
    )


def _cone_metric(c: float) -> WarpMetric:
    if not 0.0 < c <= 1.0:
        raise ConfigError(f"cone parameter c must be in (0, 1], got {c}")
    return WarpMetric(
        warp=lambda r, t: c * r,
        warp_dr=lambda r, t: c,
        warp_drr=lambda r, t: 0.0,
        warp_dth=lambda r, t: 0.0,
        curvature=lambda r, t: 0.0,
        r_min=0.0,
        has_pole=(c == 1.0),
        warp_dthth=lambda r, t: 0.0,
        label=f"cone c={c:g}",
    )


def _sinh_metric() -> WarpMetric:
    return WarpMetric(
        warp=lambda r, t: math.sinh(r),
        warp_dr=lambda r, t: math.cosh(r),
        warp_drr=lambda r, t: math.sinh(r),
        warp_dth=lambda r, t: 0.0,
        curvature=lambda r, t: -1.0,
        r_min=0.0,
        has_pole=True,
        warp_dthth=lambda r, t: 0.0,
        label="sinh",
    )


def _sin_metric() -> WarpMetric:
    return WarpMetric(
        warp=lambda r, t: math.sin(r),
        warp_dr=lambda r, t: math.cos(r),
        warp_drr=lambda r, t: -math.sin(r),
        warp_dth=lambda r, t: 0.0,
        curvature=lambda r, t: 1.0,
        r_min=0.0,
        r_max=math.pi,
        has_pole=True,
        warp_dthth=lambda r, t: 0.0,
        label="sin",
    )


def _milnor_metric(r0: float) -> WarpMetric:
    """Warp equal to r*log(r/r0) for r >= e*r0, capped below by the C^1
    continuation r^2/(e*r0) so the warp stays positive down to the origin."""
    if r0 <= 0.0:
        raise ConfigError(f"milnor parameter r0 must be positive, got {r0}")
    rc = MILNOR_CAP_FACTOR * r0

    def warp(r: float, t: float) -> float:
        return r * math.log(r / r0) if r >= rc else r * r / rc

    def dr(r: float, t: float) -> float:
        return math.log(r / r0) + 1.0 if r >= rc else 2.0 * r / rc

    def drr(r: float, t: float) -> float:
        return 1.0 / r if r >= rc else 2.0 / rc

    return WarpMetric(
        warp=warp,
        warp_dr=dr,
        warp_drr=drr,
        warp_dth=lambda r, t: 0.0,
        curvature=None,
        r_min=0.0,
        has_pole=False,
        warp_dthth=lambda r, t: 0.0,
        label=f"milnor r0={r0:g}",
    )


def _custom_metric(expr: str, r_min: float = 0.0, r_max: float = math.inf) -> WarpMetric:
    warp_fn = compile_expression(expr, variables=("r", "theta"))
    return WarpMetric.from_warp(
        lambda r, t: warp_fn(r, t),
        r_min=r_min,
        r_max=r_max,
        label=f"custom:{expr}",
    )


METRIC_CATALOG: dict[str, str] = {
    "flat": "f = r; the Euclidean plane in polar coordinates (K = 0)",
    "cone": "f = c*r with 0 < c <= 1; flat away from the vertex, separated harmonics r^(k/c)*cos(k*theta)",
    "sinh": "f = sinh(r); constant curvature K = -1 (hyperbolic plane)",
    "sin": "f = sin(r) on r < pi; constant curvature K = +1 (round sphere chart)",
    "milnor": "f = r*log(r/r0) for r >= e*r0, C^1-capped below; borderline-parabolic warp with K = -1/(r^2*log(r/r0))",
    "custom": "f parsed from an expression in r and theta; derivatives by centered differences",
}


def make_metric(name: str, **params: object) -> WarpMetric:
    """Construct a catalog metric by name: flat | cone | sinh | sin | milnor | custom."""
    if name == "flat":
        _require_params(name, params, set())
        return _flat_metric()
    if name == "cone":
        _require_params(name, params, {"c"})
        return _cone_metric(float(params["c"]))  # type: ignore[arg-type]
    if name == "sinh":
        _require_params(name, params, set())
        return _sinh_metric()
    if name == "sin":
        _require_params(name, params, set())
        return _sin_metric()
    if name == "milnor":
        _require_params(name, params, {"r0"})
        return _milnor_metric(float(params["r0"]))  # type: ignore[arg-type]
    if name == "custom":
        allowed = {"expr", "r_min", "r_max"}
        if not set(params) <= allowed or "expr" not in params:
            raise ConfigError(f"custom metric takes expr (and optional r_min, r_max), got {sorted(params)}")
        return _custom_metric(
            str(params["expr"]),
            float(params.get("r_min", 0.0)),  # type: ignore[arg-type]
            float(params.get("r_max", math.inf)),  # type: ignore[arg-type]
        )
    raise ConfigError(f"unknown metric {name!r}; catalog: {', '.join(METRIC_CATALOG)}")


def _require_params(name: str, params: dict, required: set) -> None:
    if set(params) != required:
        raise ConfigError(
            f"metric {name!r} takes parameters {sorted(required) or 'none'}, got {sorted(params)}"
        )


# ---------------------------------------------------------------------------
# Field catalog: closed-form samplers with full analytic derivatives


def _separated_field(k: float, c: float) -> FieldSampler:
    """u = r^(k/c) * cos(k*theta), harmonic on the cone with warp c*r."""
    p = k / c

    def at(r: float, t: float, dr_order: int, dt_order: int) -> float:
        radial = r ** (p - dr_order)
        for m in range(dr_order):
            radial *= p - m
        angular = math.cos(k * t + dt_order * math.pi / 2.0) * k**dt_order
        return radial * angular

    return FieldSampler(
        value=lambda r, t: at(r, t, 0, 0),
        d_r=lambda r, t: at(r, t, 1, 0),
        d_th=lambda r, t: at(r, t, 0, 1),
        d_rr=lambda r, t: at(r, t, 2, 0),
        d_rth=lambda r, t: at(r, t, 1, 1),
        d_thth=lambda r, t: at(r, t, 0, 2),
        d_rrr=lambda r, t: at(r, t, 3, 0),
        d_rrth=lambda r, t: at(r, t, 2, 1),
        d_rthth=lambda r, t: at(r, t, 1, 2),
        d_ththth=lambda r, t: at(r, t, 0, 3),
        label=f"r^{p:g}*cos({k:g}theta)",
    )


def _log_r_field() -> FieldSampler:
    zero = lambda r, t: 0.0
    return FieldSampler(
        value=lambda r, t: math.log(r),
        d_r=lambda r, t: 1.0 / r,
        d_th=zero,
        d_rr=lambda r, t: -1.0 / (r * r),
        d_rth=zero,
        d_thth=zero,
        d_rrr=lambda r, t: 2.0 / (r * r * r),
        d_rrth=zero,
        d_rthth=zero,
        d_ththth=zero,
        label="log r",
    )


def _cos_over_r_field() -> FieldSampler:
    return FieldSampler(
        value=lambda r, t: math.cos(t) / r,
        d_r=lambda r, t: -math.cos(t) / r**2,
        d_th=lambda r, t: -math.sin(t) / r,
        d_rr=lambda r, t: 2.0 * math.cos(t) / r**3,
        d_rth=lambda r, t: math.sin(t) / r**2,
        d_thth=lambda r, t: -math.cos(t) / r,
        d_rrr=lambda r, t: -6.0 * math.cos(t) / r**4,
        d_rrth=lambda r, t: -2.0 * math.sin(t) / r**3,
        d_rthth=lambda r, t: math.cos(t) / r**2,
        d_ththth=lambda r, t: math.sin(t) / r,
        label="cos(theta)/r",
    )


def _log_tanh_half_field() -> FieldSampler:
    """u = log tanh(r/2); radial harmonic of the sinh warp (u' = 1/sinh r)."""
    zero = lambda r, t: 0.0
    return FieldSampler(
        value=lambda r, t: math.log(math.tanh(r / 2.0)),
        d_r=lambda r, t: 1.0 / math.sinh(r),
        d_th=zero,
        d_rr=lambda r, t: -math.cosh(r) / math.sinh(r) ** 2,
        d_rth=zero,
        d_thth=zero,
        d_rrr=lambda r, t: (1.0 + math.cosh(r) ** 2) / math.sinh(r) ** 3,
        d_rrth=zero,
        d_rthth=zero,
        d_ththth=zero,
        label="log tanh(r/2)",
    )


def _affine_field(offset: float) -> FieldSampler:
    base = _separated_field(1.0, 1.0)
    return replace(
        base,
        value=lambda r, t: offset + r * math.cos(t),
        label=f"{offset:g} + r*cos(theta)",
    )


def _const_field(value: float) -> FieldSampler:
    zero = lambda r, t: 0.0
    return FieldSampler(
        value=lambda r, t: value,
        d_r=zero, d_th=zero, d_rr=zero, d_rth=zero, d_thth=zero,
        d_rrr=zero, d_rrth=zero, d_rthth=zero, d_ththth=zero,
        label=f"const {value:g}",
    )


FIELD_CATALOG: dict[str, str] = {
    "x": "r*cos(theta); linear harmonic of the flat plane",
    "x2-y2": "r^2*cos(2 theta); quadratic harmonic of the flat plane",
    "z3": "r^3*cos(3 theta); cubic harmonic of the flat plane",
    "log-r": "log r; radial harmonic of the flat plane",
    "cos-over-r": "cos(theta)/r; decaying flat harmonic",
    "separated": "r^(k/c)*cos(k theta); harmonic on the cone with warp c*r (params k, c)",
    "log-tanh-half": "log tanh(r/2); radial harmonic of the sinh warp",
    "affine": "A + r*cos(theta); positive on balls of radius < A (param A)",
    "const": "constant field (param value)",
}


def make_field(name: str, **params: float) -> FieldSampler:
    """Construct a catalog field sampler by name (see FIELD_CATALOG)."""
    if name == "x":
        return _separated_field(1.0, 1.0)
    if name == "x2-y2":
        return _separated_field(2.0, 1.0)
    if name == "z3":
        return _separated_field(3.0, 1.0)
    if name == "log-r":
        return _log_r_field()
    if name == "cos-over-r":
        return _cos_over_r_field()
    if name == "separated":
        if set(params) != {"k", "c"}:
            raise ConfigError(f"separated field takes k and c, got {sorted(params)}")
        return _separated_field(float(params["k"]), float(params["c"]))
    if name == "log-tanh-half":
        return _log_tanh_half_field()
    if name == "affine":
        if set(params) != {"A"}:
            raise ConfigError(f"affine field takes A, got {sorted(params)}")
        return _affine_field(float(params["A"]))
    if name == "const":
        if set(params) != {"value"}:
            raise ConfigError(f"const field takes value, got {sorted(params)}")
        return _const_field(float(params["value"]))
    raise ConfigError(f"unknown field {name!r}; catalog: {', '.join(FIELD_CATALOG)}")
