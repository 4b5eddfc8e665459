"""Radial comparison machinery for warped metrics.

Given a positive C^2 profile z on (a, infinity), the comparison harmonic

    h(r) = integral from r_start to r of dsigma / z(sigma)

solves h'' + (z'/z) h' = 0, i.e. it is the radial harmonic of the
rotationally symmetric metric dr^2 + z^2 dtheta^2.  The Sturm comparison
theorem transfers an ordering of the concavity ratios f''/f <= z''/z plus an
initial ordering of the logarithmic derivatives f'/f(a) <= z'/z(a) into the
pointwise ordering f'/f <= z'/z on the whole ray.  Its proof rests on the
Riccati form (w'/w)' = -(w'/w)^2 + w''/w, integrated here as well.

Sign orientation.  Under the curvature hypothesis K >= -z''/z (equivalently
f''/f <= z''/z, since K = -f''/f), the transferred ordering gives

    Lap_g h = h'' + (f'/f) h' <= h'' + (z'/z) h' = 0,

so h is superharmonic for g.  The certificate below checks exactly this
inequality chain and reports signed margins; callers assert the direction
they need.  (Equivalently: -h, and hence u - delta*h for subharmonic u, is
subharmonic, which is how the certificate is consumed by barrier arguments.)

The two- and three-circles barriers interpolate circle maxima linearly in h;
the classical log log interpolant is recovered with z = r log r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, DomainError, QuadratureError
from .expressions import compile_expression

RadialFn = Callable[[float], float]

# Inequality checks use margin >= -TIE_TOL*(1 + scale) to absorb roundoff at
# equality cases (e.g. comparing a profile against itself).
TIE_TOL = 1e-9

RICCATI_BLOWUP_CAP = 1e12


def _ineq_margin(lhs: float, rhs: float) -> tuple[float, float]:
    """Margin rhs - lhs of the inequality lhs <= rhs, plus its roundoff slack."""
    scale = max(abs(lhs), abs(rhs))
    return rhs - lhs, TIE_TOL * (1.0 + scale)


@dataclass(frozen=True)
class RadialProfile:
    """A positive radial comparison function z with derivative suppliers.

    a is the left endpoint of the domain (a, infinity).  blows_up_at_a
    declares that z'/z -> +infinity as r -> a+, which is what seeds the
    initial ordering of logarithmic derivatives near a.
    """

    z: RadialFn
    z_dr: RadialFn
    z_drr: RadialFn
    a: float = 0.0
    label: str = "profile"
    blows_up_at_a: bool = False

    def __post_init__(self) -> None:
        if not math.isfinite(self.a) or self.a < 0.0:
            raise DomainError(f"profile left endpoint must be finite and >= 0, got {self.a}")

    @classmethod
    def from_z(
        cls,
        z: RadialFn,
        *,
        a: float = 0.0,
        label: str = "profile(fd)",
        step_scale: float = 1e-4,
        blows_up_at_a: bool = False,
    ) -> "RadialProfile":
        """Finite-difference fallback: z' and z'' by centered differences with
        step step_scale*max(1,r), clamped to stay right of a."""

        def step(r: float) -> float:
            h = step_scale * max(1.0, r)
            return max(min(h, 0.45 * (r - a)), 1e-12) if r > a else h

        def dz(r: float) -> float:
            h = step(r)
            return (z(r + h) - z(r - h)) / (2.0 * h)

        def dzz(r: float) -> float:
            h = step(r)
            return (z(r + h) - 2.0 * z(r) + z(r - h)) / (h * h)

        return cls(z=z, z_dr=dz, z_drr=dzz, a=a, label=label, blows_up_at_a=blows_up_at_a)

    def value_checked(self, r: float) -> float:
        if r <= self.a:
            raise DomainError(f"profile {self.label!r} is undefined at r={r} <= a={self.a}")
        v = self.z(r)
        if not (math.isfinite(v) and v > 0.0):
            raise QuadratureError(f"profile {self.label!r} is {v} at r={r}, must be positive")
        return v

    def log_deriv(self, r: float) -> float:
        """z'(r)/z(r)."""
        return self.z_dr(r) / self.value_checked(r)

    def concavity_ratio(self, r: float) -> float:
        """z''(r)/z(r)."""
        return self.z_drr(r) / self.value_checked(r)


# ---------------------------------------------------------------------------
# Quadrature for the comparison harmonic

_SIMPSON_MAX_DEPTH = 60


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive(
    f: RadialFn,
    a: float,
    b: float,
    fa: float,
    fm: float,
    fb: float,
    whole: float,
    tol: float,
    depth: int,
) -> float:
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth >= _SIMPSON_MAX_DEPTH:
        raise QuadratureError(
            f"adaptive Simpson did not converge on [{a}, {b}] "
            f"(depth {depth}, local error estimate {abs(delta) / 15.0:.3e})"
        )
    return _adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) + _adaptive(
        f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1
    )


def _integrate(f: RadialFn, a: float, b: float, tol: float) -> float:
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = _simpson(fa, fm, fb, b - a)
    return _adaptive(f, a, b, fa, fm, fb, whole, tol, 0)


def comparison_harmonic(profile: RadialProfile, r_start: float, r: float, tol: float = 1e-10) -> float:
    """h(r) = integral from r_start to r of dsigma/z(sigma), absolute error <= tol.

    Adaptive Simpson with an absolute-error target.  The integration never
    crosses the profile's left endpoint a; start strictly inside (r_start > a)
    and integrate outward.
    """
    if tol <= 0.0:
        raise DomainError(f"quadrature tolerance must be positive, got {tol}")
    if not profile.a < r_start <= r:
        raise DomainError(
            f"need a < r_start <= r, got a={profile.a}, r_start={r_start}, r={r}"
        )
    return _integrate(lambda s: 1.0 / profile.value_checked(s), r_start, r, tol)


# ---------------------------------------------------------------------------
# Riccati integration


@dataclass(frozen=True)
class RiccatiSolution:
    """Samples of v solving v' = -v^2 + q(r).  If the trajectory exceeded the
    blow-up cap the arrays stop at the last finite sample and blew_up is set;
    blow-up is meaningful (conjugate-point behavior), never clamped."""

    r: np.ndarray
    v: np.ndarray
    blew_up: bool

    def __post_init__(self) -> None:
        self.r.setflags(write=False)
        self.v.setflags(write=False)

    def at_end(self) -> tuple[float, float]:
        return float(self.r[-1]), float(self.v[-1])


def riccati_integrate(
    q: RadialFn, w0: float, interval: tuple[float, float], step: float
) -> RiccatiSolution:
    """Integrate v' = -v^2 + q(r), v(a) = w0, with the classical fourth-order
    one-step method at fixed step; the final step is shortened to land on b."""
    a, b = interval
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise DomainError(f"need a finite interval a < b, got [{a}, {b}]")
    if step <= 0.0:
        raise DomainError(f"step must be positive, got {step}")
    if not math.isfinite(w0) or abs(w0) >= RICCATI_BLOWUP_CAP:
        raise DomainError(f"initial value {w0} is already beyond the blow-up cap")

    def rhs(r: float, v: float) -> float:
        return -v * v + q(r)

    rs = [a]
    vs = [w0]
    r, v = a, w0
    blew_up = False
    while r < b:
        h = min(step, b - r)
        k1 = rhs(r, v)
        k2 = rhs(r + 0.5 * h, v + 0.5 * h * k1)
        k3 = rhs(r + 0.5 * h, v + 0.5 * h * k2)
        k4 = rhs(r + h, v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        r = r + h
        if not math.isfinite(v) or abs(v) >= RICCATI_BLOWUP_CAP:
            blew_up = True
            break
        rs.append(r)
        vs.append(v)
    return RiccatiSolution(r=np.asarray(rs), v=np.asarray(vs), blew_up=blew_up)


# ---------------------------------------------------------------------------
# Sturm comparison


@dataclass(frozen=True)
class ConclusionSample:
    r: float
    metric_ratio: float  # f'/f at r
    profile_ratio: float  # z'/z at r
    margin: float  # profile_ratio - metric_ratio

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.r, self.metric_ratio, self.profile_ratio, self.margin)


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of one comparison run: hypothesis checks plus conclusion samples.

    verdict is "holds", "hypothesis_violated", or "conclusion_violated".  A
    hypothesis violation asserts nothing about the conclusion; the samples
    are still recorded for inspection.  verdict == "holds" implies every
    conclusion margin >= -tolerance.
    """

    hypothesis_curvature_ok: bool
    curvature_margin: float  # min over samples of z''/z - f''/f
    hypothesis_initial_ok: bool
    initial_margin: float  # z'/z - f'/f at the initial radius
    conclusion_samples: tuple[ConclusionSample, ...]
    verdict: str

    @property
    def conclusion_margin(self) -> float:
        return min(s.margin for s in self.conclusion_samples)


def _comparison_grid(a: float, b: float, n_samples: int) -> np.ndarray:
    if n_samples < 2:
        raise DomainError(f"need n_samples >= 2, got {n_samples}")
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    return np.linspace(a, b, n_samples)


def sturm_verify(
    ratio_fn: RadialFn,
    concavity_fn: RadialFn,
    profile: RadialProfile,
    interval: tuple[float, float],
    n_samples: int = 64,
    tol: float = TIE_TOL,
) -> ComparisonReport:
    """Check the Sturm comparison hypotheses and conclusion on a sample grid.

    ratio_fn and concavity_fn are the metric's f'/f and f''/f restricted to a
    ray.  Hypotheses: f''/f <= z''/z on the grid and f'/f <= z'/z at the left
    endpoint.  Conclusion: f'/f <= z'/z at every grid point.  This verifies;
    it does not derive: a failed hypothesis yields "hypothesis_violated"
    without asserting anything about the conclusion.
    """
    a, b = interval
    grid = _comparison_grid(a, b, n_samples)
    if grid[0] <= profile.a:
        raise DomainError(
            f"interval starts at {grid[0]} but profile {profile.label!r} needs r > {profile.a}"
        )

    curv_margin = math.inf
    curv_ok = True
    for r in grid:
        margin, slack = _ineq_margin(concavity_fn(float(r)), profile.concavity_ratio(float(r)))
        curv_margin = min(curv_margin, margin)
        if margin < -max(slack, tol):
            curv_ok = False

    init_margin, init_slack = _ineq_margin(ratio_fn(float(grid[0])), profile.log_deriv(float(grid[0])))
    init_ok = init_margin >= -max(init_slack, tol)

    samples = []
    concl_ok = True
    for r in grid:
        fr = ratio_fn(float(r))
        zr = profile.log_deriv(float(r))
        margin, slack = _ineq_margin(fr, zr)
        if margin < -max(slack, tol):
            concl_ok = False
        samples.append(ConclusionSample(float(r), fr, zr, margin))

    if not (curv_ok and init_ok):
        verdict = "hypothesis_violated"
    elif not concl_ok:
        verdict = "conclusion_violated"
    else:
        verdict = "holds"
    return ComparisonReport(
        hypothesis_curvature_ok=curv_ok,
        curvature_margin=curv_margin,
        hypothesis_initial_ok=init_ok,
        initial_margin=init_margin,
        conclusion_samples=tuple(samples),
        verdict=verdict,
    )


def sturm_verify_curvature(
    metric,
    profile: RadialProfile,
    interval: tuple[float, float],
    theta: float = 0.0,
    n_samples: int = 64,
    tol: float = TIE_TOL,
) -> ComparisonReport:
    """Curvature-oriented wrapper: checks K >= -z''/z along the ray theta.

    Since K = -f''/f, the hypothesis K >= -z''/z is exactly f''/f <= z''/z,
    so this delegates to sturm_verify with the metric's ray ratios.  Both
    entry points exist to keep the sign conventions explicit.
    """
    from . import geometry

    def ratio(r: float) -> float:
        return geometry.mean_curvature_ratio(metric, geometry.Point(r, theta))

    def concavity(r: float) -> float:
        return -geometry.gaussian_curvature(metric, geometry.Point(r, theta))

    return sturm_verify(ratio, concavity, profile, interval, n_samples, tol)


def subharmonic_h_certificate(
    metric,
    profile: RadialProfile,
    interval: tuple[float, float],
    rays: int = 8,
    n_samples: int = 64,
    *,
    initial_radius: Optional[float] = None,
    tol: float = TIE_TOL,
) -> ComparisonReport:
    """Certify the barrier inequality chain for h(r) = integral of 1/z.

    For each of `rays` equispaced angles, checks the curvature hypothesis
    K(r, theta) >= -z''/z(r) on the sample grid and the initial ordering
    f'/f <= z'/z at initial_radius (default: the interval's left endpoint,
    which should sit slightly above the profile's blow-up point a; the
    initial radius is an explicit parameter precisely because "slightly
    above a" is a choice).  The conclusion samples record f'/f vs z'/z at
    each grid point; their margin times h' = 1/z > 0 is exactly -Lap_g h,
    so margin >= 0 certifies h superharmonic (see the module docstring on
    sign orientation).  The aggregated verdict is the worst ray.
    """
    from . import geometry

    if rays < 1:
        raise DomainError(f"need at least one ray, got {rays}")
    if initial_radius is None:
        initial_radius = interval[0]
    if not profile.a < initial_radius:
        raise DomainError(
            f"initial comparison radius {initial_radius} must lie right of a={profile.a}"
        )
    grid = _comparison_grid(interval[0], interval[1], n_samples)
    if grid[0] <= profile.a:
        raise DomainError(
            f"interval starts at {grid[0]} but profile {profile.label!r} needs r > {profile.a}"
        )

    worst: Optional[ComparisonReport] = None
    rank = {"holds": 0, "conclusion_violated": 1, "hypothesis_violated": 2}
    for k in range(rays):
        theta = 2.0 * math.pi * k / rays

        def ratio(r: float, _t: float = theta) -> float:
            return geometry.mean_curvature_ratio(metric, geometry.Point(r, _t))

        curv_ok = True
        curv_margin = math.inf
        for r in grid:
            point = geometry.Point(float(r), theta)
            curv = geometry.gaussian_curvature(metric, point)
            # K >= -z''/z  <=>  margin = K - (-z''/z) >= 0
            margin, slack = _ineq_margin(-profile.concavity_ratio(float(r)), curv)
            curv_margin = min(curv_margin, margin)
            if margin < -max(slack, tol):
                curv_ok = False

        init_margin, init_slack = _ineq_margin(
            ratio(initial_radius), profile.log_deriv(initial_radius)
        )
        init_ok = init_margin >= -max(init_slack, tol)

        samples = []
        concl_ok = True
        for r in grid:
            fr = ratio(float(r))
            zr = profile.log_deriv(float(r))
            margin, slack = _ineq_margin(fr, zr)
            if margin < -max(slack, tol):
                concl_ok = False
            samples.append(ConclusionSample(float(r), fr, zr, margin))

        if not (curv_ok and init_ok):
            verdict = "hypothesis_violated"
        elif not concl_ok:
            verdict = "conclusion_violated"
        else:
            verdict = "holds"
        report = ComparisonReport(
            hypothesis_curvature_ok=curv_ok,
            curvature_margin=curv_margin,
            hypothesis_initial_ok=init_ok,
            initial_margin=init_margin,
            conclusion_samples=tuple(samples),
            verdict=verdict,
        )
        if worst is None or _report_worse(report, worst, rank):
            worst = report
    assert worst is not None
    return worst


def _report_worse(candidate: ComparisonReport, incumbent: ComparisonReport, rank: dict) -> bool:
    if rank[candidate.verdict] != rank[incumbent.verdict]:
        return rank[candidate.verdict] > rank[incumbent.verdict]
    return candidate.conclusion_margin < incumbent.conclusion_margin


# ---------------------------------------------------------------------------
# Barriers


def three_circles_barrier(M1: float, M2: float, r1: float, r2: float, r: float) -> float:
    """Hadamard-style interpolant of circle maxima, linear in log log r.

    phi(r) = [M1 log(log r2/log r) + M2 log(log r/log r1)] / log(log r2/log r1)
    for 1 < r1 <= r <= r2 and M2 >= M1.  Superharmonic for the flat metric;
    phi(r1) = M1 and phi(r2) = M2.
    """
    if not 1.0 < r1 < r2:
        raise DomainError(f"need 1 < r1 < r2, got r1={r1}, r2={r2}")
    if not r1 <= r <= r2:
        raise DomainError(f"need r1 <= r <= r2, got r={r} outside [{r1}, {r2}]")
    if M2 < M1:
        raise DomainError(f"need M2 >= M1, got M1={M1}, M2={M2}")
    denom = math.log(math.log(r2) / math.log(r1))
    return (
        M1 * math.log(math.log(r2) / math.log(r)) + M2 * math.log(math.log(r) / math.log(r1))
    ) / denom


def generalized_barrier(
    profile: RadialProfile,
    M1: float,
    M2: float,
    r1: float,
    r2: float,
    r: float,
    tol: float = 1e-10,
) -> float:
    """Interpolate circle maxima linearly in the comparison harmonic h.

    Returns M1 + (M2 - M1) * (h(r) - h(r1)) / (h(r2) - h(r1)); with the
    profile z = r log r this reproduces three_circles_barrier up to
    quadrature tolerance, and z = r gives the classical log-linear
    interpolation.
    """
    if not profile.a < r1 < r2:
        raise DomainError(f"need a < r1 < r2, got a={profile.a}, r1={r1}, r2={r2}")
    if not r1 <= r <= r2:
        raise DomainError(f"need r1 <= r <= r2, got r={r} outside [{r1}, {r2}]")
    if M2 < M1:
        raise DomainError(f"need M2 >= M1, got M1={M1}, M2={M2}")
    h_r = comparison_harmonic(profile, r1, r, tol)
    h_r2 = h_r + comparison_harmonic(profile, r, r2, tol)
    return M1 + (M2 - M1) * (h_r / h_r2)


# ---------------------------------------------------------------------------
# Profile catalog

PROFILE_CATALOG: dict[str, str] = {
    "linear": "z = r; comparison harmonic h = log r (classical plane)",
    "milnor": "z = r*log(r/r0); h = log log growth, the borderline-parabolic comparison profile (params r0)",
    "sinh": "z = sinh r; h = log tanh(r/2), bounded at infinity (non-parabolic)",
    "custom": "z parsed from an expression in r; derivatives by centered differences (params expr, a)",
}


def make_profile(name: str, **params: object) -> RadialProfile:
    """Construct a catalog profile by name: linear | milnor | sinh | custom."""
    if name == "linear":
        if params:
            raise ConfigError(f"linear profile takes no parameters, got {sorted(params)}")
        return RadialProfile(
            z=lambda r: r,
            z_dr=lambda r: 1.0,
            z_drr=lambda r: 0.0,
            a=0.0,
            label="linear",
            blows_up_at_a=True,
        )
    if name == "milnor":
        if set(params) != {"r0"}:
            raise ConfigError(f"milnor profile takes r0, got {sorted(params)}")
        r0 = float(params["r0"])  # type: ignore[arg-type]
        if r0 <= 0.0:
            raise ConfigError(f"milnor r0 must be positive, got {r0}")
        return RadialProfile(
            z=lambda r: r * math.log(r / r0),
            z_dr=lambda r: math.log(r / r0) + 1.0,
            z_drr=lambda r: 1.0 / r,
            a=r0,
            label=f"milnor r0={r0:g}",
            blows_up_at_a=True,
        )
    if name == "sinh":
        if params:
            raise ConfigError(f"sinh profile takes no parameters, got {sorted(params)}")
        return RadialProfile(
            z=math.sinh,
            z_dr=math.cosh,
            z_drr=math.sinh,
            a=0.0,
            label="sinh",
            blows_up_at_a=True,
        )
    if name == "custom":
        allowed = {"expr", "a"}
        if not set(params) <= allowed or "expr" not in params:
            raise ConfigError(f"custom profile takes expr (and optional a), got {sorted(params)}")
        expr_fn = compile_expression(str(params["expr"]), variables=("r",))
        return RadialProfile.from_z(
            lambda r: expr_fn(r),
            a=float(params.get("a", 0.0)),  # type: ignore[arg-type]
            label=f"custom:{params['expr']}",
        )
    raise ConfigError(f"unknown profile {name!r}; catalog: {', '.join(PROFILE_CATALOG)}")
