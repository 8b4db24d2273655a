"""Cooling limits beyond weak coupling, optimal operating points and scheme comparison."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from .model import (
    ReducedParams,
    Scheme,
    SchemeConfig,
    StabilityVerdict,
    g_max,
    stability,
)
from .moments import phonon_number
from .noise import optimal_eps


class ValidityWarning(UserWarning):
    """Two routes to the same optimum disagree by more than 10 %."""


@dataclass(frozen=True)
class CoolingReport:
    n_f_wk: float | None
    n_f_st: float | None
    n_f: float | None
    gamma_opt: float
    gamma_1: float | None
    gamma_opt_prime: float | None
    cooperativity: float
    scheme: SchemeConfig
    stable: StabilityVerdict


def analytic_limit(p: ReducedParams) -> CoolingReport:
    """Large-cooperativity steady-state occupancy at the optimal pump.

    Uses only ``delta, kappa, g, gamma, n_th`` of ``p``; the pump is taken at
    its optimal value regardless of ``p.eps``.  When the stability condition
    ``(2 delta + omega_m) omega_m + 4 g^2 < 0`` fails, the occupancies are
    ``None``.
    """
    d, k, g, wm = p.delta, p.kappa, p.g, p.omega_m
    gnth = p.gamma * p.n_th
    p_opt = p.replace(eps=optimal_eps(p))
    verdict = stability(p_opt)
    scheme = SchemeConfig(Scheme.IS)
    g_opt = 4 * g**2 * k / (4 * (d + wm) ** 2 + k**2)
    edge = (2 * d + wm) * wm + 4 * g**2
    if edge >= 0 or g == 0:
        return CoolingReport(None, None, None, g_opt, None, None,
                             p.cooperativity, scheme, verdict)
    n_wk = (4 * (d + wm) ** 2 + k**2) * gnth / (4 * g**2 * k)
    n_st = g**2 * ((2 * d + wm) / (wm * k) * gnth - 0.5) / edge + gnth / k
    g_1 = 2 * k * wm * edge / ((wm**2 + g**2) * (2 * d + wm) + 4 * g**2 * wm)
    g_prime = g_opt * g_1 / (g_opt + g_1)
    return CoolingReport(n_wk, n_st, n_wk + n_st, g_opt, g_1, g_prime,
                         p.cooperativity, scheme, verdict)


def quartic(x, ratio):
    return x**4 + 64 * ratio**2 * (x - 1) * (x * x - 6 * x + 4)


def quartic_residual(x: float, ratio: float) -> float:
    """Residual normalized by the summed magnitudes of the expanded monomials."""
    c = 64 * ratio**2
    ax = abs(x)
    scale = ax**4 + c * (ax + 1) * (ax * ax + 6 * ax + 4)
    return abs(quartic(x, ratio)) / scale


@dataclass(frozen=True)
class QuarticRoot:
    ratio: float
    x_star: float
    y_star: float
    residual: float
    x_small_ratio: float
    x_large_ratio: float


def solve_x_star(ratio: float) -> QuarticRoot:
    """Root in (0, 1) of ``x^4 + 64 r^2 (x-1)(x^2-6x+4)`` for ``r = n_th/Q_m``."""
    if not ratio > 0:
        raise ValueError(f"ratio must be > 0, got {ratio}")
    x = brentq(quartic, 0.0, 1.0, args=(ratio,), xtol=1e-300, rtol=4 * np.finfo(float).eps,
               maxiter=500)
    s = 4 * math.sqrt(ratio)
    return QuarticRoot(ratio=ratio, x_star=x, y_star=2 * math.sqrt(1 - x) / (2 - x),
                       residual=quartic_residual(x, ratio), x_small_ratio=s / (s + 1),
                       x_large_ratio=3 - math.sqrt(5))


@dataclass(frozen=True)
class OptimalPoint:
    x_star: float
    y_star: float
    delta_opt: float
    g_opt: float
    n_f_min: float | None
    delta_closed: float
    g_closed: float
    n_f_min_closed: float
    n_f_closed_eval: float | None
    consistent: bool


def optimal_point(kappa: float, n_th: float, q_m: float, omega_m: float = 1.0) -> OptimalPoint:
    """Optimal detuning and coupling for intracavity squeezing.

    Both the closed form (valid for ``q_m / n_th >> 1``) and the general
    quartic construction are returned; a :class:`ValidityWarning` is issued
    when their occupancies differ by more than 10 %.
    """
    r = n_th / q_m
    root = solve_x_star(r)
    x, y = root.x_star, root.y_star
    d_gen = -y * kappa / 2
    g_gen = math.sqrt(x * y * kappa * omega_m / 4)
    d_cl = -kappa / 2
    g_cl = math.sqrt(kappa * omega_m / (4 + math.sqrt(q_m / n_th)))
    base = ReducedParams.from_kappa(kappa, d_gen, g=g_gen, n_th=n_th, q_m=q_m,
                                    omega_m=omega_m)
    n_gen = analytic_limit(base).n_f
    n_cl_eval = analytic_limit(base.replace(delta=d_cl, g=g_cl)).n_f
    n_cl = 2 * r + math.sqrt(r)
    consistent = (n_gen is not None and n_cl_eval is not None
                  and abs(n_gen - n_cl_eval) <= 0.1 * min(n_gen, n_cl_eval))
    if not consistent:
        warnings.warn(f"closed-form and quartic optima disagree at n_th/Q_m={r:g}: "
                      f"{n_cl_eval} vs {n_gen}", ValidityWarning, stacklevel=2)
    return OptimalPoint(x, y, d_gen, g_gen, n_gen, d_cl, g_cl, n_cl, n_cl_eval, consistent)


@dataclass(frozen=True)
class SchemeMinimum:
    scheme: Scheme
    n_min: float
    x: float
    g: float
    delta: float
    squeeze_r: float = 0.0
    squeeze_phi: float = 0.0

    def params(self, kappa: float, n_th: float, q_m: float) -> tuple[ReducedParams, SchemeConfig]:
        """Operating point that realizes this minimum."""
        p = ReducedParams.from_kappa(kappa, self.delta, g=self.g, n_th=n_th, q_m=q_m)
        if self.scheme is Scheme.IS:
            return p.replace(eps=optimal_eps(p)), SchemeConfig(Scheme.IS)
        return p, SchemeConfig(self.scheme, self.squeeze_r, self.squeeze_phi)


def sd_optimal_squeezing(kappa: float, delta: float, omega_m: float = 1.0) -> tuple[float, float]:
    """Squeezing ``(R, phi)`` that nulls the heating sideband under squeezed drive.

    ``phi`` is the phase of ``<a_in a_in> = sinh(2R) e^{2 i phi} / 2``.  The
    magnitude is exact at ``delta = -sqrt(kappa^2/4 + omega_m^2)``.
    """
    r = math.asinh(kappa / (2 * omega_m)) / 2
    z = complex(kappa**2 / 4 + omega_m**2 - delta**2, -kappa * delta)
    return r, (math.pi + math.atan2(z.imag, z.real)) / 2


def scheme_min(scheme: Scheme | str, kappa: float, n_th: float, q_m: float,
               omega_m: float = 1.0) -> SchemeMinimum:
    """Closed-form minimal occupancy of each scheme, with its optimizing point."""
    scheme = Scheme(scheme)
    r = n_th / q_m
    k4 = kappa / (4 * omega_m)
    d_sd = -math.sqrt(kappa**2 / 4 + omega_m**2)
    if scheme is Scheme.SB:
        x = 1 / (4 + math.sqrt(1 + q_m / n_th)) if n_th > 0 else 0.0
        n = k4 * (1 + r + 2 * math.sqrt(r * r + r))
        return SchemeMinimum(scheme, n, x, math.sqrt(x * kappa * omega_m), d_sd)
    if scheme is Scheme.SD:
        c = kappa * n_th / (4 * omega_m * q_m)
        root = math.sqrt(c * (1 + 4 * c))
        x = c / (4 * c + root) if c > 0 else 0.0
        sq_r, sq_phi = sd_optimal_squeezing(kappa, d_sd, omega_m)
        return SchemeMinimum(scheme, 2 * c + root, x, math.sqrt(x * kappa * omega_m), d_sd,
                             sq_r, sq_phi)
    s = math.sqrt(r)
    x = s / (4 * s + 1)
    return SchemeMinimum(scheme, 2 * r + s, x, math.sqrt(x * kappa * omega_m), -kappa / 2)


def ground_state_boundary(scheme: Scheme | str, n_th: float, q_m: float) -> float:
    """``kappa / (4 omega_m)`` below which the closed-form minimum is < 1.

    Intracavity squeezing does not depend on ``kappa``: the result is ``inf``
    when its minimum is below one and 0 otherwise.
    """
    scheme = Scheme(scheme)
    r = n_th / q_m
    if scheme is Scheme.SB:
        return 1 / (1 + r + 2 * math.sqrt(r * r + r))
    if scheme is Scheme.SD:
        # 2c + sqrt(c(1+4c)) = 1  <=>  c = 1/5
        return q_m / (5 * n_th) if n_th > 0 else math.inf
    return math.inf if 2 * r + math.sqrt(r) < 1 else 0.0


# -- numerical optimum ---------------------------------------------------------

@dataclass(frozen=True)
class NumericOptimum:
    scheme: Scheme
    n_f: float
    delta: float
    g: float
    squeeze_r: float
    squeeze_phi: float
    pinned: str | None
    evaluations: int


def operating_point(scheme: Scheme, kappa: float, delta: float, g: float, n_th: float,
                    q_m: float, squeeze: tuple[float, float] | None = None,
                    omega_m: float = 1.0) -> tuple[ReducedParams, SchemeConfig]:
    """Scheme-specific operating point at ``(delta, g)``.

    IS uses the optimal pump; SD uses the heating-null squeezing unless
    ``squeeze`` overrides it.
    """
    p = ReducedParams.from_kappa(kappa, delta, g=g, n_th=n_th, q_m=q_m, omega_m=omega_m)
    if scheme is Scheme.IS:
        return p.replace(eps=optimal_eps(p)), SchemeConfig(Scheme.IS)
    if scheme is Scheme.SB:
        return p, SchemeConfig(Scheme.SB)
    sq = squeeze if squeeze is not None else sd_optimal_squeezing(kappa, delta, omega_m)
    return p, SchemeConfig(Scheme.SD, sq[0], sq[1])


def _coupling_bound(scheme: Scheme, kappa: float, delta: float, q_m: float,
                    omega_m: float = 1.0) -> float:
    if scheme is Scheme.IS:
        # At the optimal pump kappa^2/4 + delta^2 - 4|eps|^2 = -(2 delta + omega_m) omega_m;
        # the direct difference loses all digits when kappa >> |delta + omega_m|.
        optical = -(2 * delta + omega_m) * omega_m
        if optical <= 0:
            return 0.0
        gamma = omega_m / q_m
        return math.sqrt(optical * (omega_m**2 + gamma**2 / 4) / (4 * omega_m**2))
    p, _ = operating_point(scheme, kappa, delta, 0.0, 0.0, q_m, (0.0, 0.0), omega_m)
    return g_max(p)


def scheme_detuning(kappa: float, omega_m: float = 1.0) -> float:
    """Detuning ``-sqrt(kappa^2/4 + omega_m^2)`` at which the SB and SD minima hold."""
    return -math.sqrt(kappa**2 / 4 + omega_m**2)


def numeric_optimum(kappa: float, n_th: float, q_m: float, scheme: Scheme | str = Scheme.IS,
                    grid: int = 32, optimize_squeezing: bool = True,
                    omega_m: float = 1.0, delta: float | None = None) -> NumericOptimum:
    """Minimize the exact steady-state phonon number over the operating point.

    A ``grid x grid`` log-spaced scan over ``|delta| in (omega_m/2, 5 max(kappa, omega_m)]``
    and ``g`` up to the closed-form stability bound (clipped by a relative
    margin of 1e-3) seeds a Nelder-Mead refinement in transformed coordinates
    that keep every trial point inside the stable domain.  For SD the
    squeezing ``(R, phi)`` is refined as well when ``optimize_squeezing``.

    Passing ``delta`` fixes the detuning and optimizes ``g`` only (squeezing
    then stays at its heating-null value).

    ``pinned`` names the domain edge the optimum sits on, if any ("g_min",
    "g_max", "delta_min", "delta_max").  With ``n_th = 0`` the occupancy
    keeps falling towards ``g -> 0``, which shows up as "g_min".
    """
    scheme = Scheme(scheme)
    if delta is not None:
        return _optimum_fixed_delta(kappa, n_th, q_m, scheme, delta, grid, omega_m)
    # widened for kappa < omega_m so the domain never collapses
    lo, hi = 0.5 * omega_m * (1 + 1e-3), 5 * max(kappa, omega_m)
    count = [0]

    def bound(d):
        gm = _coupling_bound(scheme, kappa, d, q_m, omega_m)
        return (1 - 1e-3) * (gm if math.isfinite(gm) else 10 * kappa)

    def objective(d, g, sq=None):
        count[0] += 1
        p, s = operating_point(scheme, kappa, d, g, n_th, q_m, sq, omega_m)
        return phonon_number(p, s)

    best = (math.inf, 0.0, 0.0)
    for ad in np.geomspace(lo, hi, grid):
        gm = bound(-ad)
        if gm <= 0:
            continue
        for g in np.geomspace(gm * 1e-3, gm, grid):
            v = objective(-ad, g)
            if v < best[0]:
                best = (v, -ad, g)
    if not math.isfinite(best[0]):
        raise ArithmeticError("no stable operating point in the search domain")
    _, d0, g0 = best

    def unpack(z):
        ad = lo + (hi - lo) / (1 + math.exp(-z[0]))
        frac = 1e-3 + (1 - 1e-3) / (1 + math.exp(-z[1]))
        return -ad, frac * bound(-ad)

    def pack(d, g):
        u = (-d - lo) / (hi - lo)
        u = min(max(u, 1e-12), 1 - 1e-12)
        f = (g / bound(d) - 1e-3) / (1 - 1e-3)
        f = min(max(f, 1e-12), 1 - 1e-12)
        return [math.log(u / (1 - u)), math.log(f / (1 - f))]

    z0 = pack(d0, g0)
    sq0 = sd_optimal_squeezing(kappa, d0, omega_m)
    use_sq = scheme is Scheme.SD and optimize_squeezing
    if use_sq:
        z0 = z0 + [math.log(max(sq0[0], 1e-9)), sq0[1]]

    def f(z):
        d, g = unpack(z)
        sq = (math.exp(z[2]), z[3]) if use_sq else None
        return objective(d, g, sq)

    res = minimize(f, z0, method="Nelder-Mead",
                   options=dict(xatol=1e-7, fatol=1e-12, maxiter=4000, maxfev=8000))
    d, g = unpack(res.x)
    sq = (math.exp(res.x[2]), float(res.x[3])) if use_sq else None
    if res.fun > best[0]:
        d, g, sq = d0, g0, None
    n_f = min(res.fun, best[0])
    if sq is None:
        sq = sd_optimal_squeezing(kappa, d, omega_m) if scheme is Scheme.SD else (0.0, 0.0)
    return NumericOptimum(scheme, float(n_f), d, g, sq[0], sq[1],
                          _pinned(d, g, lo, hi, bound(d)), count[0])


def _optimum_fixed_delta(kappa, n_th, q_m, scheme, delta, grid, omega_m) -> NumericOptimum:
    gm = _coupling_bound(scheme, kappa, delta, q_m, omega_m)
    gm = (1 - 1e-3) * (gm if math.isfinite(gm) else 10 * kappa)
    if gm <= 0:
        raise ArithmeticError(f"no stable coupling at delta={delta}")
    count = [0]

    def f(lg):
        count[0] += 1
        p, s = operating_point(scheme, kappa, delta, 10.0**lg, n_th, q_m, None, omega_m)
        return phonon_number(p, s)

    lgs = np.linspace(math.log10(gm) - 3, math.log10(gm), 4 * grid)
    vals = [f(x) for x in lgs]
    i = int(np.argmin(vals))
    res = minimize_scalar(f, bounds=(lgs[max(i - 1, 0)], lgs[min(i + 1, len(lgs) - 1)]),
                          method="bounded", options=dict(xatol=1e-10))
    lg, n_f = (res.x, res.fun) if res.fun <= vals[i] else (lgs[i], vals[i])
    g = 10.0**lg
    sq = sd_optimal_squeezing(kappa, delta, omega_m) if scheme is Scheme.SD else (0.0, 0.0)
    pinned = "g_min" if g <= gm * 1e-3 * (1 + 1e-4) else "g_max" if g >= gm * (1 - 1e-4) else None
    return NumericOptimum(scheme, float(n_f), delta, g, sq[0], sq[1], pinned, count[0])


def _pinned(d, g, lo, hi, gb) -> str | None:
    rel = 1e-4
    if g <= gb * 1e-3 * (1 + rel):
        return "g_min"
    if g >= gb * (1 - rel):
        return "g_max"
    if -d <= lo * (1 + rel):
        return "delta_max"
    if -d >= hi * (1 - rel):
        return "delta_min"
    return None


def numeric_boundary(scheme: Scheme | str, n_th: float, q_m: float,
                     bracket: tuple[float, float] = (1e-2, 1e5), grid: int = 16,
                     scan: int = 15, scheme_delta: bool = False) -> float:
    """Largest ``kappa / (4 omega_m)`` at which the optimized occupancy is 1.

    The bracket is scanned on ``scan`` log-spaced points from the top; the
    first crossing into the ground-state region is refined with Brent's
    method.  Returns ``inf`` when the occupancy is below one at the top of
    the bracket and 0 when it is never below one.  ``scheme_delta`` pins
    the detuning to :func:`scheme_detuning` (the setting of the SB/SD closed
    forms) instead of optimizing it.
    """
    scheme = Scheme(scheme)

    def h(log_k4):
        kappa = 4 * 10.0**log_k4
        d = scheme_detuning(kappa) if scheme_delta else None
        return numeric_optimum(kappa, n_th, q_m, scheme, grid=grid, delta=d).n_f - 1.0

    pts = np.linspace(math.log10(bracket[1]), math.log10(bracket[0]), scan)
    prev_x, prev_h = pts[0], h(pts[0])
    if prev_h < 0:
        return math.inf
    for x in pts[1:]:
        hx = h(x)
        if hx < 0:
            return 10.0 ** brentq(h, x, prev_x, xtol=1e-4)
        prev_x, prev_h = x, hx
    return 0.0
