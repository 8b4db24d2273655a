"""Data series behind each published figure, emitted as tables (no plotting)."""

from __future__ import annotations

import math

import numpy as np

from .limits import (
    analytic_limit,
    ground_state_boundary,
    numeric_boundary,
    numeric_optimum,
    operating_point,
    optimal_point,
    scheme_detuning,
    scheme_min,
)
from .model import Scheme, g_max
from .moments import phonon_number
from .noise import general_force_spectrum, net_cooling_rate, spectrum_series
from .tables import Table

FIGURES = ("fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b")

# Captions: fig2 at kappa/(4 omega_m) = 1 with delta = -sqrt(kappa^2/4 + omega_m^2);
# fig3 at kappa/(4 omega_m) = 100, n_th = 1e3, Q_m = 1e5; fig4 at Q_m = 1e5.
BINDINGS = {
    "fig2a": dict(kappa=4.0, g=1.0),
    "fig2b": dict(g=1.0, k4_min=0.1, k4_max=1000.0, points=41),
    "fig3": dict(kappa=400.0, n_th=1e3, q_m=1e5, delta_min=-600.0, delta_max=-1.0,
                 g_min=0.1, g_max=18.0, points=41),
    "fig3d": dict(kappa=400.0, n_th=1e3, q_m=1e5, points=200),
    "fig4a": dict(q_m=1e5, nth_min=1.0, nth_max=1e6, points=13, numeric=1, opt_grid=12),
    "fig4b": dict(n_th=1e3, q_m=1e5, k4_min=1.0, k4_max=1000.0, points=13, numeric=1,
                  opt_grid=16),
}

_S = "normalized by 4G^2/kappa"


def _sd_point(kappa, delta, g):
    return operating_point(Scheme.SD, kappa, delta, g, 0.0, 1e5)


def fig2a(kappa=4.0, g=1.0, omega=None) -> dict[str, Table]:
    delta = scheme_detuning(kappa)
    norm = 4 * g**2 / kappa
    p_sb, _ = operating_point(Scheme.SB, kappa, delta, g, 0.0, 1e5)
    p_sd, s_sd = _sd_point(kappa, delta, g)
    p_is, _ = operating_point(Scheme.IS, kappa, delta, g, 0.0, 1e5)
    if omega is None:
        # include the two sidebands exactly
        omega = np.union1d(spectrum_series(p_sb).omega, [-p_sb.omega_m, p_sb.omega_m])
    sb = spectrum_series(p_sb, omega=omega)
    sd = general_force_spectrum(sb.omega, p_sd, s_sd)
    is_ = spectrum_series(p_is, omega=sb.omega)
    t = Table(["omega", "sb", "sd", "is"], semantics={
        "omega": ("frequency; default grid plus the points +-omega_m", "omega_m"),
        "sb": (f"force spectrum, sideband cooling, {_S}", "1"),
        "sd": (f"force spectrum, squeezed driving at the heating-null squeezing, {_S}", "1"),
        "is": (f"force spectrum, intracavity squeezing at the optimal pump, {_S}", "1"),
    })
    for w, a, b, c in zip(sb.omega, sb.values, sd, is_.values):
        t.add(float(w), float(a) / norm, float(b) / norm, float(c) / norm)
    return {"fig2a": t}


def fig2b(g=1.0, k4_min=0.1, k4_max=1000.0, points=41) -> dict[str, Table]:
    t = Table(["k4", "sb", "sd", "is"], semantics={
        "k4": ("kappa/(4 omega_m)", "1"),
        "sb": (f"net cooling rate, sideband cooling, {_S}", "1"),
        "sd": (f"net cooling rate, squeezed driving, {_S}", "1"),
        "is": (f"net cooling rate, intracavity squeezing, {_S}", "1"),
    })
    for k4 in np.geomspace(k4_min, k4_max, int(points)):
        kappa = 4 * k4
        delta = scheme_detuning(kappa)
        norm = 4 * g**2 / kappa
        p_sb, _ = operating_point(Scheme.SB, kappa, delta, g, 0.0, 1e5)
        p_sd, s_sd = _sd_point(kappa, delta, g)
        p_is, _ = operating_point(Scheme.IS, kappa, delta, g, 0.0, 1e5)
        sd = general_force_spectrum(1.0, p_sd, s_sd) - general_force_spectrum(-1.0, p_sd, s_sd)
        t.add(float(k4), net_cooling_rate(p_sb) / norm, sd / norm, net_cooling_rate(p_is) / norm)
    return {"fig2b": t}


def _fig3_grid(kappa, n_th, q_m, delta_min, delta_max, g_min, g_max_, points, which):
    cols = ["delta", "g", which, "stable", "g_boundary"]
    numeric = which == "n_f"
    if numeric:
        cols.append("n_f_numeric")
    t = Table(cols, semantics={
        "delta": ("detuning", "omega_m"),
        "g": ("linearized coupling G", "omega_m"),
        which: ({"n_f_wk": "weak-coupling part of the analytic occupancy",
                 "n_f_st": "strong-coupling part of the analytic occupancy",
                 "n_f": "analytic final occupancy"}[which], "phonons"),
        "stable": ("1 inside the stable region (analytic edge)", "bool"),
        "g_boundary": ("critical coupling at this detuning", "omega_m"),
        "n_f_numeric": ("exact steady-state occupancy from the moment equations", "phonons"),
    })
    for d in np.linspace(delta_min, delta_max, int(points)):
        gb = math.sqrt(max(-(2 * d + 1), 0.0)) / 2
        for g in np.linspace(g_min, g_max_, int(points)):
            p, s = operating_point(Scheme.IS, kappa, float(d), float(g), n_th, q_m)
            rep = analytic_limit(p)
            val = getattr(rep, which)
            row = [float(d), float(g), val, val is not None, gb]
            if numeric:
                n_num = phonon_number(p, s)
                row.append(n_num if math.isfinite(n_num) else None)
            t.add(*row)
    return t


def fig3(panel: str, kappa=400.0, n_th=1e3, q_m=1e5, delta_min=-600.0, delta_max=-1.0,
         g_min=0.1, g_max=18.0, points=41) -> dict[str, Table]:
    which = {"fig3a": "n_f_wk", "fig3b": "n_f_st", "fig3c": "n_f"}[panel]
    return {panel: _fig3_grid(kappa, n_th, q_m, delta_min, delta_max, g_min, g_max, points,
                              which)}


def fig3d(kappa=400.0, n_th=1e3, q_m=1e5, points=200) -> dict[str, Table]:
    delta = -kappa / 2
    p0, _ = operating_point(Scheme.IS, kappa, delta, 0.0, n_th, q_m)
    top = 0.999 * g_max(p0)
    t = Table(["g", "n_f_wk", "n_f_st", "n_f", "n_f_numeric"], semantics={
        "g": ("linearized coupling G at delta = -kappa/2", "omega_m"),
        "n_f_wk": ("weak-coupling part of the analytic occupancy", "phonons"),
        "n_f_st": ("strong-coupling part of the analytic occupancy", "phonons"),
        "n_f": ("analytic final occupancy", "phonons"),
        "n_f_numeric": ("exact steady-state occupancy from the moment equations", "phonons"),
    })
    for g in np.geomspace(0.1, top, int(points)):
        p, s = operating_point(Scheme.IS, kappa, delta, float(g), n_th, q_m)
        rep = analytic_limit(p)
        t.add(float(g), rep.n_f_wk, rep.n_f_st, rep.n_f, phonon_number(p, s))
    return {"fig3d": t}


def fig3_optimum(kappa=400.0, n_th=1e3, q_m=1e5) -> dict[str, float]:
    op = optimal_point(kappa, n_th, q_m)
    return {"delta_opt": op.delta_closed, "g_opt": op.g_closed}


def fig4a(q_m=1e5, nth_min=1.0, nth_max=1e6, points=13, numeric=1, opt_grid=12
          ) -> dict[str, Table]:
    cols = ["n_th", "sb_k4", "sd_k4", "is_k4"]
    if numeric:
        cols += ["sb_k4_numeric", "sd_k4_numeric", "is_k4_numeric"]
    sem = {
        "n_th": ("bath occupancy", "phonons"),
        "sb_k4": ("closed-form n_f=1 boundary, sideband cooling", "kappa/(4 omega_m)"),
        "sd_k4": ("closed-form n_f=1 boundary, squeezed driving", "kappa/(4 omega_m)"),
        "is_k4": ("closed-form boundary, intracavity squeezing: inf if ground state "
                  "for every kappa, 0 if for none", "kappa/(4 omega_m)"),
        "sb_k4_numeric": ("numeric boundary, sideband cooling, delta at the scheme "
                          "detuning, G optimized", "kappa/(4 omega_m)"),
        "sd_k4_numeric": ("numeric boundary, squeezed driving, delta at the scheme "
                          "detuning, G optimized", "kappa/(4 omega_m)"),
        "is_k4_numeric": ("numeric boundary, intracavity squeezing, delta and G "
                          "optimized", "kappa/(4 omega_m)"),
    }
    t = Table(cols, semantics=sem)
    for n_th in np.geomspace(nth_min, nth_max, int(points)):
        row = [float(n_th)] + [ground_state_boundary(s, n_th, q_m) for s in Scheme]
        if numeric:
            row += [numeric_boundary(Scheme.SB, n_th, q_m, grid=opt_grid, scheme_delta=True),
                    numeric_boundary(Scheme.SD, n_th, q_m, grid=opt_grid, scheme_delta=True),
                    numeric_boundary(Scheme.IS, n_th, q_m, grid=opt_grid)]
        t.add(*row)
    return {"fig4a": t}


def limits_table(n_th, q_m, kappas, numeric=0, opt_grid=16,
                 schemes=(Scheme.SB, Scheme.SD, Scheme.IS)) -> Table:
    cols = ["kappa", "k4"]
    sem = {"kappa": ("cavity linewidth", "omega_m"), "k4": ("kappa/(4 omega_m)", "1")}
    for s in schemes:
        name = s.value.lower()
        cols.append(name)
        sem[name] = (f"closed-form minimal occupancy, {s.value}", "phonons")
    if numeric:
        for s in schemes:
            name = f"{s.value.lower()}_numeric"
            cols.append(name)
            how = ("delta and G optimized" if s is Scheme.IS
                   else "delta at the scheme detuning, G optimized")
            sem[name] = (f"numeric minimal occupancy, {s.value}, {how}", "phonons")
        if Scheme.SD in schemes:
            cols.append("sd_numeric_free")
            sem["sd_numeric_free"] = ("numeric minimal occupancy, SD, delta, G and "
                                      "squeezing all optimized", "phonons")
    t = Table(cols, semantics=sem)
    for kappa in kappas:
        row = [float(kappa), float(kappa) / 4]
        row += [scheme_min(s, kappa, n_th, q_m).n_min for s in schemes]
        if numeric:
            for s in schemes:
                d = None if s is Scheme.IS else scheme_detuning(kappa)
                row.append(numeric_optimum(kappa, n_th, q_m, s, grid=opt_grid, delta=d).n_f)
            if Scheme.SD in schemes:
                row.append(numeric_optimum(kappa, n_th, q_m, Scheme.SD, grid=opt_grid).n_f)
        t.add(*row)
    return t


def fig4b(n_th=1e3, q_m=1e5, k4_min=1.0, k4_max=1000.0, points=13, numeric=1, opt_grid=16
          ) -> dict[str, Table]:
    kappas = 4 * np.geomspace(k4_min, k4_max, int(points))
    return {"fig4b": limits_table(n_th, q_m, kappas, numeric, opt_grid)}


def build(fig_id: str, **overrides) -> tuple[dict[str, Table], dict]:
    """Tables for one figure id plus the resolved bindings."""
    if fig_id not in FIGURES:
        raise KeyError(fig_id)
    key = "fig3" if fig_id in ("fig3a", "fig3b", "fig3c") else fig_id
    bindings = dict(BINDINGS[key])
    unknown = set(overrides) - set(bindings)
    if unknown:
        raise KeyError(sorted(unknown)[0])
    bindings.update(overrides)
    if fig_id == "fig2a":
        tables = fig2a(**bindings)
        bindings["delta"] = scheme_detuning(bindings["kappa"])
    elif fig_id == "fig2b":
        tables = fig2b(**bindings)
    elif key == "fig3":
        tables = fig3(fig_id, **bindings)
        if fig_id == "fig3c":
            bindings.update(fig3_optimum(bindings["kappa"], bindings["n_th"], bindings["q_m"]))
    elif fig_id == "fig3d":
        tables = fig3d(**bindings)
    elif fig_id == "fig4a":
        tables = fig4a(**bindings)
    else:
        tables = fig4b(**bindings)
    return tables, bindings
