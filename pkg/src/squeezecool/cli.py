"""Command-line front end.

    squeezecool <command> [--config PATH] [--key value]... [--out PATH]
                [--format csv|json] [--jobs N]

Commands: spectrum, cool, limits, regions, sweep, reduce3, squeeze, figure.
Keys are matched case-insensitively with ``-`` and ``_`` ignored, so
``--n-th``, ``--nth`` and ``--n_th`` are the same key.  Exit status: 0 ok,
2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import itertools
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .figures import FIGURES, build, limits_table
from .limits import analytic_limit, ground_state_boundary, numeric_boundary, sd_optimal_squeezing
from .model import ReducedParams, Scheme, SchemeConfig, UnstableSystemError, stability
from .moments import (
    IntegrationError,
    PhysicalityError,
    default_initial_state,
    evolve,
    steady_state,
)
from .noise import default_grid, general_force_spectrum, optimal_eps, weak_coupling_report
from .output import intracavity_quadrature_spectrum, output_quadrature_spectrum
from .tables import Table, manifest, render
from .threemode import ThreeModeParams, classical_steady_state, full_phonon_number, reduce

OUTDIR_ENV = "SQUEEZECOOL_OUTDIR"
COMMANDS = ("spectrum", "cool", "limits", "regions", "sweep", "reduce3", "squeeze", "figure")
GLOBAL_KEYS = ("config", "out", "format", "jobs", "grid")

REDUCED_KEYS = ("kappa", "kappa_ex", "kappa_0", "delta", "g", "eps", "eps_r", "eps_i",
                "n_th", "q_m", "scheme", "squeeze_r", "squeeze_phi")
SWEEPABLE = ("kappa", "kappa_0", "delta", "g", "eps_r", "eps_i", "n_th", "q_m",
             "squeeze_r", "squeeze_phi")
THREE_KEYS = ("delta_1", "delta_2", "nu", "g_1", "g_2", "kappa_1", "kappa_2", "eps_1",
              "eps_2", "gamma", "n_th", "omega_m")
COMMAND_KEYS = {
    "spectrum": ("kappa", "delta", "g", "points", "omega_min", "omega_max"),
    "cool": REDUCED_KEYS + ("t_final", "samples", "method"),
    "limits": ("scheme", "n_th", "q_m", "kappa_grid", "numeric", "opt_grid"),
    "regions": ("q_m", "nth_grid", "numeric", "opt_grid"),
    "sweep": REDUCED_KEYS,
    "reduce3": THREE_KEYS,
    "squeeze": REDUCED_KEYS + ("theta", "points", "omega_min", "omega_max", "field"),
}


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def norm_key(key: str) -> str:
    return key.lower().replace("-", "").replace("_", "")


@dataclass(frozen=True)
class GridAxis:
    name: str
    lo: float
    hi: float
    count: int
    scale: str = "lin"

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)

    def label(self) -> str:
        return f"{self.name},{self.lo!r},{self.hi!r},{self.count},{self.scale}"


@dataclass
class RunConfig:
    command: str
    params: dict[str, str] = field(default_factory=dict)
    grid: list[GridAxis] = field(default_factory=list)
    output_path: str | None = None
    format: str = "csv"
    jobs: int = 1
    figure_id: str | None = None


# -- parsing -------------------------------------------------------------------

def _canonical(key: str, allowed) -> str:
    table = {norm_key(k): k for k in tuple(allowed) + GLOBAL_KEYS}
    canon = table.get(norm_key(key))
    if canon is None:
        raise ConfigError(key, "unknown key")
    return canon


def parse_grid(text: str, allowed=SWEEPABLE) -> GridAxis:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) not in (4, 5):
        raise ConfigError("grid", f"expected name,min,max,count[,lin|log], got {text!r}")
    table = {norm_key(k): k for k in allowed}
    name = table.get(norm_key(parts[0]))
    if name is None:
        raise ConfigError("grid", f"unknown sweep parameter {parts[0]!r}")
    try:
        lo, hi, count = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise ConfigError("grid", f"bad numbers in {text!r}") from None
    scale = parts[4] if len(parts) == 5 else "lin"
    if scale not in ("lin", "log"):
        raise ConfigError("grid", f"scale must be lin or log, got {scale!r}")
    if count < 2:
        raise ConfigError("grid", "count must be >= 2")
    if scale == "log" and (lo == 0 or hi == 0 or (lo > 0) != (hi > 0)):
        raise ConfigError("grid", "log axis needs nonzero bounds of equal sign")
    return GridAxis(name, lo, hi, count, scale)


def read_config_file(path: str) -> list[tuple[str, str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    items = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError("config", f"line {n}: expected key=value")
        k, v = line.split("=", 1)
        items.append((k.strip(), v.strip()))
    return items


def parse_args(argv: list[str]) -> RunConfig:
    if not argv:
        raise ConfigError("command", f"missing command (one of {', '.join(COMMANDS)})")
    command = argv[0]
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}")
    rest = argv[1:]
    fig_id = None
    if command == "figure":
        if not rest or rest[0].startswith("--"):
            raise ConfigError("id", f"figure needs an id (one of {', '.join(FIGURES)})")
        fig_id, rest = rest[0], rest[1:]
        if fig_id not in FIGURES:
            raise ConfigError("id", f"unknown figure {fig_id!r}")
    flags: list[tuple[str, str]] = []
    i = 0
    while i < len(rest):
        tok = rest[i]
        if not tok.startswith("--"):
            raise ConfigError(tok, "expected --key value")
        if "=" in tok:
            k, v = tok[2:].split("=", 1)
            i += 1
        else:
            if i + 1 >= len(rest):
                raise ConfigError(tok[2:], "missing value")
            k, v = tok[2:], rest[i + 1]
            i += 2
        flags.append((k, v))

    if command == "figure":
        from .figures import BINDINGS
        key = "fig3" if fig_id in ("fig3a", "fig3b", "fig3c") else fig_id
        allowed = tuple(BINDINGS[key])
    else:
        allowed = COMMAND_KEYS[command]

    cfg = RunConfig(command, figure_id=fig_id)
    file_items: list[tuple[str, str]] = []
    for k, v in flags:
        if _canonical(k, allowed) == "config":
            file_items = read_config_file(v)

    file_grid, flag_grid = [], []
    for source, items in (("file", file_items), ("flags", flags)):
        for k, v in items:
            canon = _canonical(k, allowed)
            if canon == "config":
                if source == "file":
                    raise ConfigError("config", "config files cannot include other files")
                continue
            if canon == "grid":
                if command != "sweep":
                    raise ConfigError("grid", f"grid axes are only valid for sweep")
                (file_grid if source == "file" else flag_grid).append(parse_grid(v))
            elif canon == "out":
                cfg.output_path = v
            elif canon == "format":
                if v not in ("csv", "json"):
                    raise ConfigError("format", f"must be csv or json, got {v!r}")
                cfg.format = v
            elif canon == "jobs":
                try:
                    cfg.jobs = int(v)
                except ValueError:
                    raise ConfigError("jobs", f"not an integer: {v!r}") from None
                if cfg.jobs < 1:
                    raise ConfigError("jobs", "must be >= 1")
            else:
                cfg.params[canon] = v
    cfg.grid = flag_grid or file_grid
    names = [a.name for a in cfg.grid]
    if len(set(names)) != len(names):
        raise ConfigError("grid", "duplicate sweep axis")
    return cfg


# -- value helpers -------------------------------------------------------------

def _float(params, key, default=None) -> float:
    if key not in params:
        if default is None:
            raise ConfigError(key, "required")
        return float(default)
    try:
        v = float(params[key])
    except (TypeError, ValueError):
        raise ConfigError(key, f"not a number: {params[key]!r}") from None
    if not math.isfinite(v):
        raise ConfigError(key, "must be finite")
    return v


def _complex(params, key, default=None) -> complex:
    if key not in params:
        if default is None:
            raise ConfigError(key, "required")
        return complex(default)
    try:
        return complex(str(params[key]).replace(" ", ""))
    except ValueError:
        raise ConfigError(key, f"not a complex number: {params[key]!r}") from None


def _range(params, key, default) -> tuple[float, float, int]:
    text = params.get(key, default)
    try:
        span, _, count = text.partition(":")
        lo, hi = span.split("..")
        lo, hi, n = float(lo), float(hi), int(count) if count else 13
    except ValueError:
        raise ConfigError(key, f"expected MIN..MAX[:COUNT], got {text!r}") from None
    if not (0 < lo <= hi) or n < 1:
        raise ConfigError(key, "need 0 < MIN <= MAX and COUNT >= 1")
    return lo, hi, n


def resolve_reduced(params: dict) -> tuple[ReducedParams, SchemeConfig, dict]:
    """Build the operating point from flat key-value input.

    Defaults: ``kappa=4, delta=-kappa/2, g=0.1, n_th=1000, q_m=1e5``; IS
    takes the optimal pump unless ``eps`` (or ``eps_r``/``eps_i``) is
    given; SD takes the heating-null squeezing unless ``squeeze_r`` /
    ``squeeze_phi`` are given.
    """
    try:
        scheme = Scheme(str(params.get("scheme", "IS")).upper())
    except ValueError:
        raise ConfigError("scheme", f"must be SB, SD or IS, got {params['scheme']!r}") from None
    kappa = _float(params, "kappa", 4.0)
    kappa_0 = _float(params, "kappa_0", 0.0)
    kappa_ex = _float(params, "kappa_ex", kappa - kappa_0)
    delta = _float(params, "delta", -(kappa_ex + kappa_0) / 2)
    g = _float(params, "g", 0.1)
    n_th = _float(params, "n_th", 1e3)
    q_m = _float(params, "q_m", 1e5)
    try:
        base = ReducedParams(delta=delta, kappa_ex=kappa_ex, kappa_0=kappa_0, g=g,
                             n_th=n_th, q_m=q_m)
    except ValueError as exc:
        raise ConfigError(_offending(str(exc)), str(exc)) from None
    if scheme is Scheme.IS:
        if "eps" in params and str(params["eps"]).lower() != "opt":
            eps = _complex(params, "eps")
        else:
            eps = optimal_eps(base)
        if "eps_r" in params or "eps_i" in params:
            eps = complex(_float(params, "eps_r", eps.real), _float(params, "eps_i", eps.imag))
    else:
        for k in ("eps", "eps_r", "eps_i"):
            if k in params and _complex(params, k) != 0:
                raise ConfigError(k, f"scheme {scheme.value} requires eps = 0")
        eps = 0j
    p = base.replace(eps=eps)
    r, phi = 0.0, 0.0
    if scheme is Scheme.SD:
        r0, phi0 = sd_optimal_squeezing(p.kappa, delta, p.omega_m)
        r = r0 if str(params.get("squeeze_r", "opt")).lower() == "opt" \
            else _float(params, "squeeze_r")
        phi = phi0 if str(params.get("squeeze_phi", "opt")).lower() == "opt" \
            else _float(params, "squeeze_phi")
    else:
        for k in ("squeeze_r", "squeeze_phi"):
            if k in params and _float(params, k) != 0:
                raise ConfigError(k, f"only valid for scheme SD")
    try:
        s = SchemeConfig(scheme, r, phi)
    except ValueError as exc:
        raise ConfigError("squeeze_r", str(exc)) from None
    resolved = dict(scheme=scheme.value, kappa=p.kappa, kappa_ex=p.kappa_ex,
                    kappa_0=p.kappa_0, delta=p.delta, g=p.g, eps=p.eps, n_th=p.n_th,
                    q_m=p.q_m, omega_m=p.omega_m, squeeze_r=r, squeeze_phi=phi)
    return p, s, resolved


def _offending(message: str) -> str:
    for k in ("kappa_ex", "kappa_0", "kappa", "q_m", "g", "n_th", "delta"):
        if message.startswith(k) or f" {k} " in f" {message} ":
            return k
    return "params"


# -- commands ------------------------------------------------------------------

def cmd_spectrum(cfg: RunConfig):
    prm = cfg.params
    kappa = _float(prm, "kappa", 4.0)
    if kappa <= 0:
        raise ConfigError("kappa", "must be > 0")
    delta = _float(prm, "delta", -math.sqrt(kappa**2 / 4 + 1))
    g = _float(prm, "g", 1.0)
    if g <= 0:
        raise ConfigError("g", "must be > 0 (spectra are normalized by 4G^2/kappa)")
    points = int(_float(prm, "points", 2001))
    if points < 2:
        raise ConfigError("points", "must be >= 2")
    p = ReducedParams.from_kappa(kappa, delta, g=g)
    grid = default_grid(p, points)
    lo = _float(prm, "omega_min", grid[0])
    hi = _float(prm, "omega_max", grid[-1])
    if hi <= lo:
        raise ConfigError("omega_max", "must exceed omega_min")
    w = np.linspace(lo, hi, points)
    sidebands = [x for x in (-1.0, 1.0) if lo <= x <= hi]
    w = np.union1d(w, sidebands)
    norm = 4 * g**2 / kappa
    p_is = p.replace(eps=optimal_eps(p))
    s_sd = SchemeConfig(Scheme.SD, *sd_optimal_squeezing(kappa, delta))
    sb = general_force_spectrum(w, p)
    sd = general_force_spectrum(w, p, s_sd)
    is_ = general_force_spectrum(w, p_is)
    t = Table(["omega", "sb", "sd", "is"])
    for row in zip(w, sb, sd, is_):
        t.add(float(row[0]), *(float(v) / norm for v in row[1:]))
    meta = dict(kappa=kappa, delta=delta, g=g, points=points, omega_min=lo, omega_max=hi,
                normalization="4 g^2 / kappa", eps_is=p_is.eps, squeeze_r=s_sd.squeeze_r,
                squeeze_phi=s_sd.squeeze_phi)
    return t, meta


def cmd_cool(cfg: RunConfig):
    p, s, meta = resolve_reduced(cfg.params)
    t_final = _float(cfg.params, "t_final", 0.0)
    verdict = stability(p)
    meta.update(t_final=t_final)
    if t_final > 0:
        samples = int(_float(cfg.params, "samples", 201))
        method = cfg.params.get("method", "DOP853")
        if samples < 2:
            raise ConfigError("samples", "must be >= 2")
        meta.update(samples=samples, method=method)
        traj = evolve(default_initial_state(p), p, s, t_final=t_final, n_samples=samples,
                      method=method)
        t = Table(["t", "nbb", "naa"])
        for ti, nb, na in zip(traj.times, traj.nbb_series, traj.naa_series):
            t.add(float(ti), float(nb), float(na))
        return t, meta
    t = Table(["status", "n_ss", "naa_ss", "n_f_wk", "n_opt", "gamma_minus", "gamma_plus",
               "gamma_opt", "n_f_analytic", "cooperativity", "margin", "stable_closed_form"])
    wk = weak_coupling_report(p, s)
    n_an = analytic_limit(p).n_f if s.kind is Scheme.IS else None
    if verdict.stable_eig:
        st = steady_state(p, s)
        status = "heating" if wk.heating else "ok"
        n_ss, naa = float(np.real(st.nbb)), float(np.real(st.naa))
    else:
        status, n_ss, naa = "unstable", None, None
    t.add(status, n_ss, naa, wk.n_f_wk, wk.n_opt, wk.gamma_minus, wk.gamma_plus,
          wk.gamma_opt, n_an, p.cooperativity, verdict.margin, verdict.stable_closed_form)
    return t, meta


def cmd_limits(cfg: RunConfig):
    prm = cfg.params
    which = str(prm.get("scheme", "all")).upper()
    if which == "ALL":
        schemes = (Scheme.SB, Scheme.SD, Scheme.IS)
    else:
        try:
            schemes = (Scheme(which),)
        except ValueError:
            raise ConfigError("scheme", f"must be all, SB, SD or IS, got {which!r}") from None
    n_th = _float(prm, "n_th", 1e3)
    q_m = _float(prm, "q_m", 1e5)
    if n_th <= 0 or q_m <= 0:
        raise ConfigError("n_th" if n_th <= 0 else "q_m", "must be > 0")
    lo, hi, n = _range(prm, "kappa_grid", "4..4000:13")
    numeric = int(_float(prm, "numeric", 0))
    opt_grid = int(_float(prm, "opt_grid", 16))
    kappas = np.geomspace(lo, hi, n) if n > 1 else np.array([lo])
    t = limits_table(n_th, q_m, kappas, numeric, opt_grid, schemes)
    meta = dict(scheme=which.lower(), n_th=n_th, q_m=q_m, kappa_grid=f"{lo!r}..{hi!r}:{n}",
                numeric=numeric, opt_grid=opt_grid)
    return t, meta


def cmd_regions(cfg: RunConfig):
    prm = cfg.params
    q_m = _float(prm, "q_m", 1e5)
    if q_m <= 0:
        raise ConfigError("q_m", "must be > 0")
    lo, hi, n = _range(prm, "nth_grid", "1..1e6:13")
    numeric = int(_float(prm, "numeric", 0))
    opt_grid = int(_float(prm, "opt_grid", 12))
    cols = ["n_th", "sb_k4", "sd_k4", "is_k4"]
    if numeric:
        cols += ["sb_k4_numeric", "sd_k4_numeric", "is_k4_numeric"]
    t = Table(cols)
    for n_th in (np.geomspace(lo, hi, n) if n > 1 else [lo]):
        row = [float(n_th)] + [ground_state_boundary(s, n_th, q_m)
                               for s in (Scheme.SB, Scheme.SD, Scheme.IS)]
        if numeric:
            row += [numeric_boundary(Scheme.SB, n_th, q_m, grid=opt_grid, scheme_delta=True),
                    numeric_boundary(Scheme.SD, n_th, q_m, grid=opt_grid, scheme_delta=True),
                    numeric_boundary(Scheme.IS, n_th, q_m, grid=opt_grid)]
        t.add(*row)
    meta = dict(q_m=q_m, nth_grid=f"{lo!r}..{hi!r}:{n}", numeric=numeric, opt_grid=opt_grid,
                is_boundary="inf: ground state at every kappa; 0: at none")
    return t, meta


SWEEP_COLUMNS = ("status", "n_ss", "n_f_wk", "n_f_analytic", "gamma_opt", "margin")


def sweep_point(params: dict) -> tuple:
    """Evaluate one sweep point; never raises for physics outcomes."""
    try:
        p, s, _ = resolve_reduced(params)
    except ConfigError:
        return ("invalid", None, None, None, None, None)
    verdict = stability(p)
    try:
        wk = weak_coupling_report(p, s)
        n_an = analytic_limit(p).n_f if s.kind is Scheme.IS else None
        if not verdict.stable_eig:
            return ("unstable", None, wk.n_f_wk, n_an, wk.gamma_opt, verdict.margin)
        n_ss = float(np.real(steady_state(p, s).nbb))
    except (ArithmeticError, PhysicalityError, UnstableSystemError, np.linalg.LinAlgError):
        return ("error", None, None, None, None, verdict.margin)
    status = "heating" if wk.heating else "ok"
    return (status, n_ss, wk.n_f_wk, n_an, wk.gamma_opt, verdict.margin)


def cmd_sweep(cfg: RunConfig, jobs: int = 1):
    if not cfg.grid:
        raise ConfigError("grid", "sweep needs at least one grid axis")
    _, _, base_meta = resolve_reduced(cfg.params)
    axes = cfg.grid
    points = []
    for combo in itertools.product(*(a.values() for a in axes)):
        prm = dict(cfg.params)
        prm.update({a.name: repr(float(v)) for a, v in zip(axes, combo)})
        points.append((combo, prm))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(sweep_point, [p for _, p in points], chunksize=8))
    else:
        results = [sweep_point(p) for _, p in points]
    t = Table([a.name for a in axes] + list(SWEEP_COLUMNS))
    for (combo, _), res in zip(points, results):
        t.add(*(float(v) for v in combo), *res)
    meta = {f"base.{k}": v for k, v in base_meta.items() if k not in {a.name for a in axes}}
    for i, a in enumerate(axes):
        meta[f"grid.{i}"] = a.label()
    return t, meta


def cmd_reduce3(cfg: RunConfig):
    prm = cfg.params
    vals = {}
    for k in THREE_KEYS:
        default = {"g_1": 0.0, "g_2": 0.0, "eps_2": 0.0, "n_th": 0.0, "omega_m": 1.0}.get(k)
        vals[k] = (_complex if k.startswith("eps") else _float)(prm, k, default)
    try:
        p = ThreeModeParams(**vals)
    except ValueError as exc:
        raise ConfigError(str(exc).split()[0], str(exc)) from None
    sols = classical_steady_state(p)
    t = Table(["solution", "alpha_1", "alpha_2", "beta", "residual", "delta", "kappa", "g",
               "eps", "n_th_eff", "n_f_add", "margin_mech", "margin_opt", "valid",
               "n_reduced", "n_full"])
    for i, ss in enumerate(sols):
        rp, em = reduce(p, ss)
        try:
            n_red = float(np.real(steady_state(rp).nbb))
        except UnstableSystemError:
            n_red = None
        try:
            n_full = full_phonon_number(p, ss)
        except UnstableSystemError:
            n_full = None
        t.add(i, ss.alpha_1, ss.alpha_2, ss.beta, ss.residual, rp.delta, rp.kappa, rp.g,
              rp.eps, rp.n_th, em.n_f_add, em.margin_mech, em.margin_opt, em.valid,
              n_red, n_full)
    return t, vals


def cmd_squeeze(cfg: RunConfig):
    p, s, meta = resolve_reduced(cfg.params)
    if s.kind is Scheme.SD:
        raise ConfigError("scheme", "quadrature spectra assume vacuum optical input (SB or IS)")
    prm = cfg.params
    theta = _float(prm, "theta", 0.0)
    points = int(_float(prm, "points", 2001))
    if points < 2:
        raise ConfigError("points", "must be >= 2")
    grid = default_grid(p, points)
    lo = _float(prm, "omega_min", grid[0])
    hi = _float(prm, "omega_max", grid[-1])
    if hi <= lo:
        raise ConfigError("omega_max", "must exceed omega_min")
    which = prm.get("field", "output")
    if which not in ("output", "intracavity"):
        raise ConfigError("field", f"must be output or intracavity, got {which!r}")
    fn = output_quadrature_spectrum if which == "output" else intracavity_quadrature_spectrum
    q = fn(p, theta, np.linspace(lo, hi, points))
    t = Table(["omega", "s_xx", "theta_opt", "r_mag"])
    for row in zip(q.omega, q.s_xx, q.theta_opt, q.r_mag):
        t.add(*(float(v) for v in row))
    meta.update(theta=theta, points=points, omega_min=lo, omega_max=hi, field=which)
    return t, meta


HANDLERS = {
    "spectrum": cmd_spectrum,
    "cool": cmd_cool,
    "limits": cmd_limits,
    "regions": cmd_regions,
    "reduce3": cmd_reduce3,
    "squeeze": cmd_squeeze,
}


# -- driver --------------------------------------------------------------------

def _header(cfg: RunConfig, meta: dict) -> dict:
    out = {"tool": "squeezecool", "version": __version__, "command": cfg.command}
    out.update({f"param.{k}": v for k, v in meta.items()})
    return out


def _destination(cfg: RunConfig, default_name: str) -> Path | None:
    if cfg.output_path:
        return Path(cfg.output_path)
    env = os.environ.get(OUTDIR_ENV)
    if env:
        return Path(env) / default_name
    return None


def run(cfg: RunConfig) -> int:
    ext = cfg.format
    if cfg.command == "figure":
        overrides = {}
        for k, v in cfg.params.items():
            overrides[k] = _float(cfg.params, k)
        tables, bindings = build(cfg.figure_id, **overrides)
        outdir = Path(cfg.output_path or os.environ.get(OUTDIR_ENV) or ".")
        outdir.mkdir(parents=True, exist_ok=True)
        meta = _header(cfg, bindings)
        meta["figure"] = cfg.figure_id
        for name, table in tables.items():
            (outdir / f"{name}.{ext}").write_text(render(table, meta, ext), encoding="utf-8")
        (outdir / f"{cfg.figure_id}_manifest.json").write_text(manifest(tables, meta),
                                                               encoding="utf-8")
        return 0
    if cfg.command == "sweep":
        table, meta = cmd_sweep(cfg, cfg.jobs)
    else:
        table, meta = HANDLERS[cfg.command](cfg)
    text = render(table, _header(cfg, meta), ext)
    dest = _destination(cfg, f"{cfg.command}.{ext}")
    if dest is None:
        sys.stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text, encoding="utf-8")
    return 0


USAGE = __doc__


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv and argv[0] in ("-h", "--help", "help"):
        sys.stdout.write(USAGE)
        return 0
    try:
        cfg = parse_args(argv)
        return run(cfg)
    except ConfigError as exc:
        sys.stderr.write(f"squeezecool: config error: {exc}\n")
        return 2
    except KeyError as exc:
        sys.stderr.write(f"squeezecool: config error: {exc.args[0]}: unknown key\n")
        return 2
    except (UnstableSystemError, ArithmeticError, IntegrationError, PhysicalityError,
            np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"squeezecool: numerical failure: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
