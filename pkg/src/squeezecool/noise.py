"""Weak-coupling quantum-noise analysis: optical force spectrum and rates.

Spectra are normalized with ``x_ZPF = 1``, so a spectral value is directly a
rate.  Convention: ``S(omega) = int dtau e^{i omega tau} <F(tau) F(0)>``;
the cooling rate is ``S(+omega_m)`` and the heating rate ``S(-omega_m)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .model import IS, ReducedParams, Scheme, SchemeConfig, build_diffusion, build_drift

DEFAULT_GRID_POINTS = 2001


class UnphysicalSpectrumWarning(RuntimeWarning):
    """The bare cavity is parametrically unstable; the spectrum is meaningless."""


@dataclass(frozen=True)
class SpectrumSeries:
    omega: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.omega) <= 0):
            raise ValueError("omega grid must be strictly increasing")


@dataclass(frozen=True)
class WeakCouplingReport:
    gamma_minus: float
    gamma_plus: float
    gamma_opt: float
    n_opt: float | None
    n_f_wk: float | None

    @property
    def heating(self) -> bool:
        return self.gamma_opt <= 0


def chi(omega, p: ReducedParams):
    """Optical response ``1 / (kappa/2 - i(omega + delta))``."""
    return 1.0 / (p.kappa / 2 - 1j * (np.asarray(omega) + p.delta))


def _check_cavity(p: ReducedParams) -> None:
    if 4 * abs(p.eps) ** 2 >= p.kappa**2 / 4 + p.delta**2:
        warnings.warn(
            f"4|eps|^2 = {4 * abs(p.eps) ** 2:.6g} >= kappa^2/4 + delta^2: "
            "bare cavity is unstable, force spectrum is unphysical",
            UnphysicalSpectrumWarning, stacklevel=3)


def force_spectrum(omega, p: ReducedParams):
    """Normalized backaction force spectrum for vacuum optical input (SB/IS).

    Works on scalars and arrays.
    """
    _check_cavity(p)
    w = np.asarray(omega, dtype=float)
    d, k, er, ei = p.delta, p.kappa, p.eps.real, p.eps.imag
    num = (w - d - 2 * er) ** 2 + (k / 2 + 2 * ei) ** 2
    den = (k**2 / 4 + d**2 - 4 * abs(p.eps) ** 2 - w**2) ** 2 + w**2 * k**2
    out = p.g**2 * k * num / den
    return float(out) if out.ndim == 0 else out


def general_force_spectrum(omega, p: ReducedParams, s: SchemeConfig = IS):
    """Force spectrum for any input noise, from the optical linear response.

    Solves ``(-i omega - D_opt) V = xi`` and assembles the two-time
    correlation ``T(w) N T(-w)^T``.  Needed for squeezed driving, whose input
    noise is not vacuum.
    """
    _check_cavity(p)
    D = build_drift(p.replace(g=0.0))[:2, :2]
    N = build_diffusion(p, s)[:2, :2]
    ordered = N[:, ::-1]  # <xi_i xi_j> = <xi_i (xi_swap(j))^dag>
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    eye = np.eye(2)
    out = np.empty(w.shape)
    for i, wi in enumerate(w):
        T = np.linalg.inv(-1j * wi * eye - D)
        Tm = np.linalg.inv(1j * wi * eye - D)
        out[i] = (T @ ordered @ Tm.T).sum().real
    out *= p.g**2
    return float(out[0]) if np.ndim(omega) == 0 else out


def default_grid(p: ReducedParams, n: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    span = 1.5 * max(p.kappa, 4 * p.omega_m)
    return np.linspace(-span, span, n)


def spectrum_series(p: ReducedParams, s: SchemeConfig = IS, omega=None) -> SpectrumSeries:
    w = default_grid(p) if omega is None else np.asarray(omega, dtype=float)
    if s.kind is Scheme.SD:
        vals = general_force_spectrum(w, p, s)
    else:
        vals = force_spectrum(w, p)
    return SpectrumSeries(w, np.asarray(vals))


def optimal_eps(p: ReducedParams) -> complex:
    """Nonlinear pump that nulls the heating sideband ``S(-omega_m)``."""
    return complex(-(p.omega_m + p.delta) / 2, -p.kappa / 4)


def net_cooling_rate(p: ReducedParams) -> float:
    """Closed-form ``Gamma_opt``, evaluated at ``omega = omega_m``."""
    d, k, wm = p.delta, p.kappa, p.omega_m
    den = (k**2 / 4 + d**2 - 4 * abs(p.eps) ** 2 - wm**2) ** 2 + wm**2 * k**2
    return -4 * p.g**2 * k * wm * (d + 2 * p.eps.real) / den


def weak_coupling_report(p: ReducedParams, s: SchemeConfig = IS) -> WeakCouplingReport:
    """Fermi-golden-rule rates and the weak-coupling final occupancy.

    Heating (``gamma_opt <= 0``) is a regular outcome: ``n_opt`` and
    ``n_f_wk`` are then ``None``.
    """
    s.check(p)
    wm = p.omega_m
    if s.kind is Scheme.SD:
        g_minus = general_force_spectrum(wm, p, s)
        g_plus = general_force_spectrum(-wm, p, s)
        g_opt = g_minus - g_plus
    else:
        g_minus = force_spectrum(wm, p)
        g_plus = force_spectrum(-wm, p)
        g_opt = net_cooling_rate(p)
    if g_opt <= 0 or not math.isfinite(g_opt):
        return WeakCouplingReport(g_minus, g_plus, g_opt, None, None)
    n_opt = g_plus / g_opt
    return WeakCouplingReport(g_minus, g_plus, g_opt, n_opt,
                              n_opt + p.gamma * p.n_th / g_opt)
