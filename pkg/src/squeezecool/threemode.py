"""Full chi^(2) three-mode model and its reduction to the two-mode description.

Modes: fundamental ``a1``, second harmonic ``a2`` and mechanics ``b``.  The
nonlinearity ``nu`` is taken real (its phase can be absorbed into ``a2``).
Equations of motion, in the frame of the drives:

    da1/dt = (i D1 - k1/2) a1 + nu a1^dag a2 - i g1 a1 (b + b^dag) - e1
    da2/dt = (i D2 - k2/2) a2 - nu/2 a1^2  - i g2 a2 (b + b^dag) - e2
    db/dt  = (-i wm - gamma/2) b - i g1 a1^dag a1 - i g2 a2^dag a2
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_continuous_lyapunov
from scipy.optimize import root

from .model import ReducedParams, UnstableSystemError

VALIDITY_FACTOR = 10.0


class ReductionWarning(UserWarning):
    """The harmonic is not detuned far enough for adiabatic elimination."""


@dataclass(frozen=True)
class ThreeModeParams:
    delta_1: float
    delta_2: float
    nu: float
    g_1: float
    g_2: float
    kappa_1: float
    kappa_2: float
    eps_1: complex
    eps_2: complex
    gamma: float
    n_th: float = 0.0
    omega_m: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "eps_1", complex(self.eps_1))
        object.__setattr__(self, "eps_2", complex(self.eps_2))
        if self.kappa_1 <= 0 or self.kappa_2 <= 0:
            raise ValueError("kappa_1 and kappa_2 must be > 0")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if self.n_th < 0:
            raise ValueError("n_th must be >= 0")
        for name in ("delta_1", "delta_2", "nu", "g_1", "g_2", "omega_m"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class ClassicalSteadyState:
    alpha_1: complex
    alpha_2: complex
    beta: complex
    residual: float


def _equations(p: ThreeModeParams, a1, a2, b):
    x = 2 * b.real
    e1 = (1j * p.delta_1 - p.kappa_1 / 2) * a1 + p.nu * a1.conjugate() * a2 \
        - 1j * p.g_1 * a1 * x - p.eps_1
    e2 = (1j * p.delta_2 - p.kappa_2 / 2) * a2 - p.nu / 2 * a1**2 \
        - 1j * p.g_2 * a2 * x - p.eps_2
    e3 = (-1j * p.omega_m - p.gamma / 2) * b - 1j * p.g_1 * abs(a1) ** 2 \
        - 1j * p.g_2 * abs(a2) ** 2
    return e1, e2, e3


def steady_state_residual(p: ThreeModeParams, a1, a2, b) -> float:
    """Largest equation residual relative to the size of its terms."""
    x = 2 * b.real
    scales = (
        abs((1j * p.delta_1 - p.kappa_1 / 2) * a1) + abs(p.nu * a1 * a2)
        + abs(p.g_1 * a1 * x) + abs(p.eps_1),
        abs((1j * p.delta_2 - p.kappa_2 / 2) * a2) + abs(p.nu * a1**2) / 2
        + abs(p.g_2 * a2 * x) + abs(p.eps_2),
        abs((-1j * p.omega_m - p.gamma / 2) * b) + p.g_1 * abs(a1) ** 2 + p.g_2 * abs(a2) ** 2,
    )
    res = _equations(p, a1, a2, b)
    return max(abs(r) / s if s > 0 else abs(r) for r, s in zip(res, scales))


def _solve_from(p: ThreeModeParams, seed, scale):
    def f(z):
        a1, a2, b = (complex(z[0], z[1]) * scale[0], complex(z[2], z[3]) * scale[1],
                     complex(z[4], z[5]) * scale[2])
        r = _equations(p, a1, a2, b)
        return [r[0].real / scale[3], r[0].imag / scale[3], r[1].real / scale[4],
                r[1].imag / scale[4], r[2].real / scale[5], r[2].imag / scale[5]]

    z0 = []
    for v, s in zip(seed, scale[:3]):
        z0 += [v.real / s, v.imag / s]
    sol = root(f, z0, method="hybr", options=dict(xtol=1e-15, maxfev=20000))
    z = sol.x
    return (complex(z[0], z[1]) * scale[0], complex(z[2], z[3]) * scale[1],
            complex(z[4], z[5]) * scale[2])


def classical_steady_state(p: ThreeModeParams, seeds: int = 8, tol: float = 1e-10,
                           continuation_steps: int = 20, rng_seed: int = 0
                           ) -> list[ClassicalSteadyState]:
    """All distinct classical fixed points found by continuation plus multistart.

    The first entry is obtained by ramping the nonlinear couplings
    (``nu, g_1, g_2``) from zero, starting at the decoupled Lorentzian
    solution, so it is the branch continuously connected to it.  Further
    seeds are random perturbations of that branch (fixed RNG seed, so results
    are reproducible).

    Raises
    ------
    ArithmeticError
        When no seed converges to a residual below ``tol``.
    """
    a1_0 = p.eps_1 / (1j * p.delta_1 - p.kappa_1 / 2)
    a2_0 = p.eps_2 / (1j * p.delta_2 - p.kappa_2 / 2)
    state = (a1_0, a2_0, 0j)
    best_res = math.inf
    for lam in np.linspace(0, 1, continuation_steps + 1)[1:]:
        q = ThreeModeParams(p.delta_1, p.delta_2, lam * p.nu, lam * p.g_1, lam * p.g_2,
                            p.kappa_1, p.kappa_2, p.eps_1, p.eps_2, p.gamma, p.n_th, p.omega_m)
        state = _solve_from(q, state, _scales(q, state))
    candidates = [state]
    rng = np.random.default_rng(rng_seed)
    for _ in range(seeds - 1):
        jitter = [v + abs(v + 1e-300) * (rng.normal() + 1j * rng.normal())
                  for v in candidates[0]]
        candidates.append(_solve_from(p, tuple(jitter), _scales(p, candidates[0])))

    found: list[ClassicalSteadyState] = []
    for a1, a2, b in candidates:
        # Newton polish with a fresh scaling
        a1, a2, b = _solve_from(p, (a1, a2, b), _scales(p, (a1, a2, b)))
        res = steady_state_residual(p, a1, a2, b)
        best_res = min(best_res, res)
        if res > tol:
            continue
        if any(_same((a1, a2, b), (s.alpha_1, s.alpha_2, s.beta)) for s in found):
            continue
        found.append(ClassicalSteadyState(a1, a2, b, res))
    if not found:
        raise ArithmeticError(f"classical steady state did not converge "
                              f"(best residual {best_res:.3e})")
    return found


def _scales(p, state):
    mags = [max(abs(v), 1e-12) for v in state]
    if mags[2] <= 1e-12:
        mags[2] = max((p.g_1 * mags[0] ** 2 + p.g_2 * mags[1] ** 2) / p.omega_m, 1e-12)
    eq = [max(abs(p.eps_1), p.kappa_1 * mags[0], 1e-12),
          max(abs(p.eps_2), p.kappa_2 * mags[1], 1e-12),
          max(p.omega_m * mags[2], 1e-12)]
    return mags + eq


def _same(u, v, rtol=1e-6):
    return all(abs(x - y) <= rtol * max(abs(x), abs(y), 1e-12) for x, y in zip(u, v))


@dataclass(frozen=True)
class EffectiveModel:
    delta_eff: float
    kappa_eff: float
    g_eff: complex
    eps_eff: complex
    eps_m: float
    n_add_rate: float
    n_f_add: float
    delta_2_eff: float
    threshold_mech: float
    threshold_opt: float
    margin_mech: float
    margin_opt: float
    valid: bool


def effective_model(p: ThreeModeParams, ss: ClassicalSteadyState) -> EffectiveModel:
    """Parameters of the fundamental mode after eliminating the second harmonic.

    The detuning shift from the far-detuned harmonic is
    ``-delta_2_eff nu^2 |a1|^2 / (delta_2_eff^2 + kappa_2^2/4)`` (level
    repulsion).  ``eps_eff`` is ``nu * alpha_2``, the amplitude multiplying
    ``a1^dag`` in the fundamental's equation.
    """
    a1, a2, b = ss.alpha_1, ss.alpha_2, ss.beta
    x = 2 * b.real
    d1e = p.delta_1 - p.g_1 * x
    d2e = p.delta_2 - p.g_2 * x
    den = d2e**2 + p.kappa_2**2 / 4
    load = p.nu**2 * abs(a1) ** 2 / den
    g_eff = p.g_1 * a1 - p.g_2 * p.nu * a1.conjugate() * a2 / (1j * d2e - p.kappa_2 / 2)
    mech = p.g_2**2 * abs(a2) ** 2 * p.kappa_2 / den
    thr_m = math.sqrt(p.g_2**2 * abs(a2) ** 2 * p.kappa_2 / p.omega_m)
    thr_o = math.sqrt(p.kappa_2 / p.kappa_1) * abs(p.nu * a1)
    margin_m = abs(d2e) / thr_m if thr_m > 0 else math.inf
    margin_o = abs(d2e) / thr_o if thr_o > 0 else math.inf
    return EffectiveModel(
        delta_eff=d1e - d2e * load,
        kappa_eff=p.kappa_1 + p.kappa_2 * load,
        g_eff=g_eff,
        eps_eff=p.nu * a2,
        eps_m=mech,
        n_add_rate=mech / p.gamma,
        n_f_add=mech / p.omega_m,
        delta_2_eff=d2e,
        threshold_mech=thr_m,
        threshold_opt=thr_o,
        margin_mech=margin_m,
        margin_opt=margin_o,
        valid=min(margin_m, margin_o) >= VALIDITY_FACTOR,
    )


def reduce(p: ThreeModeParams, ss: ClassicalSteadyState | None = None
           ) -> tuple[ReducedParams, EffectiveModel]:
    """Two-mode parameters equivalent to the three-mode system.

    The fundamental is rotated by ``arg(g_eff)`` so the coupling is real;
    the pump in the reduced equation ``-2i eps a^dag`` is then
    ``eps = (i/2) nu alpha_2 e^{-2i arg g_eff}``.  The harmonic's extra
    loss goes into ``kappa_0`` and its added noise into ``n_th``.  Check
    ``EffectiveModel.valid`` (a :class:`ReductionWarning` is issued when false).
    """
    if ss is None:
        ss = classical_steady_state(p)[0]
    em = effective_model(p, ss)
    if not em.valid:
        warnings.warn(f"elimination margins {em.margin_mech:.3g}, {em.margin_opt:.3g} are "
                      f"below {VALIDITY_FACTOR:g}", ReductionWarning, stacklevel=2)
    theta = cmath.phase(em.g_eff) if em.g_eff != 0 else 0.0
    eps = 0.5j * em.eps_eff * cmath.exp(-2j * theta)
    rp = ReducedParams(delta=em.delta_eff, kappa_ex=p.kappa_1,
                       kappa_0=em.kappa_eff - p.kappa_1, g=abs(em.g_eff), eps=eps,
                       n_th=p.n_th + em.n_add_rate, q_m=p.omega_m / p.gamma,
                       omega_m=p.omega_m)
    return rp, em


# -- full linearized three-mode model (oracle for the elimination) -------------

def full_drift(p: ThreeModeParams, ss: ClassicalSteadyState) -> np.ndarray:
    """Drift over ``(a1, a1^dag, a2, a2^dag, b, b^dag)`` fluctuations."""
    a1, a2, b = ss.alpha_1, ss.alpha_2, ss.beta
    x = 2 * b.real
    d1e = p.delta_1 - p.g_1 * x
    d2e = p.delta_2 - p.g_2 * x
    D = np.zeros((6, 6), dtype=complex)
    D[0, 0] = 1j * d1e - p.kappa_1 / 2
    D[0, 1] = p.nu * a2
    D[0, 2] = p.nu * a1.conjugate()
    D[0, 4] = D[0, 5] = -1j * p.g_1 * a1
    D[2, 2] = 1j * d2e - p.kappa_2 / 2
    D[2, 0] = -p.nu * a1
    D[2, 4] = D[2, 5] = -1j * p.g_2 * a2
    D[4, 4] = -1j * p.omega_m - p.gamma / 2
    D[4, 0] = -1j * p.g_1 * a1.conjugate()
    D[4, 1] = -1j * p.g_1 * a1
    D[4, 2] = -1j * p.g_2 * a2.conjugate()
    D[4, 3] = -1j * p.g_2 * a2
    swap = [1, 0, 3, 2, 5, 4]
    for r in (0, 2, 4):
        D[r + 1] = np.conj(D[r, swap])
    return D


def full_diffusion(p: ThreeModeParams) -> np.ndarray:
    return np.diag([p.kappa_1, 0, p.kappa_2, 0,
                    p.gamma * (p.n_th + 1), p.gamma * p.n_th]).astype(complex)


def full_phonon_number(p: ThreeModeParams, ss: ClassicalSteadyState) -> float:
    """Exact ``<db^dag db>`` of the linearized three-mode system."""
    D = full_drift(p, ss)
    margin = np.linalg.eigvals(D).real.max()
    if margin >= 0:
        raise UnstableSystemError(f"three-mode fluctuations unstable ({margin:.3e})")
    sigma = solve_continuous_lyapunov(D, -full_diffusion(p))
    return float(sigma[5, 5].real)


def drives_for_state(alpha_1: complex, alpha_2: complex, delta_1_eff: float,
                     delta_2_eff: float, nu: float, g_1: float, g_2: float,
                     kappa_1: float, kappa_2: float, gamma: float, n_th: float = 0.0,
                     omega_m: float = 1.0) -> ThreeModeParams:
    """Inverse problem: bare detunings and drives that produce given mean fields."""
    beta = -1j * (g_1 * abs(alpha_1) ** 2 + g_2 * abs(alpha_2) ** 2) \
        / (1j * omega_m + gamma / 2)
    x = 2 * beta.real
    eps_1 = (1j * delta_1_eff - kappa_1 / 2) * alpha_1 + nu * alpha_1.conjugate() * alpha_2
    eps_2 = (1j * delta_2_eff - kappa_2 / 2) * alpha_2 - nu / 2 * alpha_1**2
    return ThreeModeParams(delta_1_eff + g_1 * x, delta_2_eff + g_2 * x, nu, g_1, g_2,
                           kappa_1, kappa_2, eps_1, eps_2, gamma, n_th, omega_m)


def design_reduced_target(delta: float, kappa_1: float, kappa_2: float, nu: float,
                          alpha_1: float, g_1: float, g_2: float, delta_2_eff: float,
                          gamma: float, n_th: float = 0.0, omega_m: float = 1.0,
                          iterations: int = 60) -> ThreeModeParams:
    """Three-mode parameters whose reduced model has detuning ``delta`` and the
    optimal intracavity-squeezing pump.

    The effective fundamental detuning and loss depend on ``delta_2_eff``; the
    bare fundamental detuning is chosen to compensate, and the harmonic
    amplitude is iterated until the reduced pump is optimal for the
    effective linewidth.
    """
    den = delta_2_eff**2 + kappa_2**2 / 4
    load = nu**2 * alpha_1**2 / den
    kappa_eff = kappa_1 + kappa_2 * load
    d1e = delta + delta_2_eff * load
    target = complex(-(omega_m + delta) / 2, -kappa_eff / 4)
    a1 = complex(alpha_1)
    a2 = 0j
    for _ in range(iterations):
        g_eff = g_1 * a1 - g_2 * nu * a1.conjugate() * a2 / (1j * delta_2_eff - kappa_2 / 2)
        theta = cmath.phase(g_eff)
        a2 = target * cmath.exp(2j * theta) * 2 / (1j * nu)
    return drives_for_state(a1, a2, d1e, delta_2_eff, nu, g_1, g_2, kappa_1, kappa_2,
                            gamma, n_th, omega_m)
