"""Gaussian second-moment dynamics of the linearized cavity + mechanics model.

The equations of motion are generated from the Lyapunov form
``d sigma/dt = D sigma + sigma D^dag + N`` with ``sigma = <V V^dag>`` and
``V = (a, a^dag, b, b^dag)``; they are affine in the ten moments, so both the
time evolution and the steady state reduce to a 10x10 complex linear system.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .model import (
    IS,
    ReducedParams,
    SchemeConfig,
    UnstableSystemError,
    build_diffusion,
    build_drift,
    stability,
)

CONJ_TOL = 1e-10
PHYS_TOL = 1e-8


class IntegrationError(RuntimeError):
    pass


class PhysicalityError(RuntimeError):
    pass


@dataclass(frozen=True)
class MomentState:
    """The ten second moments; ``naa``/``nbb`` are real on physical states."""

    naa: complex
    nbb: complex
    adb: complex
    abd: complex
    ab: complex
    adbd: complex
    aa: complex
    adad: complex
    bb: complex
    bdbd: complex

    @classmethod
    def from_vector(cls, x) -> "MomentState":
        x = np.asarray(x, dtype=complex)
        vals = [complex(v) for v in x]
        vals[0] = vals[0].real if vals[0].imag == 0 else vals[0]
        vals[1] = vals[1].real if vals[1].imag == 0 else vals[1]
        return cls(*vals)

    @classmethod
    def thermal(cls, n_a: float = 0.0, n_b: float = 0.0) -> "MomentState":
        return cls(n_a, n_b, 0j, 0j, 0j, 0j, 0j, 0j, 0j, 0j)

    def vector(self) -> np.ndarray:
        return np.array(astuple(self), dtype=complex)

    def covariance(self) -> np.ndarray:
        """Return ``<V V^dag>`` assembled from the moments."""
        return _sigma(self.vector())

    def conjugate_defect(self) -> float:
        """Largest violation of the conjugate-pair identities."""
        return float(max(abs(self.adbd - np.conj(self.ab)),
                         abs(self.adad - np.conj(self.aa)),
                         abs(self.bdbd - np.conj(self.bb)),
                         abs(self.abd - np.conj(self.adb)),
                         abs(np.imag(self.naa)), abs(np.imag(self.nbb))))

    def scale(self) -> float:
        return float(max(1.0, np.abs(self.vector()).max()))


MOMENT_NAMES = tuple(f.name for f in fields(MomentState))

# (row, col) of sigma = <V V^dag> from which each moment's derivative is read;
# chosen so that row operator X and column operator Y give <X Y> in that order.
_READ = ((1, 1), (3, 3), (1, 3), (0, 2), (0, 3), (1, 2), (0, 1), (1, 0), (2, 3), (3, 2))


def _sigma(x: np.ndarray) -> np.ndarray:
    naa, nbb, adb, abd, ab, adbd, aa, adad, bb, bdbd = x
    return np.array([
        [naa + 1, aa, abd, ab],
        [adad, naa, adbd, adb],
        [adb, ab, nbb + 1, bb],
        [adbd, abd, bdbd, nbb],
    ], dtype=complex)


def _rhs_vector(x, D, N) -> np.ndarray:
    s = _sigma(x)
    ds = D @ s + s @ D.conj().T + N
    return np.array([ds[i, j] for i, j in _READ])


def generator(p: ReducedParams, s: SchemeConfig = IS) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(L, c)`` such that ``dx/dt = L x + c`` on the moment vector."""
    D = build_drift(p)
    N = build_diffusion(p, s)
    c = _rhs_vector(np.zeros(10, dtype=complex), D, N)
    L = np.empty((10, 10), dtype=complex)
    for k in range(10):
        e = np.zeros(10, dtype=complex)
        e[k] = 1.0
        L[:, k] = _rhs_vector(e, D, N) - c
    return L, c


def moment_rhs(x: MomentState, p: ReducedParams, s: SchemeConfig = IS) -> MomentState:
    """Time derivative of every moment, as a :class:`MomentState`."""
    return MomentState.from_vector(
        _rhs_vector(x.vector(), build_drift(p), build_diffusion(p, s)))


_U = np.array([[1, 1, 0, 0], [-1j, 1j, 0, 0], [0, 0, 1, 1], [0, 0, -1j, 1j]]) / np.sqrt(2)
OMEGA = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float)


def quadrature_covariance(x: MomentState) -> np.ndarray:
    """Symmetrized real covariance of ``(x_a, p_a, x_b, p_b)``, ``[x, p] = i``."""
    vvt = x.covariance()[:, [1, 0, 3, 2]]  # <V_i V_j>
    rr = _U @ vvt @ _U.T
    return np.real(rr + rr.T) / 2


def physicality_margin(x: MomentState) -> float:
    """Smallest eigenvalue of ``sigma + i Omega / 2`` (>= 0 when physical)."""
    m = quadrature_covariance(x) + 0.5j * OMEGA
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())


def check_state(x: MomentState, where: str = "") -> None:
    scale = x.scale()
    if x.conjugate_defect() > CONJ_TOL * scale:
        raise PhysicalityError(
            f"conjugate-moment identity violated{where}: {x.conjugate_defect():.3e}")
    if physicality_margin(x) < -PHYS_TOL * scale:
        raise PhysicalityError(
            f"uncertainty relation violated{where}: min eig {physicality_margin(x):.3e}")
    if np.real(x.naa) < -PHYS_TOL * scale or np.real(x.nbb) < -PHYS_TOL * scale:
        raise PhysicalityError(f"negative occupancy{where}")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: tuple[MomentState, ...]

    @property
    def nbb_series(self) -> np.ndarray:
        return np.array([np.real(st.nbb) for st in self.states])

    @property
    def naa_series(self) -> np.ndarray:
        return np.array([np.real(st.naa) for st in self.states])


def default_initial_state(p: ReducedParams) -> MomentState:
    """Optical vacuum, mechanics thermal at the bath occupancy."""
    return MomentState.thermal(0.0, p.n_th)


def evolve(x0: MomentState, p: ReducedParams, s: SchemeConfig = IS, t_final: float = 1.0,
           n_samples: int = 201, times=None, method: str = "DOP853",
           rtol: float = 1e-9, atol: float = 1e-12, check: bool = True) -> Trajectory:
    """Integrate the moment equations from ``x0`` to ``t_final``.

    Parameters
    ----------
    x0
        Initial moments.
    t_final, n_samples, times
        Output grid: ``times`` if given, else ``n_samples`` uniform points on
        ``[0, t_final]``.
    method
        Any :func:`scipy.integrate.solve_ivp` method (adaptive, dense output),
        or ``"expm"`` for exact propagation of the linear system, which is the
        practical choice for weak-coupling runs lasting many thousands of
        mechanical periods.
    rtol, atol
        Per-step tolerances for the adaptive integrators.
    check
        Verify conjugate identities and physicality at every sample.

    Raises
    ------
    IntegrationError
        If the integrator fails (e.g. step-size collapse).
    PhysicalityError
        If a sample violates the moment invariants beyond tolerance.
    """
    t = (np.linspace(0.0, t_final, n_samples) if times is None
         else np.asarray(times, dtype=float))
    L, c = generator(p, s)
    y0 = x0.vector()
    if method == "expm":
        ys = _propagate_exact(L, c, y0, t)
    else:
        sol = solve_ivp(lambda _t, y: L @ _symmetrize(y) + c, (t[0], t[-1]), y0,
                        method=method, t_eval=t, rtol=rtol, atol=atol)
        if not sol.success:
            raise IntegrationError(f"integration failed at t={sol.t[-1]:.6g}: {sol.message}")
        ys = sol.y.T
    states = tuple(MomentState.from_vector(y) for y in ys)
    if check:
        for ti, st in zip(t, states):
            check_state(st, f" at t={ti:.6g}")
    return Trajectory(t, states)


def _symmetrize(y: np.ndarray) -> np.ndarray:
    # The flow preserves the conjugate-pair identities exactly, but near
    # instability round-off along the broken directions is transiently
    # amplified; evaluating on the projection keeps it at round-off level.
    z = y.copy()
    z[0], z[1] = y[0].real, y[1].real
    for i, j in ((2, 3), (4, 5), (6, 7), (8, 9)):
        m = (y[i] + np.conj(y[j])) / 2
        z[i], z[j] = m, np.conj(m)
    return z


def _propagate_exact(L, c, y0, t) -> np.ndarray:
    A = np.zeros((11, 11), dtype=complex)
    A[:10, :10] = L
    A[:10, 10] = c
    z0 = np.append(y0, 1.0)
    out = np.empty((len(t), 10), dtype=complex)
    for i, ti in enumerate(t):
        out[i] = (expm(A * (ti - t[0])) @ z0)[:10]
    return out


def steady_state(p: ReducedParams, s: SchemeConfig = IS, check: bool = True) -> MomentState:
    """Stationary moments from the linear solve ``L x = -c``.

    Raises :class:`UnstableSystemError` (with the verdict attached) when the
    drift has an eigenvalue with non-negative real part.
    """
    verdict = stability(p)
    if not verdict.stable_eig:
        raise UnstableSystemError(
            f"no steady state: max Re eig = {verdict.margin:.3e}", verdict)
    L, c = generator(p, s)
    x = np.linalg.solve(L, -c)
    # Strongly squeezed cavities make L ill-conditioned; refinement recovers
    # the small mechanical moments.
    for _ in range(2):
        x = x + np.linalg.solve(L, -c - L @ x)
    resid = np.linalg.norm(L @ x + c)
    if resid > 1e-10 * np.linalg.norm(L) * max(1.0, np.linalg.norm(x)):
        raise ArithmeticError(f"steady-state residual too large: {resid:.3e}")
    st = MomentState.from_vector(_tidy(x))
    if check:
        check_state(st, " in steady state")
    return st


def _tidy(x: np.ndarray) -> np.ndarray:
    # Occupancies are real by construction; drop round-off imaginary parts.
    x = x.copy()
    x[0] = x[0].real
    x[1] = x[1].real
    return x


def phonon_number(p: ReducedParams, s: SchemeConfig = IS) -> float:
    """Steady-state ``<b^dag b>``; ``inf`` for unstable operating points."""
    try:
        return float(np.real(steady_state(p, s, check=False).nbb))
    except UnstableSystemError:
        return float("inf")
