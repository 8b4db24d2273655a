"""Parameter types, drift/diffusion matrices and stability of the linearized model.

All rates and frequencies are dimensionless, measured in units of the
mechanical frequency (``omega_m = 1`` by default).  The fluctuation vector is
ordered ``(a, a^dag, b, b^dag)`` everywhere in the package.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

# Stability verdicts from the two routes may disagree only inside this band.
MARGIN_TOL = 1e-9


class UnstableSystemError(ValueError):
    """Raised when an operation needs a stable operating point."""

    def __init__(self, message: str, verdict: "StabilityVerdict | None" = None):
        super().__init__(message)
        self.verdict = verdict


class Scheme(str, enum.Enum):
    SB = "SB"  # sideband cooling
    SD = "SD"  # squeezed-vacuum driving
    IS = "IS"  # intracavity squeezing


@dataclass(frozen=True)
class ReducedParams:
    """Linearized two-mode (cavity + mechanics) parameters.

    ``kappa`` and ``gamma`` are derived: ``kappa = kappa_ex + kappa_0`` and
    ``gamma = omega_m / q_m``.
    """

    delta: float
    kappa_ex: float
    kappa_0: float = 0.0
    g: float = 0.0
    eps: complex = 0j
    n_th: float = 0.0
    q_m: float = 1e5
    omega_m: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "eps", complex(self.eps))
        reals = dict(delta=self.delta, kappa_ex=self.kappa_ex, kappa_0=self.kappa_0,
                     g=self.g, n_th=self.n_th, q_m=self.q_m, omega_m=self.omega_m)
        for name, value in reals.items():
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if not (cmath.isfinite(self.eps)):
            raise ValueError(f"eps must be finite, got {self.eps!r}")
        if self.kappa_ex < 0 or self.kappa_0 < 0:
            raise ValueError("kappa_ex and kappa_0 must be >= 0")
        if self.kappa <= 0:
            raise ValueError("total kappa must be > 0")
        if self.q_m <= 0 or self.omega_m <= 0:
            raise ValueError("q_m and omega_m must be > 0")
        if self.g < 0:
            raise ValueError("g must be >= 0")
        if self.n_th < 0:
            raise ValueError("n_th must be >= 0")

    @classmethod
    def from_kappa(cls, kappa: float, delta: float, **kw) -> "ReducedParams":
        """Build with all dissipation assigned to the external channel."""
        kappa_0 = kw.pop("kappa_0", 0.0)
        return cls(delta=delta, kappa_ex=kappa - kappa_0, kappa_0=kappa_0, **kw)

    @property
    def kappa(self) -> float:
        return self.kappa_ex + self.kappa_0

    @property
    def gamma(self) -> float:
        return self.omega_m / self.q_m

    @property
    def cooperativity(self) -> float:
        return 4 * self.g**2 / (self.kappa * self.gamma)

    def replace(self, **changes) -> "ReducedParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class SchemeConfig:
    kind: Scheme = Scheme.IS
    squeeze_r: float = 0.0
    squeeze_phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Scheme(self.kind))
        if not (math.isfinite(self.squeeze_r) and math.isfinite(self.squeeze_phi)):
            raise ValueError("squeeze parameters must be finite")
        if self.squeeze_r < 0:
            raise ValueError(f"squeeze_r must be >= 0, got {self.squeeze_r}")
        if self.kind is not Scheme.SD and self.squeeze_r != 0:
            raise ValueError(f"squeeze_r must be 0 for scheme {self.kind.value}")

    def check(self, p: ReducedParams) -> None:
        """Raise if ``p`` is inconsistent with this scheme."""
        if self.kind in (Scheme.SB, Scheme.SD) and p.eps != 0:
            raise ValueError(f"scheme {self.kind.value} requires eps == 0")


SB = SchemeConfig(Scheme.SB)
IS = SchemeConfig(Scheme.IS)


@dataclass(frozen=True)
class StabilityVerdict:
    stable_eig: bool
    stable_closed_form: bool
    margin: float
    eigenvalues: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def agree(self) -> bool:
        return self.stable_eig == self.stable_closed_form


def build_drift(p: ReducedParams) -> np.ndarray:
    """Drift matrix of the fluctuations ``(a, a^dag, b, b^dag)``."""
    d, k, g, e = p.delta, p.kappa, p.g, p.eps
    wm, gam = p.omega_m, p.gamma
    top = np.array([
        [1j * d - k / 2, -2j * e, -1j * g, -1j * g],
        [0, 0, 0, 0],
        [-1j * g, -1j * g, -1j * wm - gam / 2, 0],
        [0, 0, 0, 0],
    ], dtype=complex)
    # Conjugate rows are written as exact conjugates of their partners so the
    # swap symmetry holds bit for bit.
    swap = [1, 0, 3, 2]
    top[1] = np.conj(top[0, swap])
    top[3] = np.conj(top[2, swap])
    return top


def squeezed_input_moments(r: float, phi: float) -> tuple[float, complex]:
    """Return ``(<a_in^dag a_in>, <a_in a_in>)`` for squeezed vacuum."""
    return math.sinh(r) ** 2, 0.5 * math.sinh(2 * r) * cmath.exp(2j * phi)


def build_diffusion(p: ReducedParams, s: SchemeConfig = IS) -> np.ndarray:
    """Noise matrix ``N_ij = <xi_i xi_j^dag>`` (delta-correlation weights).

    For SD the squeezed vacuum enters through the external port only; the
    intrinsic channel ``kappa_0`` always sees vacuum.
    """
    s.check(p)
    n_sq, m_sq = (0.0, 0j)
    if s.kind is Scheme.SD:
        n_sq, m_sq = squeezed_input_moments(s.squeeze_r, s.squeeze_phi)
    k_ex, k_0, gam, nth = p.kappa_ex, p.kappa_0, p.gamma, p.n_th
    N = np.zeros((4, 4), dtype=complex)
    N[0, 0] = k_ex * (n_sq + 1) + k_0
    N[1, 1] = k_ex * n_sq
    N[0, 1] = k_ex * m_sq
    N[1, 0] = np.conj(N[0, 1])
    N[2, 2] = gam * (nth + 1)
    N[3, 3] = gam * nth
    return N


def closed_form_ratio(p: ReducedParams) -> float:
    """Left-hand side of the closed-form stability inequality (< 1 is stable)."""
    er = p.eps.real
    optical = p.kappa**2 / 4 + p.delta**2 - 4 * abs(p.eps) ** 2
    mech = p.omega_m**2 + p.gamma**2 / 4
    return -4 * p.g**2 * p.omega_m * (p.delta + 2 * er) / (optical * mech)


def stability(p: ReducedParams) -> StabilityVerdict:
    """Eigenvalue test and closed-form test, both reported.

    The closed form only makes sense while the bare cavity is stable
    (``kappa^2/4 + delta^2 > 4|eps|^2``); that condition is included.
    """
    ev = np.linalg.eigvals(build_drift(p))
    margin = float(ev.real.max())
    optical_ok = p.kappa**2 / 4 + p.delta**2 - 4 * abs(p.eps) ** 2 > 0
    closed = bool(optical_ok and closed_form_ratio(p) < 1)
    return StabilityVerdict(stable_eig=margin < 0, stable_closed_form=closed,
                            margin=margin, eigenvalues=ev)


def g_max(p: ReducedParams) -> float:
    """Largest stable coupling at fixed ``delta`` and ``eps`` (closed form).

    Returns ``inf`` when the coupling never destabilizes the system and 0 when
    the bare cavity is already unstable.
    """
    optical = p.kappa**2 / 4 + p.delta**2 - 4 * abs(p.eps) ** 2
    if optical <= 0:
        return 0.0
    lever = -4 * p.omega_m * (p.delta + 2 * p.eps.real)
    if lever <= 0:
        return math.inf
    return math.sqrt(optical * (p.omega_m**2 + p.gamma**2 / 4) / lever)


def require_stable(p: ReducedParams) -> StabilityVerdict:
    v = stability(p)
    if not v.stable_eig:
        raise UnstableSystemError(
            f"operating point is unstable (max Re eig = {v.margin:.3e})", v)
    return v
