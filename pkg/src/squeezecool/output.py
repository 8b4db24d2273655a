"""Intracavity and output quadrature spectra of the fundamental mode.

Fourier convention ``a(t) = int dw/2pi a(w) e^{-iwt}``, so ``a^dag(w)`` is
the transform of ``a^dag(t)`` and equals ``[a(-w)]^dag``.  The input-output
relation is ``a_out = a_in + sqrt(kappa) a``, consistent with the Langevin
input term ``-sqrt(kappa) a_in``; the empty cavity then returns vacuum,
``S_XX = 1``.

The quadrature is ``X = a e^{i theta} + a^dag e^{-i theta}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import IS, ReducedParams, UnstableSystemError, build_drift, stability
from .moments import steady_state
from .noise import default_grid

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class TransferCoefficients:
    """``a(w) = A1 a_in(w) + A2 a_in^dag(w) + B1 b_in(w) + B2 b_in^dag(w)``."""

    omega: float
    a1_coef: complex
    a2_coef: complex
    b1_coef: complex
    b2_coef: complex
    m_det: complex
    singular: bool = False


def _input_weights(p: ReducedParams) -> np.ndarray:
    sk, sg = math.sqrt(p.kappa), math.sqrt(p.gamma)
    return np.array([-sk, -sk, -sg, -sg])


def transfer(omega: float, p: ReducedParams) -> TransferCoefficients:
    """Transfer functions from a direct solve of ``(-i w - D) V = xi``.

    ``singular`` is set when the system matrix is numerically singular
    (only possible on unstable operating points).
    """
    D = build_drift(p)
    K = -1j * omega * np.eye(4) - D
    det = np.linalg.det(K)
    scale = np.prod(np.abs(np.diag(K))) or 1.0
    singular = abs(det) < SINGULAR_TOL * scale
    if singular:
        nan = complex("nan")
        return TransferCoefficients(omega, nan, nan, nan, nan, _m_det(omega, p), True)
    row = np.linalg.solve(K, np.eye(4))[0] * _input_weights(p)
    return TransferCoefficients(omega, complex(row[0]), complex(row[1]), complex(row[2]),
                                complex(row[3]), _m_det(omega, p))


def _chi_c_inv(w, p):
    return p.kappa / 2 - 1j * (w + p.delta)


def _chi_m(w, p):
    return 1.0 / (p.gamma / 2 - 1j * (w - p.omega_m))


def _h(w, p):
    return p.g**2 * (_chi_m(w, p) - np.conj(_chi_m(-w, p)))


def _m_det(w, p):
    h = _h(w, p)
    e = p.eps
    return ((_chi_c_inv(w, p) + h) * (np.conj(_chi_c_inv(-w, p)) - h)
            - (h + 2j * e) * (-h - 2j * np.conj(e)))


def transfer_closed_form(omega: float, p: ReducedParams) -> TransferCoefficients:
    """Closed-form transfer functions after eliminating the mechanics.

    ``chi_m(w) = 1/(gamma/2 - i(w - omega_m))`` enters the mechanical
    response ``H = G^2 (chi_m(w) - chi_m^*(-w))``; ``chi_c^{-1}`` is the
    inverse optical response.  Used as a cross-check of :func:`transfer`.
    """
    w = omega
    h = _h(w, p)
    m = _m_det(w, p)
    sk, sg = math.sqrt(p.kappa), math.sqrt(p.gamma)
    ccm = np.conj(_chi_c_inv(-w, p))
    a1 = -sk * (ccm - h) / m
    a2 = -sk * (-h - 2j * p.eps) / m
    common = ccm + 2j * p.eps
    b1 = 1j * p.g * sg * _chi_m(w, p) * common / m
    b2 = 1j * p.g * sg * np.conj(_chi_m(-w, p)) * common / m
    return TransferCoefficients(omega, complex(a1), complex(a2), complex(b1),
                                complex(b2), complex(m))


@dataclass(frozen=True)
class QuadratureSpectrum:
    omega: np.ndarray
    theta: float
    s_xx: np.ndarray
    theta_opt: np.ndarray
    r_mag: np.ndarray


def _coefficients(omega, p, output):
    """Stack of ``(C1, C2, C3, C4)`` at each frequency (shape ``(n, 4)``)."""
    D = build_drift(p)
    wts = _input_weights(p)
    out = np.empty((len(omega), 4), dtype=complex)
    for i, w in enumerate(omega):
        out[i] = np.linalg.solve(-1j * w * np.eye(4) - D, np.eye(4))[0] * wts
    if output:
        out *= math.sqrt(p.kappa)
        out[:, 0] += 1.0
    return out


def _assemble(p, omega, theta, output):
    if not stability(p).stable_eig:
        raise UnstableSystemError("quadrature spectrum requires a stable operating point")
    w = np.asarray(omega, dtype=float)
    cp = _coefficients(w, p, output)
    cm = _coefficients(-w, p, output)
    n = p.n_th
    s1 = (np.abs(cp[:, 0]) ** 2 + np.abs(cm[:, 1]) ** 2
          + (n + 1) * (np.abs(cp[:, 2]) ** 2 + np.abs(cm[:, 3]) ** 2)
          + n * (np.abs(cp[:, 3]) ** 2 + np.abs(cm[:, 2]) ** 2))
    q = cp[:, 0] * cm[:, 1] + (n + 1) * cp[:, 2] * cm[:, 3] + n * cp[:, 3] * cm[:, 2]
    s_xx = s1 + 2 * np.real(np.exp(2j * theta) * q)
    phi = np.angle(np.conj(q))
    theta_opt = np.mod((phi - np.pi) / 2, np.pi)
    s_min = s1 - 2 * np.abs(q)
    with np.errstate(divide="ignore"):
        r_mag = np.log(s_min)
    return QuadratureSpectrum(w, float(theta), s_xx, theta_opt, r_mag)


def output_quadrature_spectrum(p: ReducedParams, theta: float = 0.0,
                               omega=None) -> QuadratureSpectrum:
    """Output-field quadrature spectrum with the optimal phase and squeezing.

    ``S_XX = S1 + 2 Re(e^{2i theta} Q)``; the minimum over ``theta`` is
    ``S1 - 2|Q|``, reached at ``theta_opt = (phi - pi)/2`` with
    ``phi = arg Q^*``.  ``r_mag`` is the natural log of that minimum
    (negative means squeezed below shot noise).

    Raises
    ------
    UnstableSystemError
        For unstable operating points.
    """
    w = default_grid(p) if omega is None else omega
    return _assemble(p, w, theta, output=True)


def intracavity_quadrature_spectrum(p: ReducedParams, theta: float = 0.0,
                                    omega=None) -> QuadratureSpectrum:
    """Same as :func:`output_quadrature_spectrum` for the intracavity field.

    Its integral ``int S dw / 2pi`` is the stationary ``<X^2>`` (1 for vacuum).
    """
    w = default_grid(p) if omega is None else omega
    return _assemble(p, w, theta, output=False)


def intracavity_variance(p: ReducedParams, theta: float = 0.0, s=None) -> float:
    """Stationary ``<X^2>`` of the intracavity quadrature from the moment solver."""
    st = steady_state(p, IS if s is None else s)
    return float(1 + 2 * np.real(st.naa) + 2 * np.real(np.exp(2j * theta) * st.aa))
