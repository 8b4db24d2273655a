import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from squeezecool.model import ReducedParams, UnstableSystemError, build_drift
from squeezecool.moments import steady_state
from squeezecool.noise import chi, optimal_eps
from squeezecool.output import (
    intracavity_quadrature_spectrum,
    intracavity_variance,
    output_quadrature_spectrum,
    transfer,
    transfer_closed_form,
)


def point(kappa=8.0, delta=-3.0, g=0.5, n_th=2.0, q_m=1e3, opt=True):
    p = ReducedParams.from_kappa(kappa, delta, g=g, n_th=n_th, q_m=q_m)
    return p.replace(eps=optimal_eps(p)) if opt else p


def test_empty_cavity_transfer():
    p = ReducedParams.from_kappa(4.0, -1.5)
    for w in (-3.0, 0.0, 1.0, 2.5):
        t = transfer(w, p)
        assert t.a1_coef == pytest.approx(-math.sqrt(p.kappa) * chi(w, p), rel=1e-14)
        assert t.a2_coef == 0 and t.b1_coef == 0 and t.b2_coef == 0


def test_transfer_reconstruction_solves_langevin_system():
    p = point()
    D = build_drift(p)
    for w in (-2.0, -1.0, 0.3, 1.0, 5.0):
        t = transfer(w, p)
        # a(w) from unit a_in(w): every fluctuation satisfies (-iw - D) V = xi
        K = -1j * w * np.eye(4) - D
        v = np.linalg.solve(K, np.array([-math.sqrt(p.kappa), 0, 0, 0]))
        assert v[0] == pytest.approx(t.a1_coef, rel=1e-12)
        assert np.linalg.norm(K @ v - [-math.sqrt(p.kappa), 0, 0, 0]) < 1e-10


def test_closed_form_transfer_matches_solve():
    rng = np.random.default_rng(5)
    for _ in range(300):
        kappa = 10 ** rng.uniform(0, 2)
        p = ReducedParams.from_kappa(kappa, -rng.uniform(0.1, 2) * kappa,
                                     g=rng.uniform(0, 0.3), n_th=5.0, q_m=1e3)
        p = p.replace(eps=optimal_eps(p) * rng.uniform(0, 1))
        w = rng.uniform(-3 * kappa, 3 * kappa)
        a, b = transfer(w, p), transfer_closed_form(w, p)
        for f in ("a1_coef", "a2_coef", "b1_coef", "b2_coef"):
            x, y = getattr(a, f), getattr(b, f)
            assert abs(x - y) <= 1e-10 * max(abs(x), 1e-12), f


def test_empty_cavity_output_is_vacuum():
    p = ReducedParams.from_kappa(4.0, -1.5, n_th=7.0)
    for theta in (0.0, 0.4, 2.0):
        q = output_quadrature_spectrum(p, theta, np.linspace(-10, 10, 41))
        np.testing.assert_allclose(q.s_xx, 1.0, atol=1e-13)


def test_optimal_angle_matches_scan():
    p = point()
    w = np.array([0.0, 0.5, 1.0, 3.0])
    q = output_quadrature_spectrum(p, 0.0, w)
    for i, wi in enumerate(w):
        def f(th):
            return output_quadrature_spectrum(p, th, np.array([wi])).s_xx[0]
        res = minimize_scalar(f, bounds=(q.theta_opt[i] - 0.5, q.theta_opt[i] + 0.5),
                              method="bounded", options=dict(xatol=1e-10))
        assert math.remainder(res.x - q.theta_opt[i], math.pi) == pytest.approx(0, abs=1e-6)
        assert f(q.theta_opt[i]) == pytest.approx(math.exp(q.r_mag[i]), rel=1e-10)
        thetas = np.linspace(0, math.pi, 721)
        scan = [f(t) for t in thetas]
        assert min(scan) >= math.exp(q.r_mag[i]) * (1 - 1e-12)


def test_spectrum_positive():
    p = point()
    for theta in np.linspace(0, math.pi, 7):
        assert np.all(output_quadrature_spectrum(p, theta).s_xx > 0)
        assert np.all(intracavity_quadrature_spectrum(p, theta).s_xx >= 0)


def test_intracavity_integral_matches_moments():
    p = point()

    def f(w, theta):
        return intracavity_quadrature_spectrum(p, theta, np.array([w])).s_xx[0]

    for theta in (0.0, 1.0):
        parts = [quad(f, -np.inf, -50, args=(theta,))[0],
                 quad(f, -50, 50, args=(theta,), points=[-1.0, 1.0], limit=400,
                      epsabs=1e-12)[0],
                 quad(f, 50, np.inf, args=(theta,))[0]]
        integral = sum(parts) / (2 * math.pi)
        assert integral == pytest.approx(intracavity_variance(p, theta), rel=1e-6)
    x = steady_state(p)
    assert intracavity_variance(p, 0.0) == pytest.approx(
        1 + 2 * x.naa + 2 * (x.aa).real, rel=1e-12)


def test_pump_suppresses_intracavity_quadrature():
    with_pump = intracavity_variance(point(), 0.0)
    without = intracavity_variance(point(opt=False), 0.0)
    assert with_pump < 1.0 < without


def test_unstable_point_rejected():
    p = ReducedParams.from_kappa(4.0, -1.0, g=2.0)
    with pytest.raises(UnstableSystemError):
        output_quadrature_spectrum(p.replace(eps=optimal_eps(p)))
