import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import solve_continuous_lyapunov

from squeezecool.limits import analytic_limit, scheme_min
from squeezecool.model import (
    IS,
    SB,
    ReducedParams,
    Scheme,
    SchemeConfig,
    UnstableSystemError,
    build_diffusion,
    build_drift,
)
from squeezecool.moments import (
    MOMENT_NAMES,
    MomentState,
    PhysicalityError,
    check_state,
    default_initial_state,
    evolve,
    moment_rhs,
    phonon_number,
    physicality_margin,
    steady_state,
)
from squeezecool.noise import optimal_eps


def hand_rhs(x: MomentState, p: ReducedParams) -> dict:
    """Six moment equations written out by hand (vacuum optical input)."""
    G, e, D, k, w, g, n = p.g, p.eps, p.delta, p.kappa, p.omega_m, p.gamma, p.n_th
    ec = np.conj(e)
    return {
        "naa": -1j * G * (x.adb - x.abd + x.adbd - x.ab) - 2j * (e * x.adad - ec * x.aa)
               - k * x.naa,
        "nbb": -1j * G * (-x.adb + x.abd + x.adbd - x.ab) - g * x.nbb + g * n,
        "adb": (-1j * (D + w) - (k + g) / 2) * x.adb
               - 1j * G * (x.naa - x.nbb + x.adad - x.bb) + 2j * ec * x.ab,
        "ab": (1j * (D - w) - (k + g) / 2) * x.ab
              - 1j * G * (x.naa + x.nbb + x.aa + x.bb + 1) - 2j * e * x.adb,
        "aa": (2j * D - k) * x.aa - 2j * G * (x.ab + x.abd) - 2j * e * (2 * x.naa + 1),
        "bb": (-2j * w - g) * x.bb - 2j * G * (x.adb + x.ab),
    }


def random_state(rng):
    z = rng.normal(size=10) + 1j * rng.normal(size=10)
    return MomentState.from_vector(z)


def random_params(rng):
    kappa = 10 ** rng.uniform(-1, 2)
    return ReducedParams.from_kappa(kappa, rng.uniform(-3 * kappa, 3 * kappa),
                                    g=rng.uniform(0, 3), eps=complex(*rng.normal(0, 1, 2)),
                                    n_th=rng.uniform(0, 100), q_m=10 ** rng.uniform(1, 6))


def test_rhs_matches_hand_written_equations():
    rng = np.random.default_rng(3)
    for _ in range(500):
        x, p = random_state(rng), random_params(rng)
        got = moment_rhs(x, p)
        for name, val in hand_rhs(x, p).items():
            ref = getattr(got, name)
            assert abs(ref - val) <= 1e-12 * max(1.0, abs(val)), name


def test_rhs_conjugate_pairs_on_conjugate_symmetric_state():
    rng = np.random.default_rng(4)
    for _ in range(100):
        z = rng.normal(size=4) + 1j * rng.normal(size=4)
        x = MomentState(abs(z[0]), abs(z[1]), z[2], np.conj(z[2]), z[3], np.conj(z[3]),
                        z[0], np.conj(z[0]), z[1], np.conj(z[1]))
        d = moment_rhs(x, random_params(rng))
        assert d.conjugate_defect() <= 1e-12 * max(1.0, np.abs(d.vector()).max())


@pytest.mark.parametrize("scheme", [IS, SB, SchemeConfig(Scheme.SD, 0.6, 0.4)])
def test_steady_state_solves_lyapunov_equation(scheme):
    p = ReducedParams.from_kappa(8.0, -3.0, g=0.5, n_th=20.0, q_m=1e3)
    if scheme.kind is Scheme.IS:
        p = p.replace(eps=optimal_eps(p))
    D, N = build_drift(p), build_diffusion(p, scheme)
    sigma = solve_continuous_lyapunov(D, -N)
    np.testing.assert_allclose(steady_state(p, scheme).covariance(), sigma,
                               atol=1e-9 * np.abs(sigma).max())


def test_uncoupled_mechanics_relaxes_to_bath():
    p = ReducedParams.from_kappa(4.0, -1.0, n_th=50.0, q_m=10.0)
    tr = evolve(MomentState.thermal(0.0, 5.0), p, SB, t_final=40.0, n_samples=21)
    expected = 50.0 + (5.0 - 50.0) * np.exp(-p.gamma * tr.times)
    np.testing.assert_allclose(tr.nbb_series, expected, rtol=1e-7)
    np.testing.assert_allclose(tr.naa_series, 0.0, atol=1e-12)
    assert steady_state(p, SB).nbb == pytest.approx(50.0, rel=1e-12)


def test_squeezed_input_fills_cavity_without_coupling():
    r = 0.8
    p = ReducedParams.from_kappa(3.0, -1.0, n_th=0.0, q_m=100)
    x = steady_state(p, SchemeConfig(Scheme.SD, r, 0.3))
    assert np.real(x.naa) == pytest.approx(math.sinh(r) ** 2, rel=1e-12)


def test_trajectory_reaches_steady_state():
    p = ReducedParams.from_kappa(4.0, -2.0, g=0.3, n_th=10.0, q_m=50.0)
    p = p.replace(eps=optimal_eps(p))
    tr = evolve(default_initial_state(p), p, t_final=2000.0, n_samples=5, method="expm")
    ss = steady_state(p)
    np.testing.assert_allclose(tr.states[-1].vector(), ss.vector(), atol=1e-9)
    tr2 = evolve(default_initial_state(p), p, t_final=50.0, n_samples=11)
    tr3 = evolve(default_initial_state(p), p, t_final=50.0, n_samples=11, method="expm")
    np.testing.assert_allclose(tr2.nbb_series, tr3.nbb_series, rtol=1e-7)


def test_unstable_point_has_no_steady_state():
    p = ReducedParams.from_kappa(4.0, -1.0, g=2.0)
    with pytest.raises(UnstableSystemError):
        steady_state(p.replace(eps=optimal_eps(p)))
    assert phonon_number(p.replace(eps=optimal_eps(p))) == math.inf


def test_physicality_checks():
    check_state(MomentState.thermal(0.0, 3.0))
    assert physicality_margin(MomentState.thermal(0.0, 0.0)) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(PhysicalityError):
        check_state(MomentState.thermal(-0.5, 0.0))
    bad = MomentState(0.0, 0.0, 0j, 0j, 0j, 0j, 2.0, 2.0, 0j, 0j)  # |<aa>|^2 > n(n+1)
    with pytest.raises(PhysicalityError):
        check_state(bad)
    broken = MomentState(0.0, 0.0, 0.1j, 0.1j, 0j, 0j, 0j, 0j, 0j, 0j)
    with pytest.raises(PhysicalityError):
        check_state(broken)
    assert len(MOMENT_NAMES) == 10


@settings(max_examples=60, deadline=None)
@given(kappa=st.floats(0.5, 50), dfrac=st.floats(-2, -0.05), gfrac=st.floats(0, 0.9),
       n_th=st.floats(0, 1e3))
def test_stable_steady_states_are_physical(kappa, dfrac, gfrac, n_th):
    p = ReducedParams.from_kappa(kappa, dfrac * kappa, n_th=n_th, q_m=1e3)
    p = p.replace(eps=optimal_eps(p))
    if 4 * abs(p.eps) ** 2 >= p.kappa**2 / 4 + p.delta**2:
        return
    from squeezecool.model import g_max
    gm = g_max(p)
    if not gm > 0 or not math.isfinite(gm):
        return
    x = steady_state(p.replace(g=gfrac * gm))  # checks physicality
    assert np.real(x.nbb) >= 0


def test_is_optimum_matches_limit():
    m = scheme_min(Scheme.IS, 400.0, 1e3, 1e5)
    assert m.n_min == pytest.approx(0.12)
    p, s = m.params(400.0, 1e3, 1e5)
    n = phonon_number(p, s)
    assert n == pytest.approx(0.12, rel=0.1)
    assert analytic_limit(p).n_f == pytest.approx(n, rel=0.05)


def test_squeezed_drive_optimum_matches_limit():
    # kappa n_th / (4 omega_m Q_m) = 0.2 puts the closed-form minimum at one phonon
    m = scheme_min(Scheme.SD, 400.0, 200.0, 1e5)
    assert m.n_min == pytest.approx(1.0)
    p, s = m.params(400.0, 200.0, 1e5)
    assert phonon_number(p, s) == pytest.approx(1.0, rel=0.05)
