import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from squeezecool.model import (
    IS,
    SB,
    ReducedParams,
    Scheme,
    SchemeConfig,
    UnstableSystemError,
    build_diffusion,
    build_drift,
    closed_form_ratio,
    g_max,
    require_stable,
    stability,
)
from squeezecool.noise import optimal_eps

SWAP = [1, 0, 3, 2]


def test_derived_fields():
    p = ReducedParams(delta=-1.0, kappa_ex=3.0, kappa_0=1.0, q_m=1e4)
    assert p.kappa == 4.0
    assert p.gamma == 1e-4
    assert ReducedParams.from_kappa(5.0, -1.0, kappa_0=2.0).kappa_ex == 3.0


@pytest.mark.parametrize("kw", [
    dict(kappa_ex=0.0),
    dict(kappa_ex=-1.0),
    dict(g=-0.1),
    dict(n_th=-1.0),
    dict(q_m=0.0),
    dict(delta=math.nan),
    dict(eps=complex(math.inf, 0)),
])
def test_invalid_params_rejected(kw):
    base = dict(delta=-1.0, kappa_ex=4.0)
    base.update(kw)
    with pytest.raises(ValueError):
        ReducedParams(**base)


def test_scheme_invariants():
    with pytest.raises(ValueError):
        SchemeConfig(Scheme.IS, squeeze_r=0.5)
    with pytest.raises(ValueError):
        SchemeConfig(Scheme.SD, squeeze_r=-0.1)
    p = ReducedParams.from_kappa(4.0, -1.0, eps=0.1)
    with pytest.raises(ValueError):
        build_diffusion(p, SB)
    with pytest.raises(ValueError):
        build_diffusion(p, SchemeConfig(Scheme.SD, 0.3))


def test_decoupled_drift_eigenvalues():
    p = ReducedParams.from_kappa(4.0, -1.5)
    D = build_drift(p)
    assert np.all(D[:2, 2:] == 0) and np.all(D[2:, :2] == 0)
    ev = np.sort_complex(np.linalg.eigvals(D[:2, :2]))
    expected = np.sort_complex(np.array([1j * p.delta - 2.0, -1j * p.delta - 2.0]))
    np.testing.assert_allclose(ev, expected, atol=1e-14)


def test_pump_entry_hand_arithmetic():
    p = ReducedParams.from_kappa(4.0, -1.0, g=0.2, eps=0.5 - 1.0j, q_m=1e5)
    D = build_drift(p)
    assert D[0, 1] == -2.0 - 1.0j
    assert D[0, 0] == -2.0 - 1.0j
    assert D[0, 2] == D[0, 3] == -0.2j


def test_sideband_drift_has_no_pump_coupling():
    D = build_drift(ReducedParams.from_kappa(4.0, -1.0, g=0.3))
    assert D[0, 1] == 0 and D[1, 0] == 0


@settings(max_examples=200, deadline=None)
@given(delta=st.floats(-50, 50), kappa=st.floats(0.01, 100), g=st.floats(0, 20),
       er=st.floats(-30, 30), ei=st.floats(-30, 30), q=st.floats(1, 1e7))
def test_drift_conjugation_symmetry_bit_exact(delta, kappa, g, er, ei, q):
    p = ReducedParams.from_kappa(kappa, delta, g=g, eps=complex(er, ei), q_m=q)
    D = build_drift(p)
    for r in (0, 2):
        assert np.array_equal(D[r + 1], np.conj(D[r, SWAP]))


@settings(max_examples=100, deadline=None)
@given(r=st.floats(0, 2), phi=st.floats(-4, 4), k0=st.floats(0, 3))
def test_diffusion_hermitian_and_swap_symmetric(r, phi, k0):
    p = ReducedParams(delta=-2.0, kappa_ex=4.0, kappa_0=k0, n_th=3.0, q_m=100)
    N = build_diffusion(p, SchemeConfig(Scheme.SD, r, phi))
    np.testing.assert_allclose(N, N.conj().T, atol=0)
    # <xi xi^dag> - <xi^dag xi>-type swap: N_swap = conj transposed vacuum-shifted
    assert np.linalg.eigvalsh(N).min() >= -1e-12 * np.abs(N).max()


def test_vacuum_and_thermal_correlators():
    p = ReducedParams.from_kappa(4.0, -1.0, n_th=0.0, q_m=1e3)
    N = build_diffusion(p, SB)
    assert N[0, 0] == 4.0 and N[1, 1] == 0
    assert N[2, 2] == pytest.approx(p.gamma) and N[3, 3] == 0
    N2 = build_diffusion(p.replace(n_th=7.0), IS)
    assert N2[2, 2] == pytest.approx(8 * p.gamma) and N2[3, 3] == pytest.approx(7 * p.gamma)


def test_unsqueezed_sd_equals_sb():
    p = ReducedParams.from_kappa(4.0, -1.0, n_th=5.0)
    np.testing.assert_array_equal(build_diffusion(p, SchemeConfig(Scheme.SD, 0.0, 1.2)),
                                  build_diffusion(p, SB))


def test_intrinsic_loss_sees_vacuum():
    p = ReducedParams(delta=-1.0, kappa_ex=3.0, kappa_0=1.0)
    r = 0.7
    N = build_diffusion(p, SchemeConfig(Scheme.SD, r, 0.0))
    assert N[0, 0] == pytest.approx(3.0 * (math.sinh(r) ** 2 + 1) + 1.0)
    assert N[1, 1] == pytest.approx(3.0 * math.sinh(r) ** 2)


def test_decoupled_stable_both_tests():
    v = stability(ReducedParams.from_kappa(4.0, -1.0))
    assert v.stable_eig and v.stable_closed_form and v.margin < 0


def test_optimal_pump_edge_at_resonant_detuning():
    # at delta = -omega_m the bound is sqrt(-(2 delta + 1))/2 = 0.5
    p = ReducedParams.from_kappa(4.0, -1.0, q_m=1e5)
    p = p.replace(eps=optimal_eps(p))
    assert g_max(p) == pytest.approx(0.5, rel=1e-9)
    assert stability(p.replace(g=0.49)).stable_eig
    assert stability(p.replace(g=0.49)).stable_closed_form
    assert not stability(p.replace(g=0.51)).stable_eig
    assert not stability(p.replace(g=0.51)).stable_closed_form


def test_unstable_rejected_with_verdict():
    p = ReducedParams.from_kappa(4.0, -1.0, g=2.0)
    p = p.replace(eps=optimal_eps(p))
    with pytest.raises(UnstableSystemError) as exc:
        require_stable(p)
    assert exc.value.verdict is not None and exc.value.verdict.margin > 0


def test_bare_cavity_instability_caught_by_closed_form():
    # 4|eps|^2 > kappa^2/4 + delta^2: optical parametric oscillation
    p = ReducedParams.from_kappa(2.0, -0.5, eps=2.0)
    v = stability(p)
    assert not v.stable_eig and not v.stable_closed_form
    assert g_max(p) == 0.0


def test_stability_verdicts_agree_random():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(10_000):
        kappa = 10 ** rng.uniform(0, 3)
        delta = -rng.uniform(0, 10 * kappa)
        base = ReducedParams.from_kappa(kappa, delta, q_m=1e5)
        eps = optimal_eps(base)
        if abs(eps) > kappa:
            continue
        gm = g_max(base.replace(eps=eps))
        top = 2 * gm if math.isfinite(gm) and gm > 0 else kappa
        p = base.replace(eps=eps, g=rng.uniform(0, top))
        v = stability(p)
        if abs(v.margin) > 1e-9 * kappa:
            assert v.agree, p
            checked += 1
    assert checked > 1000


def test_closed_form_ratio_zero_without_coupling():
    assert closed_form_ratio(ReducedParams.from_kappa(4.0, -1.0)) == 0.0
