"""Bohr-Sommerfeld levels, leading-order widths and the quantization condition."""

import math

import pytest

from predissoc import (
    EnergyWindow,
    PotentialSystem,
    action,
    action_derivative,
    agmon_distance,
    bohr_sommerfeld_levels,
    crossing_data,
    phase_integrals,
    quantization_residual,
    resonance_estimates,
    solve_quantization,
    transition_elements,
    width_from_parts,
    width_leading,
)
from predissoc.errors import DegenerateEnergy, NewtonDivergence

from conftest import V1_WELL, V2_TAIL


def test_harmonic_levels_exact(harmonic):
    """x^2 has A(E) = pi E / 2, so e_k = (2k+1) h exactly."""
    levels = bohr_sommerfeld_levels(harmonic, 0.05, EnergyWindow(0.35, 0.25))
    assert [k for k, _ in levels] == [1, 2, 3, 4, 5]
    for k, e_k in levels:
        assert e_k == pytest.approx((2 * k + 1) * 0.05, abs=1e-9)


def test_level_positions_and_indices(coupled, window):
    assert bohr_sommerfeld_levels(coupled, 0.2, window) == []
    lv14 = bohr_sommerfeld_levels(coupled, 0.14, window)
    assert [k for k, _ in lv14] == [2, 3]
    assert lv14[0][1] == pytest.approx(0.8941045636781098, rel=1e-12)
    assert lv14[1][1] == pytest.approx(1.1942460899046365, rel=1e-12)
    lv10 = bohr_sommerfeld_levels(coupled, 0.1, window)
    assert [k for k, _ in lv10] == [3, 4]
    assert lv10[0][1] == pytest.approx(0.8941045636781098, rel=1e-12)
    assert lv10[1][1] == pytest.approx(1.112094553022075, rel=1e-12)


def test_levels_satisfy_quantization(coupled, window):
    for h in (0.14, 0.1):
        for k, e_k in bohr_sommerfeld_levels(coupled, h, window):
            assert action(coupled, e_k) == pytest.approx(
                (k + 0.5) * math.pi * h, abs=1e-12)


def test_empty_window_below_well(coupled):
    assert bohr_sommerfeld_levels(coupled, 0.1, EnergyWindow(-0.5, 0.2)) == []


def test_width_formula_synthetic_value():
    # hand evaluation: -(h^2 pi/4)(2/pi) e^{-10} (1)(1/2)(1)^2 = -e^{-10}/200
    width, parts = width_from_parts(
        h=0.1, a_prime=math.pi / 2.0, s_agmon=0.5,
        v1_minus_e=1.0, slope_gap=2.0, r0_at_0=1.0, r1_at_0=0.0)
    assert width == pytest.approx(-1.1349982440621213e-7, rel=1e-12)
    assert set(parts) == {"h2pi4", "Aprime_inv", "exp_factor",
                          "v1_minus_e_pow", "dV_inv", "coupling_sq"}
    assert width == -(parts["h2pi4"] * parts["Aprime_inv"] * parts["exp_factor"]
                      * parts["v1_minus_e_pow"] * parts["dV_inv"]
                      * parts["coupling_sq"])


def test_width_h_structure():
    """width / (h^2 e^{-2S/h}) is h-independent for fixed geometry."""
    def scale_free(h):
        width, _ = width_from_parts(h, 1.3, 0.7, 0.9, 2.1, 0.8, 0.4)
        return width / (h * h * math.exp(-2.0 * 0.7 / h))
    assert scale_free(0.1) == pytest.approx(scale_free(0.23), rel=1e-12)


def test_width_values_on_reference_instance(coupled):
    w14, _ = width_leading(coupled, 0.14, 1.1942460899046365)
    assert w14 == pytest.approx(-6.886730309522242e-10, rel=1e-10)
    w10, parts = width_leading(coupled, 0.1, 1.112094553022075)
    assert w10 == pytest.approx(-2.0100765131147077e-14, rel=1e-10)
    assert w10 < 0
    assert parts["exp_factor"] == pytest.approx(
        math.exp(-2.0 * agmon_distance(coupled, 1.112094553022075) / 0.1), rel=1e-12)


def test_width_coupling_square_scaling():
    base = PotentialSystem.from_strings(V1_WELL, V2_TAIL, r0="1", r1="0")
    double = PotentialSystem.from_strings(V1_WELL, V2_TAIL, r0="2", r1="0")
    scaled = PotentialSystem.from_strings(V1_WELL, V2_TAIL, r0="1.7", r1="0")
    e_k = 1.1120945530220750
    w1, _ = width_leading(base, 0.1, e_k)
    w2, _ = width_leading(double, 0.1, e_k)
    w17, _ = width_leading(scaled, 0.1, e_k)
    assert w2 / w1 == 4.0  # doubling the coupling scales the width exactly
    assert w17 / w1 == pytest.approx(1.7 ** 2, rel=1e-15)


def test_width_degenerate_energy_raises(coupled):
    with pytest.raises(DegenerateEnergy):
        width_leading(coupled, 0.1, 1.96336871)


def test_estimates_compose_width_leading(coupled, window):
    estimates, skipped = resonance_estimates(coupled, 0.1, window)
    assert skipped == []
    assert [est.k for est in estimates] == [3, 4]
    for est in estimates:
        width, parts = width_leading(coupled, 0.1, est.e_k)
        assert est.width == width
        assert est.prefactor_parts == parts
        assert est.s_at_ek == agmon_distance(coupled, est.e_k)
        assert est.h == 0.1
    empty, none_skipped = resonance_estimates(coupled, 0.1, EnergyWindow(-1.0, 0.3))
    assert empty == [] and none_skipped == []


def test_transition_elements_identity(coupled):
    """|t23 t32| equals the direct product of its factor closed form."""
    energy, h = 1.0, 0.2
    t = transition_elements(coupled, energy, h)
    cd = crossing_data(coupled)
    ph = phase_integrals(coupled, energy, h)
    v1me = cd.v1_at_0 - energy
    coupling = cd.r0_at_0 + cd.r1_at_0 * math.sqrt(v1me)
    expected = (h * math.pi * math.exp(ph.b1 + ph.b2 - ph.a1 - ph.a2)
                / math.sqrt(v1me) / cd.slope_gap * coupling ** 2)
    assert abs(t.t23 * t.t32) == pytest.approx(expected, rel=1e-12)


def test_transition_elements_structure(coupled, decoupled):
    t = transition_elements(coupled, 1.0, 0.25)
    ph = phase_integrals(coupled, 1.0, 0.25)
    assert t.t12 == complex(math.exp(ph.a1 + ph.b1))
    assert t.t34 == complex(math.exp(ph.a2 + ph.b2))
    assert t.t12.real > 0 and t.t34.real > 0
    assert t.t23.real < 0 < t.t32.real
    assert t.t23.imag == 0.0 and t.t32.imag == 0.0
    off = transition_elements(decoupled, 1.0, 0.25)
    assert off.t23 == 0.0 and off.t32 == 0.0


def test_quantization_residual_at_level(coupled):
    """At e_k the cosine term collapses and the residual is the -hF term."""
    h, e_k = 0.14, 1.1942460899046365
    res = quantization_residual(coupled, e_k, h)
    # independent reconstruction of |hF| from the factor closed form
    cd = crossing_data(coupled)
    ph = phase_integrals(coupled, e_k, h)
    v1me = cd.v1_at_0 - e_k
    hf = (h * (math.pi / 4.0) * math.exp(-2.0 * ph.a1 - 2.0 * ph.a2)
          / math.sqrt(v1me) / cd.slope_gap * (cd.r0_at_0 ** 2))
    # k = 3 is odd, so sin(A/h) = -1 there and the residual is +i hf
    assert res.value.imag == pytest.approx(hf, rel=1e-9)
    assert abs(res.value.real) <= 1e-11
    assert res.dvalue_dE.imag == 0.0
    assert res.dvalue_dE.real == pytest.approx(
        action_derivative(coupled, e_k) / h, rel=1e-9)


def test_quantization_residual_derivative_consistency(coupled):
    h, e0 = 0.14, 1.19
    d = 1e-6
    base = quantization_residual(coupled, e0, h)
    plus = quantization_residual(coupled, e0 + d, h)
    minus = quantization_residual(coupled, e0 - d, h)
    fd = (plus.value - minus.value) / (2.0 * d)
    assert base.dvalue_dE == pytest.approx(fd, rel=1e-6)
    # imaginary displacements enter through the same linearization
    up = quantization_residual(coupled, e0 + 1e-8j, h)
    assert (up.value - base.value) / 1e-8j == pytest.approx(base.dvalue_dE, rel=1e-6)


def test_solve_quantization_matches_width_formula(coupled):
    for h, k, level, width in (
        (0.1, 3, 0.8941045636781098, -6.092415849496159e-19),
        (0.1, 4, 1.1120945530220750, -2.0100765131147077e-14),
        (0.2, 1, 0.7785802023061940, -1.9394986342685014e-12),
    ):
        res = solve_quantization(coupled, h, k)
        assert res.k == k
        assert res.level == pytest.approx(level, rel=1e-12)
        assert res.offset.real == 0.0  # the real part must not move
        assert res.width == pytest.approx(width, rel=1e-9)
        assert res.iterations <= 5
        assert abs(res.residual) <= res.residual_tol
        assert res.energy == res.level + res.offset


def test_solve_quantization_decoupled_is_exact(decoupled):
    res = solve_quantization(decoupled, 0.1, 4)
    assert res.offset == 0j
    assert res.iterations == 0
    assert res.width == 0.0
    assert res.energy == res.level


def test_solve_quantization_out_of_range(coupled):
    with pytest.raises(NewtonDivergence):
        solve_quantization(coupled, 0.1, 5000)
    with pytest.raises(NewtonDivergence):
        solve_quantization(coupled, 0.1, -1)
