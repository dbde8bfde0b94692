"""Exchange-statistics modular expectations and the common-bath reduced
signal."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import BASE, base_constants, base_spec, golden_record, make_bath
from modvar.params import GaussianPacket, ParameterError, make_superposition
from modvar.two_particle import (
    CompanionState,
    StatisticsKind,
    early_time_model,
    gaussian_overlap,
    indistinguishable_norm,
    modular_indistinguishable,
    modular_mb,
    reduced_modular_common_bath,
    reduced_modular_components,
    translated_matrix_element,
)

MB, BE, FD = StatisticsKind.MB, StatisticsKind.BE, StatisticsKind.FD


def _packet_values(p, c, xs):
    s2 = p.sigma0**2
    norm = (2.0 * math.pi * s2) ** -0.25
    return norm * np.exp(-((xs - p.x0) ** 2) / (4.0 * s2) + 1j * p.p0 * (xs - p.x0) / c.hbar)


def test_overlap_normalization():
    c = base_constants()
    for p in (GaussianPacket(0.0, 0.0, 1.0), GaussianPacket(-3.0, 0.7, 1.6)):
        assert gaussian_overlap(p, p, c) == pytest.approx(1.0, abs=1e-14)


def test_overlap_against_quadrature():
    c = base_constants()
    pA = GaussianPacket(x0=-1.0, p0=0.4, sigma0=1.2)
    pB = GaussianPacket(x0=1.5, p0=-0.9, sigma0=0.8)

    def integrand_re(x):
        return (np.conj(_packet_values(pA, c, x)) * _packet_values(pB, c, x)).real

    def integrand_im(x):
        return (np.conj(_packet_values(pA, c, x)) * _packet_values(pB, c, x)).imag

    re, _ = quad(integrand_re, -15.0, 15.0, epsabs=1e-13)
    im, _ = quad(integrand_im, -15.0, 15.0, epsabs=1e-13)
    got = gaussian_overlap(pA, pB, c)
    assert got.real == pytest.approx(re, abs=1e-12)
    assert got.imag == pytest.approx(im, abs=1e-12)


def test_translated_element_against_quadrature():
    c = base_constants()
    pA = GaussianPacket(x0=-1.0, p0=0.4, sigma0=1.2)
    pB = GaussianPacket(x0=-4.5, p0=-0.9, sigma0=0.8)
    ell = 3.0

    def integrand(x, part):
        val = np.conj(_packet_values(pA, c, x)) * _packet_values(pB, c, x + ell)
        return val.real if part == "re" else val.imag

    re, _ = quad(integrand, -15.0, 15.0, args=("re",), epsabs=1e-13)
    im, _ = quad(integrand, -15.0, 15.0, args=("im",), epsabs=1e-13)
    got = translated_matrix_element(pA, pB, ell, c)
    assert got.real == pytest.approx(re, abs=1e-12)
    assert got.imag == pytest.approx(im, abs=1e-12)


def test_product_state_value():
    c = base_constants()
    for alpha in (0.0, math.pi / 4, 2.1):
        spec = base_spec(alpha)
        M = translated_matrix_element(spec.packetA, spec.packetB, spec.L, c)
        assert modular_mb(spec, c) == pytest.approx(0.5 * cmath.exp(1j * alpha) * M, abs=1e-15)


def test_product_state_rejects_overlapping_packets():
    c = base_constants()
    spec = make_superposition(L=2.0, sigma0=1.0, k=0.1, alpha=0.0)
    with pytest.raises(ParameterError):
        modular_mb(spec, c)


def test_symmetrization_norms():
    c = base_constants()
    spec = base_spec(0.0)
    assert indistinguishable_norm(spec, CompanionState("disjoint"), BE, c) == pytest.approx(
        1.0 / math.sqrt(2.0), rel=1e-14
    )
    assert indistinguishable_norm(spec, CompanionState("equals-B"), BE, c) == pytest.approx(
        1.0 / math.sqrt(3.0), rel=1e-14
    )
    assert indistinguishable_norm(spec, CompanionState("equals-B"), FD, c) == pytest.approx(
        1.0, rel=1e-14
    )
    with pytest.raises(ParameterError):
        indistinguishable_norm(spec, CompanionState("disjoint"), MB, c)


def test_tag_ratios():
    c = base_constants()
    spec = base_spec(math.pi / 4)
    mb = modular_mb(spec, c)
    disjoint = CompanionState("disjoint")
    same_b = CompanionState("equals-B")
    assert modular_indistinguishable(spec, disjoint, BE, c) == pytest.approx(0.5 * mb, rel=1e-14)
    assert modular_indistinguishable(spec, disjoint, FD, c) == pytest.approx(0.5 * mb, rel=1e-14)
    assert modular_indistinguishable(spec, same_b, BE, c) == pytest.approx(
        mb / math.sqrt(3.0), rel=1e-14
    )
    assert modular_indistinguishable(spec, same_b, FD, c) == pytest.approx(mb, rel=1e-14)
    # companion identical to the translated packet flips the role of the
    # conjugated element for fermions
    M = translated_matrix_element(spec.packetA, spec.packetB, spec.L, c)
    want_fd = -0.5 * cmath.exp(-1j * spec.alpha) * M.conjugate()
    assert modular_indistinguishable(spec, CompanionState("equals-A"), FD, c) == pytest.approx(
        want_fd, rel=1e-14
    )
    want_be = (
        0.5
        / math.sqrt(3.0)
        * (2.0 * cmath.exp(1j * spec.alpha) * M + cmath.exp(-1j * spec.alpha) * M.conjugate())
    )
    assert modular_indistinguishable(spec, CompanionState("equals-A"), BE, c) == pytest.approx(
        want_be, rel=1e-14
    )


def test_general_companion_far_away_matches_disjoint():
    c = base_constants()
    spec = base_spec(math.pi / 4)
    mb = modular_mb(spec, c)
    remote = CompanionState(GaussianPacket(x0=400.0, p0=0.0, sigma0=1.0))
    for s in (BE, FD):
        got = modular_indistinguishable(spec, remote, s, c)
        assert got == pytest.approx(0.5 * mb, rel=1e-10)


def test_general_companion_equal_to_right_packet():
    # the explicit-overlap branch keeps the full cross term, so BE lands on
    # mb/3 rather than the tag's mb/sqrt(3); FD coincides with the tag
    c = base_constants()
    spec = base_spec(math.pi / 4)
    mb = modular_mb(spec, c)
    chi = CompanionState(GaussianPacket(x0=spec.packetB.x0, p0=spec.packetB.p0, sigma0=spec.sigma0))
    got_fd = modular_indistinguishable(spec, chi, FD, c)
    assert got_fd == pytest.approx(mb, rel=1e-10)
    got_be = modular_indistinguishable(spec, chi, BE, c)
    assert got_be == pytest.approx(mb / 3.0, rel=1e-10)


@settings(max_examples=80, deadline=None)
@given(
    alpha=st.floats(0.0, 2.0 * math.pi),
    tag=st.sampled_from(["disjoint", "equals-B"]),
    s=st.sampled_from([MB, BE, FD]),
)
def test_translation_bound(alpha, tag, s):
    # |<T_L>| <= 1/2 for every single-packet-supported companion; the
    # equals-A BE branch is excluded because its closed form exceeds the
    # bound by construction
    c = base_constants()
    spec = base_spec(alpha)
    if s is MB:
        val = modular_mb(spec, c)
    else:
        val = modular_indistinguishable(spec, CompanionState(tag), s, c)
    assert abs(val) <= 0.5 + 1e-12


def test_fermionic_equal_companion_bounded():
    c = base_constants()
    for alpha in np.linspace(0.0, 2.0 * math.pi, 13):
        spec = base_spec(alpha)
        val = modular_indistinguishable(spec, CompanionState("equals-A"), FD, c)
        assert abs(val) <= 0.5 + 1e-12


def test_common_bath_initial_value():
    c = base_constants()
    for alpha in (0.0, math.pi / 4):
        spec = base_spec(alpha)
        b = make_bath(0.005, 15.0)
        want = 0.5 * math.exp(-0.5 * spec.k**2 * spec.sigma0**2) * math.cos(alpha)
        assert reduced_modular_common_bath(spec, b, c, 0.0) == pytest.approx(want, abs=1e-14)


def test_common_bath_frictionless_limit():
    # with the bath switched off the reduced signal is the unitary one
    from modvar.schrodinger import modular_expectation

    c = base_constants()
    spec = base_spec(math.pi / 4)
    b0 = make_bath(0.0, 2.0)
    for t in (0.0, 0.7, 2.0):
        assert reduced_modular_common_bath(spec, b0, c, t) == pytest.approx(
            modular_expectation(spec, c, t), abs=1e-14
        )


def test_common_bath_against_high_precision(goldens):
    params = {**BASE, "alpha": 0.0, "gamma": 0.005, "T": 15.0, "t": 2.0}
    (ref,), _oracle, tol = golden_record(goldens, "reduced_modular_common_bath", params)
    got = reduced_modular_common_bath(base_spec(0.0), make_bath(0.005, 15.0), base_constants(), 2.0)
    assert abs(got - ref) < tol


def test_common_bath_envelope_positive_and_decaying():
    c = base_constants()
    spec = base_spec(0.0)
    b = make_bath(0.005, 15.0)
    envs = [reduced_modular_components(spec, b, c, t)[0] for t in np.linspace(0.0, 2.0, 9)]
    assert all(e > 0.0 for e in envs)
    assert all(e0 > e1 for e0, e1 in zip(envs, envs[1:]))


def test_early_time_model_values():
    c = base_constants()
    spec = base_spec(math.pi / 2)
    b = make_bath(0.005, 15.0)
    model = early_time_model(spec, b, c)
    assert model.prefactor == pytest.approx(0.49750623959634116, rel=1e-14)
    assert model.linear_rate == pytest.approx(b.D * spec.L**2, rel=1e-14)
    assert model.linear_rate == pytest.approx(375.0, rel=1e-12)
    assert model.omega0 == pytest.approx(-149.975, rel=1e-12)
    assert model.envelope(0.01) == pytest.approx(0.011691380354137363, rel=1e-12)
    assert model.delta_phi(0.01) == pytest.approx(1.49975, rel=1e-12)


def test_early_time_model_tracks_full_signal():
    # envelope and phase drift agree with the exact components at small t
    c = base_constants()
    spec = base_spec(math.pi / 2)
    b = make_bath(0.005, 15.0)
    model = early_time_model(spec, b, c)
    for t in (1e-4, 1e-3):
        env, phase = reduced_modular_components(spec, b, c, t)
        assert model.envelope(t) == pytest.approx(env, rel=1e-4)
        assert model.delta_phi(t) == pytest.approx(phase - spec.alpha, rel=1e-4)


def test_unknown_companion_tag_rejected():
    with pytest.raises(ParameterError):
        CompanionState("equals-C")
