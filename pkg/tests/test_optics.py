import math

import pytest
from hypothesis import given, strategies as st

from photontriplets.errors import ConfigError, DomainError
from photontriplets.optics import (
    CONST,
    BeamGeometry,
    CrystalConfig,
    OpticalMode,
    Role,
    angular_frequency,
    energy_to_field,
    field_to_energy,
    kappa,
    overlap_factor,
    phase_mismatch,
    photons_per_second,
    spectral_width_to_rad,
    vacuum_field_amplitude,
)

# frozen from an independent 30-digit evaluation (mpmath, literal CODATA 2018 values)
OMEGA_532 = 3.540698434791077e15
OMEGA_1654 = 1.138846171287094e15
DW_356_1654 = 2.451204576651786e12
FIELD_19p3 = 4.93819540868176e8
GAMMA_CORRECTED = 0.5762034541436775

PUMP_GEOM = BeamGeometry(47.5e-6, 15e-12, 10.0)


def mode(role, lam_nm, n, dw=0.0, axis="y"):
    return OpticalMode(role, lam_nm * 1e-9, n, axis, dw)


def test_constants_are_codata_2018():
    assert CONST.c == 299_792_458.0
    assert CONST.eps0 == 8.8541878128e-12
    assert CONST.hbar == 1.054571817e-34
    with pytest.raises(AttributeError):
        CONST.c = 3e8


class TestModes:
    def test_invalid_mode_values(self):
        with pytest.raises(ConfigError):
            mode("pump", -532, 1.8)
        with pytest.raises(ConfigError):
            mode("pump", 532, 0.9)
        with pytest.raises(ConfigError):
            mode("pump", 532, 1.8, dw=-1)
        with pytest.raises(ValueError):
            mode("laser", 532, 1.8)

    def test_geometry_and_crystal_positive(self):
        with pytest.raises(ConfigError):
            BeamGeometry(0, 1e-12, 10)
        with pytest.raises(ConfigError):
            CrystalConfig(0.01, 0)


class TestAngularFrequency:
    def test_ktp_wavelengths(self):
        assert angular_frequency(mode("pump", 532, 1.79)) == pytest.approx(OMEGA_532, rel=1e-14)
        assert angular_frequency(mode("signal", 1654, 1.732)) == pytest.approx(OMEGA_1654, rel=1e-14)

    def test_decreases_towards_zero(self):
        ws = [angular_frequency(mode("pump", lam, 1.5)) for lam in (500, 1e3, 1e5, 1e9, 1e15)]
        assert all(a > b for a, b in zip(ws, ws[1:]))
        assert ws[-1] < 1e4


class TestSpectralWidth:
    def test_pump_and_stimulation_widths(self):
        assert spectral_width_to_rad(0.5e-9, 532e-9) == pytest.approx(3.33e12, rel=5e-3)
        assert spectral_width_to_rad(3.2e-9, 1491e-9) == pytest.approx(2.71e12, rel=5e-3)

    def test_signal_width_from_wavelength(self):
        # the quoted 2.489e12 rad/s and 3.56 nm agree only to rounding of the linewidth
        got = spectral_width_to_rad(3.56e-9, 1654e-9)
        assert got == pytest.approx(DW_356_1654, rel=1e-12)
        assert got == pytest.approx(2.489e12, rel=0.02)

    @pytest.mark.parametrize("dl,lam", [(0, 532e-9), (-1e-9, 532e-9), (1e-9, 0)])
    def test_non_positive_inputs(self, dl, lam):
        with pytest.raises(DomainError):
            spectral_width_to_rad(dl, lam)


class TestKappa:
    def test_signal_and_idler(self):
        assert kappa(mode("signal", 1654, 1.732)) == pytest.approx(1.096e6, rel=2e-3)
        assert kappa(mode("idler", 1654, 1.813)) == pytest.approx(1.047e6, rel=2e-3)

    def test_inverse_in_index(self):
        assert kappa(mode("signal", 1654, 3.464)) == pytest.approx(kappa(mode("signal", 1654, 1.732)) / 2, rel=1e-15)

    @given(st.floats(100, 1e5), st.floats(1.0, 4.0))
    def test_homogeneous_in_wavelength(self, lam_nm, n):
        assert kappa(mode("signal", lam_nm, n)) == pytest.approx(kappa(mode("signal", lam_nm / 2, n)) / 2, rel=1e-14)


class TestEnergyField:
    def test_pump_field_at_19p3_uJ(self):
        assert energy_to_field(19.3e-6, PUMP_GEOM, 1.79) == pytest.approx(FIELD_19p3, rel=1e-12)
        assert FIELD_19p3 == pytest.approx(4.94e8, rel=1e-3)

    def test_back_to_energy(self):
        assert field_to_energy(4.94e8, PUMP_GEOM, 1.79) == pytest.approx(19.3e-6, rel=2e-3)

    def test_zero(self):
        assert energy_to_field(0.0, PUMP_GEOM, 1.79) == 0.0
        assert field_to_energy(0.0, PUMP_GEOM, 1.79) == 0.0

    def test_quadratic(self):
        e1 = field_to_energy(1e8, PUMP_GEOM, 1.79)
        assert field_to_energy(2e8, PUMP_GEOM, 1.79) == pytest.approx(4 * e1, rel=1e-15)

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            energy_to_field(-1e-6, PUMP_GEOM, 1.79)

    @given(st.floats(1e-12, 1e-3), st.floats(1e-6, 1e-3), st.floats(1e-15, 1e-9), st.floats(1.0, 3.0))
    def test_roundtrip(self, xi, w, tau, n):
        geom = BeamGeometry(w, tau, 10.0)
        assert field_to_energy(energy_to_field(xi, geom, n), geom, n) == pytest.approx(xi, rel=1e-12)


class TestVacuumAmplitude:
    S = math.pi * (47.5e-6) ** 2

    def signal(self, dw=2.489e12, lam=1654, n=1.732):
        return mode("signal", lam, n, dw)

    def test_reference_value(self):
        assert vacuum_field_amplitude(self.signal(), self.S) == pytest.approx(26.7, rel=0.03)

    def test_zero_width(self):
        assert vacuum_field_amplitude(self.signal(dw=0.0), self.S) == 0.0

    def test_zero_cross_section(self):
        with pytest.raises(DomainError):
            vacuum_field_amplitude(self.signal(), 0.0)

    def test_scalings(self):
        base = vacuum_field_amplitude(self.signal(), self.S)
        assert vacuum_field_amplitude(self.signal(), 4 * self.S) == pytest.approx(base / 2, rel=1e-14)
        assert vacuum_field_amplitude(self.signal(dw=4 * 2.489e12), self.S) == pytest.approx(2 * base, rel=1e-14)
        # omega x4 via wavelength / 4
        assert vacuum_field_amplitude(self.signal(lam=1654 / 4), self.S) == pytest.approx(2 * base, rel=1e-14)
        assert vacuum_field_amplitude(self.signal(n=4 * 1.732), self.S) == pytest.approx(base / 2, rel=1e-14)


class TestOverlap:
    def test_reference_waists(self):
        assert overlap_factor(47.5e-6, 72.5e-6) == pytest.approx(GAMMA_CORRECTED, rel=1e-14)

    def test_equal_waists(self):
        assert overlap_factor(5e-5, 5e-5) == pytest.approx(1 - math.exp(-2), rel=1e-15)

    def test_wide_stimulation(self):
        assert overlap_factor(47.5e-6, 1.0) < 1e-8

    @given(st.floats(1e-6, 1e-3), st.floats(1.0001, 10.0), st.floats(1e-3, 1.0))
    def test_increasing_and_bounded(self, w_sti, grow, frac):
        w_p = w_sti * frac
        g = overlap_factor(w_p, w_sti)
        assert 0 < g <= 1 - math.exp(-2) + 1e-15
        if w_p * grow <= w_sti:
            assert overlap_factor(w_p * grow, w_sti) > g


def ktp_modes(n_s=1.732, n_i=None):
    p = mode("pump", 532, 1.79)
    sti = mode("stimulation", 1491, 1.82)
    s = mode("signal", 1654, n_s)
    if n_i is None:
        # solve for the idler index that phase-matches
        w = {m: angular_frequency(m) for m in (p, sti, s)}
        w_i = angular_frequency(mode("idler", 1654, 1.8))
        n_i = (w[p] * p.refractive_index - w[sti] * sti.refractive_index - w[s] * s.refractive_index) / w_i
    return [p, sti, s, mode("idler", 1654, n_i, axis="z")]


class TestPhaseMismatch:
    def test_phase_matched(self):
        assert abs(phase_mismatch(ktp_modes())) < 1e-6

    def test_linear_in_signal_index(self):
        ms = ktp_modes()
        pert = ms[:2] + [mode("signal", 1654, 1.732 + 1e-3)] + ms[3:]
        w_s = angular_frequency(ms[2])
        assert phase_mismatch(pert) - phase_mismatch(ms) == pytest.approx(-w_s * 1e-3 / CONST.c, rel=1e-6)

    def test_sign_flips_when_contributions_swap(self):
        ms = ktp_modes(n_i=1.813)
        w = [angular_frequency(m) for m in ms]
        kp = w[0] * ms[0].refractive_index
        kdown = sum(wi * m.refractive_index for wi, m in zip(w[1:], ms[1:]))
        # pump now carries the down-converted sum, and vice versa
        swapped = [mode("pump", 532, kdown / w[0])] + [
            OpticalMode(m.role, m.wavelength, m.refractive_index * kp / kdown, m.polarization_axis)
            for m in ms[1:]
        ]
        assert phase_mismatch(swapped) == pytest.approx(-phase_mismatch(ms), rel=1e-9)

    @given(st.floats(-0.05, 0.05))
    def test_linear_in_pump_index(self, dn):
        ms = ktp_modes(n_i=1.813)
        moved = [mode("pump", 532, 1.79 + dn)] + ms[1:]
        moved2 = [mode("pump", 532, 1.79 + 2 * dn)] + ms[1:]
        d1 = phase_mismatch(moved) - phase_mismatch(ms)
        d2 = phase_mismatch(moved2) - phase_mismatch(ms)
        assert d2 == pytest.approx(2 * d1, rel=1e-6, abs=1e-3)

    def test_role_errors(self):
        ms = ktp_modes()
        with pytest.raises(ConfigError, match="missing"):
            phase_mismatch(ms[:3])
        with pytest.raises(ConfigError, match="duplicate"):
            phase_mismatch(ms + [ms[0]])


class TestPhotonRates:
    def test_pump_and_stimulation(self):
        assert photons_per_second(19.3e-6, 532e-9, 10) == pytest.approx(5.2e14, rel=0.02)
        assert photons_per_second(11.2e-6, 1491e-9, 10) == pytest.approx(8.4e14, rel=0.02)

    def test_zero_energy(self):
        assert photons_per_second(0.0, 532e-9, 10) == 0.0
