"""Vacuum-seeded gain model for photon-triplet generation.

Two routes to the generated flux are provided. The closed form holds for a
phase-matched interaction with undepleted pump and stimulation. The
coupled-wave integrator handles phase mismatch and pump depletion, and it
checks the closed form numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError, NumericalOverflowError, PhaseMismatchError
from .optics import (
    CONST,
    BeamGeometry,
    CrystalConfig,
    OpticalMode,
    PhysicalConstants,
    Role,
    energy_to_field,
    kappa,
    modes_by_role,
    overlap_factor,
    pump_disk_cross_section,
    vacuum_field_amplitude,
)

BETA_MODES = ("standard", "strict")

# amplitude order inside FieldState / the integrator
ORDER = (Role.PUMP, Role.STIMULATION, Role.SIGNAL, Role.IDLER)
P, STI, S, I = range(4)


@dataclass(frozen=True)
class InteractionConfig:
    """Everything needed to evaluate one (pump energy, stimulation energy) point.

    ``cross_section`` defaults to the pump waist disk and ``gamma_override``
    to None, meaning the Gaussian overlap factor is computed from the waists.
    ``beta_mode="strict"`` uses kappa_p*kappa_sti in the gain parameter
    instead of kappa_s*kappa_i, for comparison only.
    """

    modes: tuple[OpticalMode, ...]
    pump_geometry: BeamGeometry
    stimulation_geometry: BeamGeometry
    crystal: CrystalConfig
    pump_energy: float
    stimulation_energy: float
    delta_omega: float
    cross_section: float | None = None
    gamma_override: float | None = None
    delta_k: float = 0.0
    tau_eff_factor: float = 1.0
    beta_mode: str = "standard"
    const: PhysicalConstants = field(default=CONST, repr=False)

    def __post_init__(self):
        modes = tuple(self.modes.values()) if isinstance(self.modes, dict) else tuple(self.modes)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "_by_role", modes_by_role(modes))
        if self.pump_energy < 0 or self.stimulation_energy < 0:
            raise DomainError("pulse energies must be >= 0")
        if not self.delta_omega > 0:
            raise DomainError(f"delta_omega must be > 0, got {self.delta_omega}")
        if self.cross_section is None:
            object.__setattr__(self, "cross_section", pump_disk_cross_section(self.pump_geometry.waist_radius))
        if not self.cross_section > 0:
            raise DomainError(f"cross section must be > 0, got {self.cross_section}")
        if self.gamma_override is not None and not 0 < self.gamma_override <= 1:
            raise DomainError(f"gamma override must lie in (0, 1], got {self.gamma_override}")
        if not self.tau_eff_factor > 0:
            raise DomainError("tau_eff_factor must be > 0")
        if self.beta_mode not in BETA_MODES:
            raise DomainError(f"beta_mode must be one of {BETA_MODES}, got {self.beta_mode!r}")

    def mode(self, role: Role) -> OpticalMode:
        return self._by_role[Role(role)]

    @property
    def gamma(self) -> float:
        if self.gamma_override is not None:
            return self.gamma_override
        return overlap_factor(self.pump_geometry.waist_radius, self.stimulation_geometry.waist_radius)

    @property
    def pump_field(self) -> float:
        return energy_to_field(self.pump_energy, self.pump_geometry,
                               self.mode(Role.PUMP).refractive_index, self.const)

    @property
    def stimulation_field(self) -> float:
        return energy_to_field(self.stimulation_energy, self.stimulation_geometry,
                               self.mode(Role.STIMULATION).refractive_index, self.const)

    def with_energies(self, pump_energy: float, stimulation_energy: float) -> "InteractionConfig":
        return replace(self, pump_energy=pump_energy, stimulation_energy=stimulation_energy)

    def vacuum_seeds(self) -> tuple[float, float]:
        """Vacuum amplitudes of signal and idler, both with linewidth ``delta_omega``."""
        out = []
        for role in (Role.SIGNAL, Role.IDLER):
            m = replace(self.mode(role), spectral_width=self.delta_omega)
            out.append(vacuum_field_amplitude(m, self.cross_section, self.const))
        return out[0], out[1]


@dataclass(frozen=True)
class FieldState:
    z: float
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.shape != (4,):
            raise DomainError(f"expected 4 amplitudes (pump, stimulation, signal, idler), got shape {a.shape}")
        if not np.isfinite(a).all():
            raise DomainError("field amplitudes must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    def __getitem__(self, role: Role) -> complex:
        return complex(self.amplitudes[ORDER.index(Role(role))])

    def photon_flux_proxies(self, cfg: InteractionConfig) -> np.ndarray:
        """n |E|^2 / omega for each wave; differences obey the Manley-Rowe relations."""
        n = np.array([cfg.mode(r).refractive_index for r in ORDER])
        w = np.array([cfg.mode(r).omega for r in ORDER])
        return n * np.abs(self.amplitudes) ** 2 / w


@dataclass(frozen=True)
class FluxResult:
    instantaneous_rate: float
    triplets_per_pulse: float
    triplets_per_second: float
    beta_L: float


def psi_factor(tau: float, n: float, const: PhysicalConstants = CONST) -> float:
    """Energy-to-intensity factor: E**2 = psi * energy / w**2 for a Gaussian pulse."""
    if not (tau > 0 and n > 0):
        raise DomainError("pulse duration and index must be positive")
    return (math.pi / 2) ** -1.5 * 4 / (const.c * const.eps0 * tau * n)


def gain_parameter_beta(cfg: InteractionConfig) -> float:
    """Parametric gain coefficient beta (1/m) including the overlap factor."""
    chi = cfg.crystal.chi3_eff
    if cfg.beta_mode == "strict":
        p, sti = cfg.mode(Role.PUMP), cfg.mode(Role.STIMULATION)
        psi_p = psi_factor(cfg.pump_geometry.pulse_duration, p.refractive_index, cfg.const)
        psi_sti = psi_factor(cfg.stimulation_geometry.pulse_duration, sti.refractive_index, cfg.const)
        wp, wsti = cfg.pump_geometry.waist_radius, cfg.stimulation_geometry.waist_radius
        return cfg.gamma * chi * math.sqrt(
            psi_p * psi_sti * cfg.pump_energy * cfg.stimulation_energy
            * kappa(p, cfg.const) * kappa(sti, cfg.const) / (wp**2 * wsti**2)
        )
    ks = kappa(cfg.mode(Role.SIGNAL), cfg.const)
    ki = kappa(cfg.mode(Role.IDLER), cfg.const)
    return cfg.gamma * chi * cfg.pump_field * cfg.stimulation_field * math.sqrt(ks * ki)


def _flux_prefactor(cfg: InteractionConfig) -> float:
    # photons/s carried by a field amplitude squared over the cross section
    s = cfg.mode(Role.SIGNAL)
    c = cfg.const
    return c.eps0 * s.refractive_index * c.c * cfg.cross_section / (4 * c.hbar * s.omega)


def _flux_result(rate: float, beta_l: float, cfg: InteractionConfig) -> FluxResult:
    per_pulse = triplets_per_pulse(rate, cfg.pump_geometry, cfg.tau_eff_factor)
    return FluxResult(
        instantaneous_rate=rate,
        triplets_per_pulse=per_pulse,
        triplets_per_second=per_pulse * cfg.pump_geometry.repetition_rate,
        beta_L=beta_l,
    )


def triplet_flux_full(cfg: InteractionConfig) -> FluxResult:
    """Generated triplet flux for distinct signal and idler modes (phase-matched, undepleted)."""
    if cfg.delta_k != 0:
        raise PhaseMismatchError(
            f"closed form requires delta_k = 0 (got {cfg.delta_k:g} 1/m); "
            "use integrated_flux() / propagate_coupled_waves() instead"
        )
    bl = gain_parameter_beta(cfg) * cfg.crystal.length
    s, i = cfg.mode(Role.SIGNAL), cfg.mode(Role.IDLER)
    dEs, dEi = cfg.vacuum_seeds()
    ratio = math.sqrt(s.omega * i.refractive_index / (i.omega * s.refractive_index))
    # cosh(x) - 1 written as 2 sinh(x/2)**2 to keep precision at small gain
    amp = dEs * 2 * math.sinh(bl / 2) ** 2 + ratio * dEi * math.sinh(bl)
    return _flux_result(_flux_prefactor(cfg) * amp**2, bl, cfg)


def triplet_flux_simplified(beta: float, length: float, delta_omega: float) -> float:
    """Instantaneous triplet rate (dw / 16 pi) (exp(beta L) - 1)**2 for identical signal/idler."""
    if not length > 0:
        raise DomainError(f"crystal length must be > 0, got {length}")
    return delta_omega / (16 * math.pi) * math.expm1(beta * length) ** 2


def triplets_per_pulse(rate: float, geom: BeamGeometry, tau_eff_factor: float = 1.0) -> float:
    """Convert an instantaneous rate to counts per pulse over tau_eff = factor * tau."""
    if rate < 0:
        raise DomainError(f"rate must be >= 0, got {rate}")
    return rate * geom.pulse_duration * tau_eff_factor


def quantum_efficiency(triplet_rate: float, photon_rate: float) -> float:
    if not photon_rate > 0:
        raise DomainError(f"photon rate must be > 0, got {photon_rate}")
    return triplet_rate / photon_rate


# --- coupled-wave integrator -------------------------------------------------

def coupled_wave_rhs(cfg: InteractionConfig, depleted: bool = False) -> Callable[[float, np.ndarray], np.ndarray]:
    """Right-hand side dE/dz of the four coupled amplitude equations.

    Under the undepleted approximation the pump and stimulation derivatives
    are zero. The overlap factor scales the nonlinear coupling so that the
    small-signal gain equals :func:`gain_parameter_beta`.
    """
    k = [kappa(cfg.mode(r), cfg.const) for r in ORDER]
    g = cfg.gamma * cfg.crystal.chi3_eff
    cp, csti, cs, ci = (1j * kk * g for kk in k)
    dk = cfg.delta_k

    def rhs(z, y):
        ep, esti, es, ei = y.tolist()
        ph = complex(math.cos(dk * z), -math.sin(dk * z)) if dk else 1.0
        drive = ep * esti.conjugate() * ph
        ds = cs * drive * ei.conjugate()
        di = ci * drive * es.conjugate()
        if not depleted:
            return np.array((0j, 0j, ds, di))
        dsti = csti * ep * es.conjugate() * ei.conjugate() * ph
        dp = cp * esti * es * ei * ph.conjugate()
        return np.array((dp, dsti, ds, di))

    return rhs


def rk4_integrate(rhs, y0, z0: float, z1: float, steps: int, check_finite: bool = True) -> np.ndarray:
    """Fixed-step classical Runge-Kutta from z0 to z1."""
    if steps < 1:
        raise DomainError("steps must be >= 1")
    h = (z1 - z0) / steps
    y = np.array(y0, dtype=complex)
    for n in range(steps):
        z = z0 + n * h
        k1 = rhs(z, y)
        k2 = rhs(z + h / 2, y + h / 2 * k1)
        k3 = rhs(z + h / 2, y + h / 2 * k2)
        k4 = rhs(z + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if check_finite and not np.isfinite(y).all():
            raise NumericalOverflowError(z + h)
    return y


def vacuum_seeded_state(cfg: InteractionConfig) -> FieldState:
    """Input fields at z = 0: real pump/stimulation, vacuum-seeded signal and idler.

    The idler seed carries a pi/2 phase so the pair grows at the maximal rate,
    which is the phase the closed-form flux assumes.
    """
    dEs, dEi = cfg.vacuum_seeds()
    return FieldState(0.0, [cfg.pump_field, cfg.stimulation_field, dEs, 1j * dEi])


def propagate_coupled_waves(initial: FieldState, cfg: InteractionConfig,
                            depleted: bool = False, steps: int = 10_000) -> FieldState:
    if steps < 100:
        raise DomainError(f"steps must be >= 100, got {steps}")
    L = cfg.crystal.length
    if not 0 <= initial.z <= L:
        raise DomainError(f"initial z = {initial.z} outside crystal [0, {L}]")
    y = rk4_integrate(coupled_wave_rhs(cfg, depleted), initial.amplitudes, initial.z, L, steps)
    return FieldState(L, y)


def integrated_flux(cfg: InteractionConfig, depleted: bool = False, steps: int = 10_000) -> FluxResult:
    """Triplet flux from the integrator; valid for any delta_k.

    The generated signal is the amplitude gained over the vacuum seed, which
    reproduces :func:`triplet_flux_full` when the closed form applies.
    """
    start = vacuum_seeded_state(cfg)
    end = propagate_coupled_waves(start, cfg, depleted=depleted, steps=steps)
    gained = end[Role.SIGNAL] - start[Role.SIGNAL]
    bl = gain_parameter_beta(cfg) * cfg.crystal.length
    return _flux_result(_flux_prefactor(cfg) * abs(gained) ** 2, bl, cfg)


def flux_scan(cfg: InteractionConfig, energies: Iterable[tuple[float, float]]) -> list[FluxResult]:
    """Closed-form flux over a list of (pump, stimulation) energy pairs in joules."""
    return [triplet_flux_full(cfg.with_energies(ep, es)) for ep, es in energies]
