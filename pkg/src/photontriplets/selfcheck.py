"""Internal consistency checks between the closed-form flux and the integrator."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import (
    FieldState,
    InteractionConfig,
    gain_parameter_beta,
    propagate_coupled_waves,
    triplet_flux_full,
    triplet_flux_simplified,
    vacuum_seeded_state,
)
from .optics import CrystalConfig, Role, kappa

IDENTITY_BETA_L = (0.01, 0.1, 0.5, 1.0, 3.0)
ORACLE_BETA_L = (0.1, 0.5, 1.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.error <= self.tolerance


def with_beta_l(cfg: InteractionConfig, beta_l: float) -> InteractionConfig:
    """Same configuration with chi3 rescaled so that beta * L = beta_l."""
    current = gain_parameter_beta(cfg) * cfg.crystal.length
    c = cfg.crystal
    return replace(cfg, crystal=CrystalConfig(c.length, c.chi3_eff * beta_l / current, c.axis_label))


def symmetric(cfg: InteractionConfig) -> InteractionConfig:
    """Idler made identical to the signal (same wavelength and index)."""
    s = cfg.mode(Role.SIGNAL)
    modes = [replace(s, role=Role.IDLER, polarization_axis=cfg.mode(Role.IDLER).polarization_axis)
             if m.role is Role.IDLER else m for m in cfg.modes]
    return replace(cfg, modes=tuple(modes))


def identity_errors(cfg: InteractionConfig, beta_ls=IDENTITY_BETA_L) -> list[float]:
    """Relative gap between the two-mode flux and (dw / 16 pi)(e^x - 1)^2."""
    errs = []
    for bl in beta_ls:
        c = with_beta_l(symmetric(cfg), bl)
        full = triplet_flux_full(c).instantaneous_rate
        simple = triplet_flux_simplified(gain_parameter_beta(c), c.crystal.length, c.delta_omega)
        errs.append(abs(full - simple) / simple)
    return errs


def upa_closed_form(initial: FieldState, cfg: InteractionConfig, z: float) -> np.ndarray:
    """Exact signal/idler amplitudes for the phase-matched undepleted case."""
    ks = kappa(cfg.mode(Role.SIGNAL), cfg.const)
    ki = kappa(cfg.mode(Role.IDLER), cfg.const)
    g = cfg.gamma * cfg.crystal.chi3_eff * initial[Role.PUMP] * initial[Role.STIMULATION].conjugate()
    beta = abs(g) * math.sqrt(ks * ki)
    es, ei = initial[Role.SIGNAL], initial[Role.IDLER]
    dz = z - initial.z
    if beta == 0:
        return np.array([es, ei])
    ch, sh = math.cosh(beta * dz), math.sinh(beta * dz)
    return np.array([
        es * ch + 1j * ks * g * ei.conjugate() / beta * sh,
        ei * ch + 1j * ki * g * es.conjugate() / beta * sh,
    ])


def oracle_errors(cfg: InteractionConfig, beta_ls=ORACLE_BETA_L, steps: int = 10_000) -> list[float]:
    errs = []
    for bl in beta_ls:
        c = with_beta_l(cfg, bl)
        start = vacuum_seeded_state(c)
        end = propagate_coupled_waves(start, c, steps=steps)
        exact = upa_closed_form(start, c, c.crystal.length)
        got = end.amplitudes[2:]
        errs.append(float(np.max(np.abs(got - exact) / np.abs(exact))))
    return errs


def depleting_case(cfg: InteractionConfig) -> tuple[InteractionConfig, FieldState]:
    """A strongly converting configuration where all four fluxes change visibly."""
    c = replace(cfg, gamma_override=1.0,
                crystal=CrystalConfig(cfg.crystal.length, 2e-10, cfg.crystal.axis_label))
    return c, FieldState(0.0, [1e3, 8e2, 5e2, 4e2j])


def manley_rowe_errors(cfg: InteractionConfig, steps: int = 10_000) -> list[float]:
    """Relative violations of dPhi_s = dPhi_i = dPhi_sti = -dPhi_p (scaled by dPhi_s)."""
    c, start = depleting_case(cfg)
    end = propagate_coupled_waves(start, c, depleted=True, steps=steps)
    d = end.photon_flux_proxies(c) - start.photon_flux_proxies(c)
    dp, dsti, ds, di = d
    return [abs(di - ds) / abs(ds), abs(dsti - ds) / abs(ds), abs(-dp - ds) / abs(ds)]


def run_all(cfg: InteractionConfig) -> list[CheckResult]:
    out = []
    for bl, e in zip(IDENTITY_BETA_L, identity_errors(cfg)):
        out.append(CheckResult(f"two-mode vs single-mode flux, betaL={bl:g}", e, 1e-12))
    for bl, e in zip(ORACLE_BETA_L, oracle_errors(cfg)):
        out.append(CheckResult(f"integrator vs cosh/sinh solution, betaL={bl:g}", e, 1e-6))
    for name, e in zip(("idler", "stimulation", "pump"), manley_rowe_errors(cfg)):
        out.append(CheckResult(f"Manley-Rowe balance signal/{name}", e, 1e-8))
    return out
