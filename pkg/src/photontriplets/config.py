"""Experiment configuration: JSON files with unit-suffixed keys.

A user file only needs the keys it changes; it is merged over the shipped
defaults, which reproduce the KTP experiment (532 nm pump, 1491 nm
stimulation, 1654 nm signal and idler).
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any

from .coincidence import DetectionSetup
from .errors import ConfigError, TripletError
from .model import BETA_MODES, InteractionConfig
from .optics import (
    MM,
    NM,
    PS,
    UJ,
    UM,
    BeamGeometry,
    CrystalConfig,
    OpticalMode,
    Role,
    spectral_width_to_rad,
)

_BEAM_KEYS = ("wavelength_nm", "index", "polarization", "spectral_width_nm", "waist_um",
              "pulse_duration_ps", "repetition_rate_Hz", "energy_uJ")
_GENERATED_KEYS = ("wavelength_nm", "index", "polarization")
SCHEMA: dict[str, tuple[str, ...]] = {
    "pump": _BEAM_KEYS,
    "stimulation": _BEAM_KEYS,
    "signal": _GENERATED_KEYS,
    "idler": _GENERATED_KEYS,
    "crystal": ("length_mm", "chi3_eff_m2_per_V2", "axis"),
    "model": ("delta_omega_rad_per_s", "cross_section_m2", "gamma_override", "tau_eff_factor",
              "beta_mode", "delta_k_per_m"),
    "detection": ("transfer_function", "coincidence_window_ps", "dark_coincidence_rate_Hz", "statistics",
                  "arm_pairing"),
    "fit": ("tf_min", "tf_max"),
    "simulate": ("n_mean",),
}
TOP_LEVEL = ("dataset_csv", "output_dir")


def default_config_dict() -> dict[str, Any]:
    text = resources.files("photontriplets").joinpath("data/default_config.json").read_text()
    return json.loads(text)


def merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    modes: tuple[OpticalMode, ...]
    pump_geometry: BeamGeometry
    stimulation_geometry: BeamGeometry
    crystal: CrystalConfig
    pump_energy: float
    stimulation_energy: float
    delta_omega: float
    cross_section: float | None
    gamma_override: float | None
    tau_eff_factor: float
    beta_mode: str
    delta_k: float
    transfer_function: float | str
    coincidence_window: float
    dark_coincidence_rate: float
    statistics: str
    arm_pairing: str
    tf_bounds: tuple[float, float]
    n_mean: float
    dataset_csv: str | None
    output_dir: str

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentConfig":
        missing = []
        unknown = []
        for section, keys in SCHEMA.items():
            sub = d.get(section)
            if not isinstance(sub, dict):
                missing.extend(f"{section}.{k}" for k in keys)
                continue
            missing.extend(f"{section}.{k}" for k in keys if k not in sub)
            unknown.extend(f"{section}.{k}" for k in sub if k not in keys)
        missing.extend(k for k in TOP_LEVEL if k not in d)
        unknown.extend(k for k in d if k not in SCHEMA and k not in TOP_LEVEL)
        if missing:
            raise ConfigError("missing configuration keys", missing)
        if unknown:
            raise ConfigError("unknown configuration keys", unknown)
        try:
            return cls._build(d)
        except ConfigError:
            raise
        except (TripletError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid configuration value: {exc}") from exc

    @classmethod
    def _build(cls, d):
        def beam(role):
            b = d[role]
            lam = b["wavelength_nm"] * NM
            mode = OpticalMode(role, lam, b["index"], b["polarization"],
                               spectral_width_to_rad(b["spectral_width_nm"] * NM, lam))
            geom = BeamGeometry(b["waist_um"] * UM, b["pulse_duration_ps"] * PS, b["repetition_rate_Hz"])
            return mode, geom, b["energy_uJ"] * UJ

        m = d["model"]
        dw = float(m["delta_omega_rad_per_s"])
        pump, pump_geom, xi_p = beam("pump")
        sti, sti_geom, xi_sti = beam("stimulation")
        generated = [
            OpticalMode(role, d[role]["wavelength_nm"] * NM, d[role]["index"], d[role]["polarization"], dw)
            for role in ("signal", "idler")
        ]
        if m["beta_mode"] not in BETA_MODES:
            raise ConfigError(f"model.beta_mode must be one of {BETA_MODES}")
        det = d["detection"]
        tf = det["transfer_function"]
        if tf != "fit":
            tf = float(tf)
            if not 0 < tf <= 1:
                raise ConfigError(f"detection.transfer_function must lie in (0, 1] or be \"fit\", got {tf}")
        cfg = cls(
            modes=(pump, sti, *generated),
            pump_geometry=pump_geom,
            stimulation_geometry=sti_geom,
            crystal=CrystalConfig(d["crystal"]["length_mm"] * MM, d["crystal"]["chi3_eff_m2_per_V2"],
                                  str(d["crystal"]["axis"])),
            pump_energy=xi_p,
            stimulation_energy=xi_sti,
            delta_omega=dw,
            cross_section=m["cross_section_m2"],
            gamma_override=m["gamma_override"],
            tau_eff_factor=float(m["tau_eff_factor"]),
            beta_mode=m["beta_mode"],
            delta_k=float(m["delta_k_per_m"]),
            transfer_function=tf,
            coincidence_window=det["coincidence_window_ps"] * PS,
            dark_coincidence_rate=float(det["dark_coincidence_rate_Hz"]),
            statistics=det["statistics"],
            arm_pairing=det["arm_pairing"],
            tf_bounds=(float(d["fit"]["tf_min"]), float(d["fit"]["tf_max"])),
            n_mean=float(d["simulate"]["n_mean"]),
            dataset_csv=d["dataset_csv"],
            output_dir=str(d["output_dir"]),
        )
        cfg.interaction()  # validates the physics inputs up front
        if cfg.transfer_function != "fit":
            cfg.detection()
        return cfg

    def interaction(self, pump_energy: float | None = None,
                    stimulation_energy: float | None = None) -> InteractionConfig:
        """Interaction at the given energies in joules (config energies by default)."""
        return InteractionConfig(
            modes=self.modes,
            pump_geometry=self.pump_geometry,
            stimulation_geometry=self.stimulation_geometry,
            crystal=self.crystal,
            pump_energy=self.pump_energy if pump_energy is None else pump_energy,
            stimulation_energy=self.stimulation_energy if stimulation_energy is None else stimulation_energy,
            delta_omega=self.delta_omega,
            cross_section=self.cross_section,
            gamma_override=self.gamma_override,
            delta_k=self.delta_k,
            tau_eff_factor=self.tau_eff_factor,
            beta_mode=self.beta_mode,
        )

    def detection(self, transfer_function: float | None = None) -> DetectionSetup:
        tf = self.transfer_function if transfer_function is None else transfer_function
        if tf == "fit":
            raise ConfigError("transfer function is set to \"fit\"; fit it before building the detection setup")
        return DetectionSetup(
            transfer_function=tf,
            rep_rate=self.pump_geometry.repetition_rate,
            coincidence_window=self.coincidence_window,
            dark_coincidence_rate=self.dark_coincidence_rate,
            photon_number_statistics=self.statistics,
            arm_pairing=self.arm_pairing,
        )

    def mode(self, role: Role) -> OpticalMode:
        return next(m for m in self.modes if m.role is Role(role))

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Load a JSON config merged over the defaults; ``path=None`` gives the defaults."""
    d = default_config_dict()
    if path is not None:
        p = Path(path)
        try:
            user = json.loads(p.read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {p}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {p} is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError(f"config file {p} must hold a JSON object")
        d = merge(d, user)
    if overrides:
        d = merge(d, overrides)
    return ExperimentConfig.from_dict(d)
