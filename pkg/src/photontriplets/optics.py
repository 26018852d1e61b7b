"""Per-wave optical quantities for stimulated third-order down-conversion.

Units are SI throughout (m, s, J, V/m, rad/s). Helpers for the lab units
used in configuration files (nm, um, uJ, ps) live at the bottom.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values."""

    c: float = 299_792_458.0
    eps0: float = 8.8541878128e-12
    hbar: float = 1.054571817e-34


CONST = PhysicalConstants()


class Role(str, enum.Enum):
    PUMP = "pump"
    STIMULATION = "stimulation"
    SIGNAL = "signal"
    IDLER = "idler"


class Axis(str, enum.Enum):
    Y = "y"
    Z = "z"


@dataclass(frozen=True)
class OpticalMode:
    """One of the four interacting waves.

    ``spectral_width`` is an angular-frequency linewidth in rad/s; it only
    matters for the unseeded signal and idler, whose vacuum seed depends on it.
    """

    role: Role
    wavelength: float
    refractive_index: float
    polarization_axis: Axis = Axis.Y
    spectral_width: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "role", Role(self.role))
        object.__setattr__(self, "polarization_axis", Axis(self.polarization_axis))
        if not self.wavelength > 0:
            raise ConfigError(f"{self.role.value}: wavelength must be > 0, got {self.wavelength}")
        if not self.refractive_index >= 1:
            raise ConfigError(f"{self.role.value}: refractive index must be >= 1, got {self.refractive_index}")
        if not self.spectral_width >= 0:
            raise ConfigError(f"{self.role.value}: spectral width must be >= 0, got {self.spectral_width}")

    @property
    def omega(self) -> float:
        return angular_frequency(self)


@dataclass(frozen=True)
class BeamGeometry:
    waist_radius: float
    pulse_duration: float
    repetition_rate: float

    def __post_init__(self):
        for name in ("waist_radius", "pulse_duration", "repetition_rate"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"beam {name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class CrystalConfig:
    length: float
    chi3_eff: float
    axis_label: str = "x"

    def __post_init__(self):
        if not self.length > 0:
            raise ConfigError(f"crystal length must be > 0, got {self.length}")
        if not self.chi3_eff > 0:
            raise ConfigError(f"chi3_eff must be > 0, got {self.chi3_eff}")


def angular_frequency(mode: OpticalMode, const: PhysicalConstants = CONST) -> float:
    return 2 * math.pi * const.c / mode.wavelength


def spectral_width_to_rad(delta_lambda: float, wavelength: float, const: PhysicalConstants = CONST) -> float:
    """Convert a wavelength linewidth to an angular-frequency linewidth, 2*pi*c*dl/l**2."""
    if not (delta_lambda > 0 and wavelength > 0):
        raise DomainError(f"linewidth and wavelength must be positive, got {delta_lambda}, {wavelength}")
    return 2 * math.pi * const.c * delta_lambda / wavelength**2


def kappa(mode: OpticalMode, const: PhysicalConstants = CONST) -> float:
    """Coupling factor omega / (2 n c), in 1/m."""
    return angular_frequency(mode, const) / (2 * mode.refractive_index * const.c)


def _gaussian_energy_factor(geom: BeamGeometry, n: float, const: PhysicalConstants) -> float:
    # energy = factor * E**2 for a pulse Gaussian in time and space
    return geom.pulse_duration / 4 * (math.pi / 2) ** 1.5 * const.eps0 * const.c * n * geom.waist_radius**2


def energy_to_field(energy: float, geom: BeamGeometry, n: float, const: PhysicalConstants = CONST) -> float:
    """Peak field amplitude (V/m) of a Gaussian pulse carrying ``energy`` joules."""
    if energy < 0:
        raise DomainError(f"pulse energy must be >= 0, got {energy}")
    return math.sqrt(energy / _gaussian_energy_factor(geom, n, const))


def field_to_energy(field: float, geom: BeamGeometry, n: float, const: PhysicalConstants = CONST) -> float:
    if field < 0:
        raise DomainError(f"field amplitude must be >= 0, got {field}")
    return _gaussian_energy_factor(geom, n, const) * field**2


def vacuum_field_amplitude(mode: OpticalMode, cross_section: float, const: PhysicalConstants = CONST) -> float:
    """Classical stand-in amplitude for the vacuum fluctuations of an unseeded mode.

    sqrt(dw * hbar * w / (4 pi c eps0 n S)), with ``dw`` the mode's spectral width
    and ``S`` the overlap cross-section of the pump and stimulation beams.
    """
    if not cross_section > 0:
        raise DomainError(f"cross section must be > 0, got {cross_section}")
    w = angular_frequency(mode, const)
    return math.sqrt(
        mode.spectral_width * const.hbar * w
        / (4 * math.pi * const.c * const.eps0 * mode.refractive_index * cross_section)
    )


def pump_disk_cross_section(pump_waist: float) -> float:
    """Default overlap cross-section: the pump waist disk, pi * w_p**2."""
    return math.pi * pump_waist**2


def overlap_factor(w_p: float, w_sti: float) -> float:
    """Fraction of the stimulation beam overlapping the pump, 1 - exp(-2 (w_p/w_sti)**2)."""
    if not (w_p > 0 and w_sti > 0):
        raise DomainError(f"waists must be positive, got {w_p}, {w_sti}")
    return -math.expm1(-2 * (w_p / w_sti) ** 2)


def modes_by_role(modes: Iterable[OpticalMode]) -> dict[Role, OpticalMode]:
    out: dict[Role, OpticalMode] = {}
    duplicates = []
    for m in modes:
        if m.role in out:
            duplicates.append(m.role.value)
        out[m.role] = m
    missing = [r.value for r in Role if r not in out]
    if duplicates:
        raise ConfigError("duplicate mode roles", duplicates)
    if missing:
        raise ConfigError("missing mode roles", missing)
    return out


def phase_mismatch(modes: Iterable[OpticalMode] | Mapping[Role, OpticalMode],
                   const: PhysicalConstants = CONST) -> float:
    """Collinear wave-vector mismatch (w_p n_p - w_sti n_sti - w_s n_s - w_i n_i) / c."""
    if isinstance(modes, Mapping):
        modes = modes.values()
    m = modes_by_role(modes)
    k = {r: angular_frequency(m[r], const) * m[r].refractive_index for r in Role}
    return (k[Role.PUMP] - k[Role.STIMULATION] - k[Role.SIGNAL] - k[Role.IDLER]) / const.c


def photons_per_second(energy: float, wavelength: float, rep_rate: float,
                       const: PhysicalConstants = CONST) -> float:
    if energy < 0:
        raise DomainError(f"energy must be >= 0, got {energy}")
    if not (wavelength > 0 and rep_rate > 0):
        raise DomainError("wavelength and repetition rate must be positive")
    photon_energy = const.hbar * 2 * math.pi * const.c / wavelength
    return energy / photon_energy * rep_rate


# lab-unit conversions
NM = 1e-9
UM = 1e-6
UJ = 1e-6
PS = 1e-12
MM = 1e-3
