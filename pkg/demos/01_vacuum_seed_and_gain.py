"""Vacuum seed, gain parameter and triplet flux at the strongest operating point.

Walks through the closed-form chain: pulse energies to peak fields, the
classical vacuum amplitude that stands in for spontaneous emission, the
gain parameter and the resulting triplets per pulse.
"""
from dataclasses import replace

from photontriplets import load_config
from photontriplets.model import gain_parameter_beta, triplet_flux_full, triplet_flux_simplified
from photontriplets.optics import Role, kappa, photons_per_second

cfg = load_config()
ic = cfg.interaction()

print(f"pump field        {ic.pump_field:.4g} V/m")
print(f"stimulation field {ic.stimulation_field:.4g} V/m")
dEs, dEi = ic.vacuum_seeds()
print(f"vacuum seeds      {dEs:.3f} / {dEi:.3f} V/m")
print(f"kappa_s, kappa_i  {kappa(ic.mode(Role.SIGNAL)):.4g}, {kappa(ic.mode(Role.IDLER)):.4g} 1/m")

beta = gain_parameter_beta(ic)
L = ic.crystal.length
print(f"beta = {beta:.2f} 1/m, beta*L = {beta * L:.3f}  (overlap gamma = {ic.gamma})")

res = triplet_flux_full(ic)
print(f"rate {res.instantaneous_rate:.3e} /s -> {res.triplets_per_pulse:.3f} per pulse, "
      f"{res.triplets_per_second:.2f} /s at 10 Hz")
print(f"identical-mode formula gives {triplet_flux_simplified(beta, L, ic.delta_omega):.3e} /s")

# the overlap factor from the waists instead of the fixed 0.537
ic2 = replace(ic, gamma_override=None)
print(f"with the Gaussian overlap (gamma = {ic2.gamma:.3f}): {triplet_flux_full(ic2).triplets_per_pulse:.3f} per pulse")

n_pump = photons_per_second(cfg.pump_energy, ic.mode(Role.PUMP).wavelength, 10)
print(f"pump photons/s {n_pump:.3g}; model efficiency {res.triplets_per_second / n_pump:.3g}")
