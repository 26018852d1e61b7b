"""Two-detector coincidence statistics for pulsed triplet sources.

Each generated triplet sends its signal photon to one SNSPD and its idler
photon to the other, and a detector saturates at one click per pulse. When
the two arms see independent Poisson photon numbers of mean N, each thinned
by the efficiency T, the coincidence probability per pulse is
(1 - exp(-N T))**2; inverting it turns a measured coincidence fraction back
into N. If instead both arms are driven by the same triplet number, the
clicks are correlated and the probability becomes
1 - 2 exp(-N T) + exp(-N T (2 - T)); see ``ArmPairing``.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from numpy.random import Philox
from scipy import optimize, stats

from .errors import DomainError, NoFitError

# two Philox blocks (8 raw draws) per pulse; columns used:
# 0 triplet number (arm 1 / shared), 1 triplet number arm 2, 2 click arm 1, 3 click arm 2, 4 dark event
BLOCKS_PER_PULSE = 2
DRAWS_PER_PULSE = 4 * BLOCKS_PER_PULSE
DEFAULT_CHUNK = 1 << 18


class PhotonStatistics(str, enum.Enum):
    POISSON = "poisson"
    THERMAL = "thermal"


class ArmPairing(str, enum.Enum):
    """How the photon numbers reaching the two detectors are drawn.

    INDEPENDENT: each arm gets its own draw with mean ``n_mean``; the
    coincidence inversion is exact for Poisson statistics.
    PAIRED: one triplet number per pulse feeds both arms, so signal and idler
    of a triplet are detected together with probability T**2.
    """

    INDEPENDENT = "independent"
    PAIRED = "paired"


@dataclass(frozen=True)
class DetectionSetup:
    """Detection chain seen by the coincidence counter.

    ``dark_coincidence_rate`` is the accidental coincidence rate in real time
    (events/s) for the configured window, so the per-pulse probability is
    rate / rep_rate. ``arm_efficiencies`` overrides the symmetric
    per-arm efficiency ``transfer_function`` in the Monte Carlo only.
    """

    transfer_function: float
    rep_rate: float = 10.0
    coincidence_window: float = 100e-12
    dark_coincidence_rate: float = 0.0
    photon_number_statistics: PhotonStatistics = PhotonStatistics.POISSON
    arm_efficiencies: tuple[float, float] | None = None
    arm_pairing: ArmPairing = ArmPairing.INDEPENDENT

    def __post_init__(self):
        object.__setattr__(self, "photon_number_statistics", PhotonStatistics(self.photon_number_statistics))
        object.__setattr__(self, "arm_pairing", ArmPairing(self.arm_pairing))
        if not 0 < self.transfer_function <= 1:
            raise DomainError(f"transfer function must lie in (0, 1], got {self.transfer_function}")
        if not self.rep_rate > 0 or not self.coincidence_window > 0:
            raise DomainError("repetition rate and coincidence window must be > 0")
        if self.dark_coincidence_rate < 0:
            raise DomainError("dark coincidence rate must be >= 0")
        if self.arm_efficiencies is not None:
            if len(self.arm_efficiencies) != 2 or not all(0 <= t <= 1 for t in self.arm_efficiencies):
                raise DomainError(f"arm efficiencies must be two values in [0, 1], got {self.arm_efficiencies}")

    @property
    def dark_probability(self) -> float:
        return min(1.0, self.dark_coincidence_rate / self.rep_rate)

    @property
    def arms(self) -> tuple[float, float]:
        if self.arm_efficiencies is not None:
            return tuple(self.arm_efficiencies)
        return self.transfer_function, self.transfer_function


@dataclass(frozen=True)
class CoincidenceResult:
    pulses: int
    coincidences: int
    eta_hat: float
    eta_ci: tuple[float, float]
    rng_seed: int


class CriterionCheck(NamedTuple):
    passed: bool
    margin: float


@dataclass(frozen=True)
class TransferFunctionFit:
    value: float
    low: float
    high: float
    chi2: float
    at_bound: bool


def _check_tf(transfer_function):
    if not 0 < transfer_function <= 1:
        raise DomainError(f"transfer function must lie in (0, 1], got {transfer_function}")


def invert_coincidence_fraction(eta_hat, transfer_function):
    """Mean triplets per pulse from a raw coincidence fraction, -ln(1 - sqrt(eta)) / T_F.

    Accepts scalars or arrays.
    """
    _check_tf(transfer_function)
    eta = np.asarray(eta_hat, dtype=float)
    if np.any(eta < 0) or np.any(eta >= 1) or np.any(np.isnan(eta)):
        raise DomainError(f"coincidence fraction must lie in [0, 1), got {eta_hat}")
    n = -np.log1p(-np.sqrt(eta)) / transfer_function
    return float(n) if n.ndim == 0 else n


def forward_coincidence_fraction(n_per_pulse, transfer_function):
    """Expected coincidence fraction (1 - exp(-N T_F))**2."""
    n = np.asarray(n_per_pulse, dtype=float)
    if np.any(n < 0):
        raise DomainError(f"triplets per pulse must be >= 0, got {n_per_pulse}")
    eta = (-np.expm1(-n * transfer_function)) ** 2
    return float(eta) if eta.ndim == 0 else eta


def paired_coincidence_fraction(n_per_pulse, transfer_function):
    """Coincidence fraction when one Poisson triplet number drives both arms.

    E[(1 - (1-T)^k)^2] for k ~ Poisson(N).
    """
    n = np.asarray(n_per_pulse, dtype=float)
    if np.any(n < 0):
        raise DomainError(f"triplets per pulse must be >= 0, got {n_per_pulse}")
    t = transfer_function
    eta = -2 * np.expm1(-n * t) + np.expm1(-n * t * (2 - t))
    return float(eta) if eta.ndim == 0 else eta


def remove_dark_coincidences(eta_hat, dark_probability):
    """Fraction with independent accidental coincidences of probability p removed.

    Inverse of eta -> eta + p (1 - eta).
    """
    if not 0 <= dark_probability < 1:
        raise DomainError(f"dark probability must lie in [0, 1), got {dark_probability}")
    eta = np.asarray(eta_hat, dtype=float)
    out = np.clip((eta - dark_probability) / (1 - dark_probability), 0.0, None)
    return float(out) if out.ndim == 0 else out


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials < 1:
        raise DomainError("need at least one trial")
    z = stats.norm.ppf(0.5 + confidence / 2)
    p = successes / trials
    denom = 1 + z**2 / trials
    centre = (p + z**2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z**2 / (4 * trials**2)) / denom
    # the exact endpoints at k = 0 and k = n are lost to rounding otherwise
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return float(lo), float(hi)


def _uniforms(seed: int, start: int, count: int) -> np.ndarray:
    # pulse j owns Philox blocks 2j and 2j+1, so any partition sees the same numbers
    raw = Philox(key=seed, counter=BLOCKS_PER_PULSE * start).random_raw(DRAWS_PER_PULSE * count)
    return ((raw >> np.uint64(11)) * 2.0**-53).reshape(count, DRAWS_PER_PULSE)


def _triplet_numbers(u: np.ndarray, n_mean: float, statistics: PhotonStatistics) -> np.ndarray:
    if n_mean == 0:
        return np.zeros(u.shape, dtype=np.int64)
    if statistics is PhotonStatistics.THERMAL:
        # Bose-Einstein: P(k) = n^k / (1+n)^(k+1); inverse CDF of a geometric law
        return np.floor(np.log1p(-u) / math.log(n_mean / (1 + n_mean))).astype(np.int64)
    kmax = int(n_mean + 12 * math.sqrt(n_mean) + 40)
    cdf = stats.poisson.cdf(np.arange(kmax + 1), n_mean)
    return np.searchsorted(cdf, u, side="right").astype(np.int64)


def _count_chunk(n_mean, setup: DetectionSetup, seed, start, count) -> int:
    u = _uniforms(seed, start, count)
    k1 = _triplet_numbers(u[:, 0], n_mean, setup.photon_number_statistics)
    if setup.arm_pairing is ArmPairing.PAIRED:
        k2 = k1
    else:
        k2 = _triplet_numbers(u[:, 1], n_mean, setup.photon_number_statistics)
    t1, t2 = setup.arms
    # a saturating detector clicks iff at least one of its k photons is detected
    click1 = u[:, 2] < -np.expm1(k1 * math.log1p(-t1)) if t1 < 1 else k1 > 0
    click2 = u[:, 3] < -np.expm1(k2 * math.log1p(-t2)) if t2 < 1 else k2 > 0
    dark = u[:, 4] < setup.dark_probability
    return int(np.count_nonzero((click1 & click2) | dark))


def simulate_pulses(n_mean: float, setup: DetectionSetup, n_pulses: int, seed: int,
                    workers: int = 1, chunk: int = DEFAULT_CHUNK) -> CoincidenceResult:
    """Monte Carlo of the coincidence protocol over ``n_pulses`` pulses.

    Pulse ``j`` always draws from the same Philox blocks under key ``seed``,
    so the result does not depend on ``workers`` or ``chunk``.
    """
    if n_pulses < 1:
        raise DomainError("n_pulses must be >= 1")
    if n_mean < 0:
        raise DomainError("n_mean must be >= 0")
    starts = range(0, n_pulses, chunk)
    jobs = [(s, min(chunk, n_pulses - s)) for s in starts]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda j: _count_chunk(n_mean, setup, seed, *j), jobs))
    else:
        counts = [_count_chunk(n_mean, setup, seed, *j) for j in jobs]
    hits = sum(counts)
    return CoincidenceResult(
        pulses=n_pulses,
        coincidences=hits,
        eta_hat=hits / n_pulses,
        eta_ci=wilson_interval(hits, n_pulses),
        rng_seed=seed,
    )


def estimator_roundtrip(n_true: float, setup: DetectionSetup, n_pulses: int, seed: int, **kw) -> float:
    """Simulate coincidences at ``n_true`` and invert the measured fraction."""
    res = simulate_pulses(n_true, setup, n_pulses, seed, **kw)
    return invert_coincidence_fraction(res.eta_hat, setup.transfer_function)


def check_single_triplet_criterion(n_per_pulse: float) -> CriterionCheck:
    """True coincidences need fewer than one triplet per pulse; margin = 1 - N."""
    if n_per_pulse < 0:
        raise DomainError("triplets per pulse must be >= 0")
    return CriterionCheck(n_per_pulse < 1, 1.0 - n_per_pulse)


def fit_transfer_function(predicted: Sequence[float], eta: Sequence[float], sigma: Sequence[float],
                          bounds: tuple[float, float] = (0.02, 0.20)) -> TransferFunctionFit:
    """Weighted least-squares estimate of T_F from model N and measured fractions.

    Minimises sum(((eta_i - (1 - exp(-N_i T))**2) / sigma_i)**2) over the
    bounded interval. The 1-sigma interval comes from the Gauss-Newton
    curvature; at a bound it is one-sided.
    """
    N = np.asarray(predicted, dtype=float)
    y = np.asarray(eta, dtype=float)
    s = np.asarray(sigma, dtype=float)
    if N.size == 0:
        raise DomainError("no data to fit")
    if not (N.shape == y.shape == s.shape):
        raise DomainError("predicted, eta and sigma must have the same length")
    if np.any(N <= 0):
        raise DomainError("predicted triplets per pulse must be > 0")
    if np.any(s < 0):
        raise DomainError("sigma must be >= 0")
    lo, hi = bounds

    if np.all(s == 0):
        exact = invert_coincidence_fraction(y, 1.0) / N
        t = float(np.atleast_1d(exact)[0])
        if not np.allclose(exact, t, rtol=1e-9, atol=0):
            raise NoFitError("all uncertainties are zero and the points disagree on T_F")
        if not lo <= t <= hi:
            raise NoFitError(f"exact T_F = {t:.6g} outside bounds {bounds}")
        return TransferFunctionFit(t, t, t, 0.0, t in (lo, hi))
    if np.any(s == 0):
        raise DomainError("sigma must be > 0 unless every point is exact")

    def resid(t):
        return (y - (-np.expm1(-N * t)) ** 2) / s

    def jac(t):
        e = np.exp(-N * t)
        return -2 * (1 - e) * e * N / s

    def chi2(t):
        return float(np.sum(resid(t) ** 2))

    res = optimize.minimize_scalar(chi2, bounds=bounds, method="bounded", options={"xatol": 1e-12})
    t = float(res.x)
    for _ in range(20):
        J = jac(t)
        step = -float(J @ resid(t)) / float(J @ J)
        trial = min(max(t + step, lo), hi)
        if chi2(trial) > chi2(t):
            break
        converged = abs(trial - t) <= 1e-15 * max(1.0, abs(t))
        t = trial
        if converged:
            break
    for b in bounds:
        if chi2(b) <= chi2(t):
            t = b
    width = (hi - lo) * 1e-9
    at_lo, at_hi = t - lo <= width, hi - t <= width
    curvature = float(jac(t) @ jac(t))
    err = 1 / math.sqrt(curvature) if curvature > 0 else math.inf
    if at_lo:
        t, low, high = lo, lo, min(hi, lo + err)
    elif at_hi:
        t, low, high = hi, max(lo, hi - err), hi
    else:
        low, high = max(lo, t - err), min(hi, t + err)
    return TransferFunctionFit(t, low, high, chi2(t), at_lo or at_hi)
