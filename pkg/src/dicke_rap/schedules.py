"""Time-dependent control fields and the protocol timing rules.

A protocol combines a linear frequency chirp beta(t) = alpha * t that stops
at a cutoff time with a coupling envelope Omega(t): a flat plateau with
Blackman-shaped rising and falling edges.  Times are in units of 1/chi,
beta in units of chi and alpha in units of chi^2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .spin_core import SpinSystem

# Exact-sum Blackman coefficients; B(0) = 0 and B(1) = 1 make the envelope
# continuous with zero slope at the outer edges.
BLACKMAN_A0 = 0.42
BLACKMAN_A1 = 0.5
BLACKMAN_A2 = 0.08

# Falling-edge duration used when steering into the squeezed target instead
# of a bare Dicke state, in units chi/alpha (empirical protocol constant).
ESS_T_OFF_FACTOR = 0.583
# Plateau end for the squeezed-target protocol, in units chi/alpha.
ESS_T2_FACTOR = 0.5


def blackman_half(s):
    """Rising half-window B(s) = 0.42 - 0.5 cos(pi s) + 0.08 cos(2 pi s)."""
    s = np.asarray(s, dtype=float)
    return (BLACKMAN_A0 - BLACKMAN_A1 * np.cos(np.pi * s)
            + BLACKMAN_A2 * np.cos(2 * np.pi * s))


@dataclass(frozen=True)
class ChirpSchedule:
    """Linear chirp whose rate stops at cutoff_time.

    beta(t) = alpha * min(t, cutoff_time): the detuning ramps linearly and
    then holds its final value.  With the default cutoff at t = 0 the held
    value is zero, i.e. the chirp simply switches off there; a nonzero
    cutoff (used when parking on an intermediate ladder state) freezes the
    detuning between two crossings instead of discontinuously resetting it.
    """

    alpha: float
    cutoff_time: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class CouplingSchedule:
    """Plateau envelope with Blackman edges.

    Omega(t) = omega_max on [t1, t2], rises over [t1 - t_on, t1], falls over
    [t2, t2 + t_off], and vanishes outside.
    """

    omega_max: float
    t1: float
    t2: float
    t_on: float
    t_off: float

    def __post_init__(self):
        if self.omega_max < 0:
            raise DomainError(f"omega_max must be >= 0, got {self.omega_max}")
        if not (self.t_on > 0 and self.t_off > 0):
            raise DomainError("t_on and t_off must be positive")
        if self.t1 > self.t2:
            raise DomainError(f"t1 = {self.t1} exceeds t2 = {self.t2}")


@dataclass(frozen=True)
class Schedule:
    """A chirp plus a coupling envelope over the window [t_start, t_end]."""

    chirp: ChirpSchedule
    coupling: CouplingSchedule
    t_start: float
    t_end: float

    def __post_init__(self):
        c = self.coupling
        if self.t_start > c.t1 - c.t_on:
            raise DomainError("t_start must not cut into the rising edge")
        if self.t_end < c.t2 + c.t_off:
            raise DomainError("t_end must not cut into the falling edge")


def beta_at(chirp: ChirpSchedule, t):
    """Chirp value beta(t) = alpha * min(t, cutoff); scalars and arrays."""
    t = np.asarray(t, dtype=float)
    out = chirp.alpha * np.minimum(t, chirp.cutoff_time)
    return float(out) if out.ndim == 0 else out


def omega_at(coupling: CouplingSchedule, t):
    """Coupling envelope Omega(t); works on scalars and arrays."""
    t = np.asarray(t, dtype=float)
    c = coupling
    s_rise = (t - (c.t1 - c.t_on)) / c.t_on
    s_fall = ((c.t2 + c.t_off) - t) / c.t_off
    out = np.zeros_like(t)
    rising = (t > c.t1 - c.t_on) & (t < c.t1)
    falling = (t > c.t2) & (t < c.t2 + c.t_off)
    plateau = (t >= c.t1) & (t <= c.t2)
    out = np.where(rising, blackman_half(s_rise), out)
    out = np.where(falling, blackman_half(s_fall), out)
    out = np.where(plateau, 1.0, out)
    out = c.omega_max * out
    return float(out) if out.ndim == 0 else out


def crossing_times(system: SpinSystem, alpha: float) -> list[tuple[int, float]]:
    """Diabatic level-crossing times of the chirped ladder.

    Adjacent states |S,m> and |S,m-1> are resonant where the chirp equals
    chi(1 - 2m), i.e. at t = chi(1 - 2m)/alpha; successive crossings are
    spaced by the period tau = 2 chi/alpha.  Returned for m = S down to 1
    (ascending in time).
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    s = int(system.total_spin)
    chi = system.chi
    return [(m, chi * (1 - 2 * m) / alpha) for m in range(s, 0, -1)]


def crossing_period(system: SpinSystem, alpha: float) -> float:
    """Spacing tau = 2 chi / alpha between successive crossings."""
    return 2.0 * system.chi / alpha


def dicke_protocol(system: SpinSystem, alpha: float, omega_max: float,
                   target_m: int = 0) -> Schedule:
    """Chirped-passage schedule that lands the population on |S, target_m>.

    The plateau starts at t1 = -N chi/alpha with t_on = t_off = 2 chi/alpha
    and ends half a period after the final required crossing, i.e. at
    t2 = -2 target_m chi/alpha (t2 = 0 for the ground Dicke target).  The
    chirp cutoff coincides with t2, and the simulation window pads one
    period of dead time on both sides.
    """
    if not (alpha > 0 and omega_max > 0):
        raise DomainError("alpha and omega_max must be positive")
    s = system.total_spin
    if not (0 <= target_m < s) or target_m != int(target_m):
        raise DomainError(
            f"target_m must be an integer in [0, S), got {target_m} for S = {s}"
        )
    chi = system.chi
    tau = crossing_period(system, alpha)
    t1 = -system.n_atoms * chi / alpha
    t2 = -2.0 * target_m * chi / alpha
    t_on = t_off = 2.0 * chi / alpha
    chirp = ChirpSchedule(alpha=alpha, cutoff_time=t2)
    coupling = CouplingSchedule(omega_max=omega_max, t1=t1, t2=t2,
                                t_on=t_on, t_off=t_off)
    return Schedule(chirp=chirp, coupling=coupling,
                    t_start=t1 - t_on - tau, t_end=t2 + t_off + tau)


def ess_protocol(system: SpinSystem, alpha: float, omega_max: float) -> Schedule:
    """Variant of the ground-Dicke protocol that stops short of full transfer.

    Holding the plateau to t2 = 0.5 chi/alpha and cutting the coupling off
    over the shorter t_off = 0.583 chi/alpha leaves deliberate residual
    population in |S, +-1>, producing the squeezed superposition.  The chirp
    cutoff stays at 0.
    """
    base = dicke_protocol(system, alpha, omega_max, target_m=0)
    chi = system.chi
    t2 = ESS_T2_FACTOR * chi / alpha
    t_off = ESS_T_OFF_FACTOR * chi / alpha
    tau = crossing_period(system, alpha)
    coupling = CouplingSchedule(omega_max=omega_max, t1=base.coupling.t1,
                                t2=t2, t_on=base.coupling.t_on, t_off=t_off)
    return Schedule(chirp=ChirpSchedule(alpha=alpha, cutoff_time=0.0),
                    coupling=coupling,
                    t_start=base.t_start, t_end=t2 + t_off + tau)
