"""Shared physical parameter types and derived environment quantities.

Everything here is an immutable value object or a pure function; modules
downstream never mutate parameters after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ParameterError(ValueError):
    """Raised when a physical parameter violates its constraints."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Mass, hbar, Boltzmann constant and the signed uniform acceleration g.

    Dimensionless units m = hbar = kB = 1 are the working default, but all
    four constants stay configurable so SI-style sanity checks remain
    possible.  g is stored signed and used verbatim everywhere.
    """

    m: float = 1.0
    hbar: float = 1.0
    kB: float = 1.0
    g: float = -3.0

    def __post_init__(self):
        if self.m <= 0 or self.hbar <= 0 or self.kB <= 0:
            raise ParameterError("m, hbar and kB must all be positive")


@dataclass(frozen=True)
class BathParams:
    """Relaxation rate gamma, temperature T and the cached diffusion
    coefficient D = 2 m gamma kB T.

    gamma = 0 is allowed and reproduces the unitary limit exactly.
    """

    gamma: float
    T: float
    D: float = field(init=False)

    # m and kB enter D, so the constants are captured at construction time
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        if self.gamma < 0:
            raise ParameterError("relaxation rate gamma must be >= 0")
        if self.T < 0:
            raise ParameterError("temperature must be >= 0")
        object.__setattr__(
            self, "D", diffusion_coefficient(self.constants, self.gamma, self.T)
        )


@dataclass(frozen=True)
class GaussianPacket:
    """Initial data of one Gaussian component: center, momentum, width."""

    x0: float
    p0: float
    sigma0: float

    def __post_init__(self):
        if self.sigma0 <= 0:
            raise ParameterError("packet width sigma0 must be positive")


@dataclass(frozen=True)
class SuperpositionSpec:
    """Two equal-width packets at -L/2 (at rest) and +L/2 (kicked by hbar*k),
    superposed with relative phase alpha."""

    packetA: GaussianPacket
    packetB: GaussianPacket
    L: float
    k: float
    alpha: float

    def __post_init__(self):
        if self.L <= 0:
            raise ParameterError("separation L must be positive")
        # construction goes through make_superposition, but guard invariants
        # anyway so hand-built specs cannot be inconsistent
        if self.packetA.x0 != -self.L / 2 or self.packetB.x0 != self.L / 2:
            raise ParameterError("packet centers must sit at -L/2 and +L/2")
        if self.packetA.p0 != 0.0:
            raise ParameterError("left packet must start at rest")
        if self.packetA.sigma0 != self.packetB.sigma0:
            raise ParameterError("both packets must share one width")

    @property
    def sigma0(self) -> float:
        return self.packetA.sigma0


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid with at least two samples."""

    t_start: float
    t_end: float
    n_samples: int

    def __post_init__(self):
        if self.t_start > self.t_end:
            raise ParameterError("t_start must not exceed t_end")
        if self.n_samples < 2:
            raise ParameterError("a time grid needs at least 2 samples")

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_samples)


@dataclass(frozen=True)
class TimeSeries:
    """Ordered (t, value) samples plus a short provenance string describing
    the parameters that produced them."""

    t: np.ndarray
    values: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        if len(self.t) != len(self.values):
            raise ParameterError("time and value arrays must align")


def make_superposition(
    L: float, sigma0: float, k: float, alpha: float, hbar: float = 1.0
) -> SuperpositionSpec:
    """Build the standard two-packet spec: centers at -L/2 and +L/2, the right
    packet kicked with momentum hbar*k."""
    if L <= 0 or sigma0 <= 0:
        raise ParameterError("L and sigma0 must be positive")
    pA = GaussianPacket(x0=-L / 2, p0=0.0, sigma0=sigma0)
    pB = GaussianPacket(x0=+L / 2, p0=hbar * k, sigma0=sigma0)
    return SuperpositionSpec(packetA=pA, packetB=pB, L=L, k=k, alpha=alpha)


def diffusion_coefficient(c: PhysicalConstants, gamma: float, T: float) -> float:
    """D = 2 m gamma kB T."""
    if gamma < 0 or T < 0:
        raise ParameterError("gamma and T must be >= 0")
    return 2.0 * c.m * gamma * c.kB * T


# Below gamma*t = 1e-4 the closed form 1 - e^{-2 gamma t} loses digits to
# cancellation, so a short series takes over; both branches carry >= 12
# significant digits at the switch.
_TAU_SWITCH = 1e-4


def scaled_time_tau(gamma: float, t: float) -> float:
    """tau(t) = (1 - e^{-2 gamma t}) / (2 gamma), the friction-scaled time.

    Monotone in t, bounded by 1/(2 gamma); returns t exactly when gamma = 0.
    """
    gt = gamma * t
    if gt < _TAU_SWITCH:
        # tau = t (1 - g t + (2/3)(g t)^2 - (1/3)(g t)^3 + (2/15)(g t)^4)
        return t * (1.0 + gt * (-1.0 + gt * (2.0 / 3.0 + gt * (-1.0 / 3.0 + gt * 2.0 / 15.0))))
    return -math.expm1(-2.0 * gamma * t) / (2.0 * gamma)


def friction_drift(gamma: float, t: float) -> float:
    """(t - tau(t)) / (2 gamma), the friction contribution to the center drift.

    Has a finite gamma -> 0 limit of t^2/2, evaluated by series below the
    same switch threshold as scaled_time_tau.
    """
    gt = gamma * t
    if gt < _TAU_SWITCH:
        # (t - tau)/(2 gamma) = t^2 (1/2 - gt/3 + gt^2/6 - gt^3/15 + gt^4/45)
        return t * t * (0.5 + gt * (-1.0 / 3.0 + gt * (1.0 / 6.0 + gt * (-1.0 / 15.0 + gt / 45.0))))
    return (t - scaled_time_tau(gamma, t)) / (2.0 * gamma)


def validate_regime(c: PhysicalConstants, b: BathParams) -> list[str]:
    """Return warnings when the high-temperature condition kB T >> hbar gamma
    fails; ">>" is operationalized as a factor of 10."""
    warnings = []
    if c.kB * b.T < 10.0 * c.hbar * b.gamma:
        warnings.append(
            "kB*T = %.6g is not large against hbar*gamma = %.6g "
            "(need a factor >= 10); dissipative results may be outside "
            "the model's validity range" % (c.kB * b.T, c.hbar * b.gamma)
        )
    return warnings
