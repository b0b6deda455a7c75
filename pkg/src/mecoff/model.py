"""Physical cost model: SNR, uplink rate, per-unit latencies and energies.

Everything here is a pure function of explicit inputs over small frozen
dataclasses, so every value is unit-testable and safe to call from any
number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConstraintViolationError, InvalidParameterError


@dataclass(frozen=True)
class Unit:
    """Smallest indivisible piece of work.

    Attributes:
        id: unique within a user.
        user: owning device.
        task_id: task this unit was split from.
        type_id: kind of computation performed.
        source_id: information source feeding the unit. Two units matching
            on (type_id, source_id) are interchangeable copies; two sharing
            only source_id consume the same input data.
        d: input size in bits.
        w: workload in CPU cycles.
        deadline: completion requirement in seconds.
    """

    id: int
    user: int
    task_id: int
    type_id: int
    source_id: int
    d: float
    w: float
    deadline: float

    def __post_init__(self):
        if self.d <= 0 or self.w <= 0 or self.deadline <= 0:
            raise InvalidParameterError(
                f"unit {self.id}: d, w and deadline must be positive "
                f"(d={self.d}, w={self.w}, deadline={self.deadline})"
            )


@dataclass(frozen=True)
class ChannelState:
    """Uplink channel: amplitude gain h, bandwidth bw in Hz, noise density n0 in W/Hz."""

    h: float
    bw: float
    n0: float

    def __post_init__(self):
        if self.h < 0:
            raise InvalidParameterError(f"channel gain must be >= 0, got {self.h}")
        if self.bw <= 0 or self.n0 <= 0:
            raise InvalidParameterError(
                f"bandwidth and noise density must be positive (bw={self.bw}, n0={self.n0})"
            )


@dataclass(frozen=True)
class DeviceCaps:
    """Device-side limits: clock cap, transmit power cap, CPU energy constant
    kappa (J·s²/cycle³ scale) and the whole-user completion deadline."""

    f_max: float
    p_max: float
    kappa: float
    user_deadline: float

    def __post_init__(self):
        if min(self.f_max, self.p_max, self.kappa, self.user_deadline) <= 0:
            raise InvalidParameterError("all device capability fields must be positive")


@dataclass(frozen=True)
class MecCaps:
    """Edge-server compute rate reserved for one user, in cycles/s."""

    f_mec: float

    def __post_init__(self):
        if self.f_mec <= 0:
            raise InvalidParameterError(f"f_mec must be positive, got {self.f_mec}")


def snr(p: float, ch: ChannelState) -> float:
    """Signal-to-noise ratio p*h^2 / (bw*n0) at transmit power p."""
    return p * ch.h * ch.h / (ch.bw * ch.n0)


def uplink_rate(ch: ChannelState, snr_value: float) -> float:
    """Shannon uplink rate bw*log2(1+snr) in bits/s.

    Returns 0 for snr 0; a zero rate must be rejected before any division
    (see tx_latency).
    """
    if snr_value < 0:
        raise InvalidParameterError(f"snr must be >= 0, got {snr_value}")
    return ch.bw * math.log2(1.0 + snr_value)


def local_latency(w: float, f: float) -> float:
    """Seconds to run w cycles at clock f."""
    if f <= 0:
        raise InvalidParameterError(f"clock frequency must be positive, got {f}")
    return w / f


def local_energy(caps: DeviceCaps, w: float, f: float) -> float:
    """Joules to run w cycles at clock f: kappa * w * f^2."""
    if f > caps.f_max:
        raise ConstraintViolationError(
            ["C4"], f"clock {f} exceeds device cap f_max={caps.f_max}"
        )
    return caps.kappa * w * f * f


def tx_latency(d: float, r: float) -> float:
    """Seconds to push d bits through an uplink running at r bits/s."""
    if r <= 0:
        raise InvalidParameterError(f"transmission requires a positive rate, got {r}")
    return d / r


def tx_energy(p: float, t: float) -> float:
    """Joules spent transmitting for t seconds at power p."""
    return p * t


def mec_latency(w: float, mec: MecCaps) -> float:
    """Seconds for the edge server to run w cycles."""
    return w / mec.f_mec
