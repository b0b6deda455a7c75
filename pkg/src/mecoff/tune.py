"""Per-placement resource tuning and the overall user optimization.

For a fixed placement the two knobs decouple: the clock only moves local
completion times and the transmit power only moves the offload pipeline,
so the least-energy feasible point is (smallest feasible f, smallest
feasible p). CPU energy grows as f^2 and transmission energy grows
strictly with p (ln(1+x) > x/(1+x)), hence "smallest feasible" is also
"cheapest". Both minima are found by bisection; the user-level optimum is
the cheapest tuned member of the feasible placement set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .allocate import enumerate_feasible, order_units
from .errors import InvalidParameterError
from .model import ChannelState, DeviceCaps, MecCaps, Unit, snr, uplink_rate
from .schedule import (
    Assignment,
    ScheduleResult,
    assignment_from_bits,
    check_constraints,
    evaluate,
)

# Clock returned when nothing runs locally; local energy is zero regardless.
F_MIN_FLOOR = 1e6

# Bisections run to 1e-8 relative width, comfortably inside the documented
# 1e-6 guarantee. The absolute floors stop the loop when the feasible region
# extends all the way to zero.
_REL_TOL = 1e-8
_ABS_F = 1e-3
_ABS_P = 1e-15


@dataclass(frozen=True)
class TunedSolution:
    """A placement together with its tuned clock, power and resulting cost."""

    assignment: Assignment
    f: float
    p: float
    energy: float
    schedule: ScheduleResult


def tx_energy_total(d_total: float, p: float, ch: ChannelState) -> float:
    """Energy to push d_total bits at power p: (D/bw) * p * log_eta(2)
    with eta = 1 + snr(p). Algebraically identical to p * D / rate(p).
    """
    if p <= 0:
        raise InvalidParameterError(f"transmit power must be positive, got {p}")
    eta = 1.0 + snr(p, ch)
    return (d_total / ch.bw) * p * (math.log(2.0) / math.log(eta))


def _split_units(
    assignment: Assignment, units: Iterable[Unit]
) -> tuple[list[Unit], list[Unit]]:
    by_id = {u.id: u for u in units}
    local = [by_id[i] for i in assignment.local_ids()]
    offloaded = [by_id[i] for i in assignment.mec_ids()]
    return local, offloaded


def _mec_side(
    offloaded: Sequence[Unit], rate: float, mec: MecCaps
) -> tuple[bool, float]:
    """(every offloaded unit meets its deadline, last completion time)."""
    if not offloaded:
        return True, 0.0
    if rate <= 0:
        return False, math.inf
    fin_tx = 0.0
    done = 0.0
    ok = True
    for u in offloaded:
        fin_tx += u.d / rate
        done = max(fin_tx, done) + u.w / mec.f_mec
        if done > u.deadline:
            ok = False
            break
    return ok, done


def min_feasible_frequency(
    assignment: Assignment,
    units: Iterable[Unit],
    ch: ChannelState,
    mec: MecCaps,
    caps: DeviceCaps,
    p: float,
) -> float | None:
    """Smallest clock in (0, f_max] keeping the placement feasible at power p.

    Local completion times shrink strictly as f grows, so feasibility is
    monotone and bisection applies. Returns F_MIN_FLOOR when nothing runs
    locally and None when even f_max fails.
    """
    local, offloaded = _split_units(assignment, units)
    if not local:
        rate = uplink_rate(ch, snr(p, ch)) if p > 0 else 0.0
        mec_ok, mec_last = _mec_side(offloaded, rate, mec)
        if not mec_ok or mec_last > caps.user_deadline:
            return None
        return F_MIN_FLOOR

    rate = uplink_rate(ch, snr(p, ch)) if p > 0 else 0.0
    mec_ok, mec_last = _mec_side(offloaded, rate, mec)
    if not mec_ok or mec_last > caps.user_deadline:
        return None  # no clock can repair the offloaded side

    cum = 0.0
    cum_w: list[float] = []
    for u in local:
        cum += u.w
        cum_w.append(cum)
    deadlines = [u.deadline for u in local]
    t_user = caps.user_deadline

    def feasible(f: float) -> bool:
        if any(cw > dl * f for cw, dl in zip(cum_w, deadlines)):
            return False
        return cum_w[-1] <= t_user * f

    if not feasible(caps.f_max):
        return None
    lo, hi = 0.0, caps.f_max
    while hi - lo > _REL_TOL * hi + _ABS_F:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def min_feasible_power(
    assignment: Assignment,
    units: Iterable[Unit],
    ch: ChannelState,
    mec: MecCaps,
    caps: DeviceCaps,
    f: float,
) -> float | None:
    """Smallest power in (0, p_max] keeping the placement feasible at clock f.

    Transmission energy is strictly increasing in p while every offloaded
    completion time is strictly decreasing, so the cheapest feasible power
    is the smallest one. Returns 0 when nothing is offloaded and None when
    even p_max fails.
    """
    local, offloaded = _split_units(assignment, units)
    if not offloaded:
        return 0.0

    local_last = sum(u.w for u in local) / f if local else 0.0
    if local:
        cum = 0.0
        for u in local:
            cum += u.w
            if cum / f > u.deadline:
                return None  # no power can repair the local side
    if local_last > caps.user_deadline:
        return None
    t_user = caps.user_deadline

    def feasible(p: float) -> bool:
        rate = uplink_rate(ch, snr(p, ch)) if p > 0 else 0.0
        ok, mec_last = _mec_side(offloaded, rate, mec)
        return ok and max(mec_last, local_last) <= t_user

    if not feasible(caps.p_max):
        return None
    lo, hi = 0.0, caps.p_max
    while hi - lo > _REL_TOL * hi + _ABS_P:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def optimize_user(
    units: Iterable[Unit],
    ch: ChannelState,
    mec: MecCaps,
    caps: DeviceCaps,
) -> TunedSolution | None:
    """Least-energy tuned placement for one user, or None when nothing fits.

    The feasible set is built at (f_max, p_max); each member is tuned
    clock-first (at p_max) then power (at the tuned clock), re-validated,
    and scored. Ties prefer fewer offloaded units, then the
    lexicographically smaller placement bits.
    """
    units = tuple(units)
    ordered = order_units(units)
    feasible_set = enumerate_feasible(ordered, caps.f_max, caps.p_max, ch, mec, caps)
    if not feasible_set.bits:
        return None

    best_key: tuple | None = None
    best: TunedSolution | None = None
    for bits in feasible_set.bits:
        asg = assignment_from_bits(feasible_set.order, bits)
        f_star = min_feasible_frequency(asg, units, ch, mec, caps, p=caps.p_max)
        if f_star is None:  # cannot happen for members of the feasible set
            continue
        p_star = min_feasible_power(asg, units, ch, mec, caps, f=f_star)
        if p_star is None:
            continue
        result = evaluate(asg, units, f_star, p_star, ch, mec, caps)
        report = check_constraints(result, units, caps)
        if not report.ok:
            raise RuntimeError(
                f"tuned point (f={f_star}, p={p_star}) failed revalidation: "
                f"{report.violations}"
            )
        key = (result.e_total, sum(bits), bits)
        if best_key is None or key < best_key:
            best_key = key
            best = TunedSolution(
                assignment=asg, f=f_star, p=p_star, energy=result.e_total, schedule=result
            )
    return best
