"""The five-method comparison ladder.

M1  task granularity, least-energy feasible placement at maximum clock and
    power, no tuning.
M2  M1 plus clock/power tuning per placement.
M3  M2 at unit granularity (tasks split before the search).
M4  M3 plus time-domain frame filtering to shrink the workload.
M5  M4 plus task-domain dedup and shared-source merging.

A user whose placement tree yields no feasible leaf fails at decision time:
all of its tasks are recorded as failed at zero energy.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .allocate import enumerate_feasible, order_units
from .correlation import Frame, dedup, filter_multi, filter_single, merge_shared_source
from .errors import InvalidParameterError
from .model import ChannelState, DeviceCaps, MecCaps, Unit
from .scenario import Scenario, UserScenario
from .schedule import assignment_from_bits, evaluate
from .tune import TunedSolution, optimize_user

METHOD_IDS = ("M1", "M2", "M3", "M4", "M5")


@dataclass(frozen=True)
class MethodResult:
    """Per-user outcome of one method run.

    Failed tasks contribute zero energy; `ts` is the achieved makespan (0
    when the user failed outright and nothing ran).
    """

    user: int
    energy: float
    failed_tasks: int
    total_tasks: int
    ts: float
    solution: TunedSolution | None


def _atomic_tasks(units: tuple[Unit, ...]) -> tuple[Unit, ...]:
    """Collapse each task to a single unit: summed bits and cycles, the
    tightest member deadline, the smallest member id. type/source ids are
    synthetic negatives so atoms never correlate."""
    by_task: dict[int, list[Unit]] = {}
    for u in units:
        by_task.setdefault(u.task_id, []).append(u)
    atoms = []
    for task_id in sorted(by_task):
        members = by_task[task_id]
        atoms.append(
            Unit(
                id=min(m.id for m in members),
                user=members[0].user,
                task_id=task_id,
                type_id=-1 - task_id,
                source_id=-1 - task_id,
                d=sum(m.d for m in members),
                w=sum(m.w for m in members),
                deadline=min(m.deadline for m in members),
            )
        )
    return tuple(atoms)


def _filter_fraction(frames: tuple[Frame, ...], alpha: float, beta: float, mode: str) -> float:
    """Mean kept fraction across a task's frame sequence."""
    if len(frames) < 2:
        return 1.0
    if mode == "multi":
        decisions = filter_multi(frames, alpha, beta)
    else:
        decisions = filter_single(frames, alpha)
    return sum(d.kept_fraction for d in decisions) / len(decisions)


def _apply_time_filter(user: UserScenario, alpha: float, beta: float, mode: str) -> tuple[Unit, ...]:
    """Scale every unit's bits and cycles by its task's kept fraction."""
    fractions = {
        task_id: _filter_fraction(frames, alpha, beta, mode)
        for task_id, frames in user.frames.items()
    }
    return tuple(
        replace(u, d=u.d * fractions.get(u.task_id, 1.0), w=u.w * fractions.get(u.task_id, 1.0))
        for u in user.units
    )


def _best_at_maxima(
    units: tuple[Unit, ...], ch: ChannelState, mec: MecCaps, caps: DeviceCaps
) -> TunedSolution | None:
    """Cheapest feasible placement at (f_max, p_max), untuned."""
    feasible_set = enumerate_feasible(order_units(units), caps.f_max, caps.p_max, ch, mec, caps)
    if not feasible_set.bits:
        return None
    best_key = None
    best = None
    for bits in feasible_set.bits:
        asg = assignment_from_bits(feasible_set.order, bits)
        result = evaluate(asg, units, caps.f_max, caps.p_max, ch, mec, caps)
        key = (result.e_total, sum(bits), bits)
        if best_key is None or key < best_key:
            best_key = key
            best = TunedSolution(
                assignment=asg,
                f=caps.f_max,
                p=caps.p_max,
                energy=result.e_total,
                schedule=result,
            )
    return best


def run_method(method_id: str, scenario: Scenario, user_index: int) -> MethodResult:
    """Run one method for one user of a scenario."""
    if method_id not in METHOD_IDS:
        raise InvalidParameterError(f"unknown method {method_id!r}, expected one of {METHOD_IDS}")
    user = scenario.users[user_index]
    cfg = scenario.config
    total_tasks = user.n_tasks

    if method_id in ("M1", "M2"):
        work = _atomic_tasks(user.units)
    else:
        work = user.units
        if method_id in ("M4", "M5"):
            work = _apply_time_filter(user, cfg.alpha, cfg.beta, cfg.filter_mode)
        if method_id == "M5":
            work, _ = dedup(work)
            work, _ = merge_shared_source(work)

    if method_id == "M1":
        solution = _best_at_maxima(work, user.channel, scenario.mec, scenario.caps)
    else:
        solution = optimize_user(work, user.channel, scenario.mec, scenario.caps)

    if solution is None:
        return MethodResult(
            user=user_index,
            energy=0.0,
            failed_tasks=total_tasks,
            total_tasks=total_tasks,
            ts=0.0,
            solution=None,
        )
    return MethodResult(
        user=user_index,
        energy=solution.energy,
        failed_tasks=0,
        total_tasks=total_tasks,
        ts=solution.schedule.ts,
        solution=solution,
    )
