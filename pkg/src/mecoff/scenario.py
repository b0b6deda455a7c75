"""Seeded synthetic scenario generation.

A scenario is a pure function of (config, snr setpoint, seed): per user a
Rayleigh channel draw, a handful of tasks split into units, and per task a
frame sequence with planted pairwise correlations. All randomness flows
through one numpy Generator, so equal seeds reproduce scenarios bit for
bit.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .correlation import Frame
from .errors import ConfigError
from .model import ChannelState, DeviceCaps, MecCaps, Unit

_CYCLE_MODELS = ("per_bit", "per_task")
_FILTER_MODES = ("multi", "single")


@dataclass(frozen=True)
class ScenarioConfig:
    """Knobs for the synthetic workload generator.

    Pair fields are inclusive (lo, hi) ranges. cycle_density is cycles per
    input bit under cycle_model="per_bit" (the default) or total cycles per
    task under "per_task". dup_unit_fraction / shared_source_fraction are
    the per-task probabilities of planting an exact copy of an earlier unit
    (correlation degree 1) or a unit reading an earlier unit's source
    (degree 0.5). alpha/beta are the time-domain filter thresholds used by
    the frame-filtering methods.
    """

    n_users: int = 4
    tasks_per_user: tuple[int, int] = (1, 2)
    units_per_task: tuple[int, int] = (2, 5)
    task_size: tuple[float, float] = (1e6, 3e6)  # bits
    cycle_density: tuple[float, float] = (1500.0, 4500.0)
    cycle_model: str = "per_bit"
    bw: float = 20e6  # Hz
    f_max: float = 2e9  # cycles/s, device
    f_mec: float = 20e9  # cycles/s, edge share per user
    kappa: float = 1e-11
    deadlines: tuple[float, ...] = (0.05, 0.1)  # seconds, drawn per task
    user_deadline: float = 0.1
    target_snr_db: tuple[float, ...] = (10.0, 20.0, 30.0, 40.0, 50.0)
    p_max: float = 1.0  # W
    frames_per_task: int = 4
    frame_len: int = 256
    frame_rho: tuple[float, float] = (0.3, 0.99)
    dup_unit_fraction: float = 0.15
    shared_source_fraction: float = 0.15
    alpha: float = 0.9
    beta: float = 0.5
    filter_mode: str = "multi"
    seed: int = 0

    def validate(self) -> None:
        def pair(name, lo_ok=0.0):
            v = getattr(self, name)
            if len(v) != 2 or v[0] > v[1] or v[0] <= lo_ok:
                raise ConfigError(f"{name}: need a positive (lo, hi) range, got {v}")

        if self.n_users < 1:
            raise ConfigError(f"n_users: must be >= 1, got {self.n_users}")
        pair("tasks_per_user")
        pair("units_per_task")
        pair("task_size")
        pair("cycle_density")
        if self.cycle_model not in _CYCLE_MODELS:
            raise ConfigError(f"cycle_model: expected one of {_CYCLE_MODELS}")
        for name in ("bw", "f_max", "f_mec", "kappa", "user_deadline", "p_max"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name}: must be positive, got {getattr(self, name)}")
        if not self.deadlines or any(d <= 0 for d in self.deadlines):
            raise ConfigError(f"deadlines: need positive values, got {self.deadlines}")
        if not self.target_snr_db:
            raise ConfigError("target_snr_db: need at least one setpoint")
        if self.frames_per_task < 1:
            raise ConfigError(f"frames_per_task: must be >= 1, got {self.frames_per_task}")
        if self.frame_len < 2:
            raise ConfigError(f"frame_len: must be >= 2, got {self.frame_len}")
        if not -1.0 <= self.frame_rho[0] <= self.frame_rho[1] <= 1.0:
            raise ConfigError(f"frame_rho: need -1 <= lo <= hi <= 1, got {self.frame_rho}")
        for name in ("dup_unit_fraction", "shared_source_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name}: must lie in [0, 1], got {v}")
        if self.dup_unit_fraction + self.shared_source_fraction > 1.0:
            raise ConfigError("dup_unit_fraction + shared_source_fraction must be <= 1")
        if not 0.0 < self.beta < self.alpha < 1.0:
            raise ConfigError(
                f"filter thresholds: need 0 < beta < alpha < 1, got "
                f"alpha={self.alpha}, beta={self.beta}"
            )
        if self.filter_mode not in _FILTER_MODES:
            raise ConfigError(f"filter_mode: expected one of {_FILTER_MODES}")


@dataclass(frozen=True)
class UserScenario:
    units: tuple[Unit, ...]
    frames: Mapping[int, tuple[Frame, ...]]  # task_id -> frame sequence
    channel: ChannelState
    n_tasks: int


@dataclass(frozen=True)
class Scenario:
    config: ScenarioConfig
    snr_db: float
    users: tuple[UserScenario, ...]
    caps: DeviceCaps
    mec: MecCaps


def sample_channel(rng, target_snr_db: float, bw: float, p_max: float) -> ChannelState:
    """One Rayleigh channel draw at a mean-SNR setpoint.

    The amplitude h is Rayleigh with E[h^2] = 1; the noise density is scaled
    so the mean SNR at full power equals the target:
    n0 = p_max / (bw * 10^(snr_db/10)).
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    h = float(rng.rayleigh(scale=np.sqrt(0.5)))
    n0 = p_max / (bw * 10.0 ** (target_snr_db / 10.0))
    return ChannelState(h=h, bw=bw, n0=n0)


def _exact_corr_partner(rng: np.random.Generator, x: np.ndarray, rho: float) -> np.ndarray:
    """A vector whose sample Pearson correlation with x is exactly rho.

    Mixes the standardized x with noise orthogonalized against it, so the
    realized coefficient is rho up to floating-point rounding.
    """
    xc = x - x.mean()
    xn = xc / np.linalg.norm(xc)
    for _ in range(16):
        z = rng.standard_normal(len(x))
        zc = z - z.mean()
        zc = zc - (zc @ xn) * xn
        nz = np.linalg.norm(zc)
        if nz > 1e-9:
            zn = zc / nz
            return rho * xn + np.sqrt(max(0.0, 1.0 - rho * rho)) * zn
    raise RuntimeError("could not draw noise independent of the reference frame")


def synthesize_frames(
    rng: np.random.Generator,
    n_frames: int,
    length: int,
    rho_lo: float,
    rho_hi: float,
) -> tuple[list[np.ndarray], list[float]]:
    """Frame sequence whose consecutive pairs hit drawn correlation targets.

    Returns (frames, targets); targets[i] is the planted coefficient between
    frames i and i+1, realized exactly by construction.
    """
    frames = [rng.standard_normal(length)]
    targets: list[float] = []
    for _ in range(n_frames - 1):
        rho = float(rng.uniform(rho_lo, rho_hi))
        frames.append(_exact_corr_partner(rng, frames[-1], rho))
        targets.append(rho)
    return frames, targets


def _split_size(rng: np.random.Generator, total: int, n: int) -> list[int]:
    """n integer parts >= 1 summing to total exactly."""
    if n == 1:
        return [total]
    props = rng.random(n) + 0.15
    parts = [max(1, int(total * p / props.sum())) for p in props[:-1]]
    last = total - sum(parts)
    while last < 1:  # give back from the largest part
        i = max(range(n - 1), key=lambda j: parts[j])
        take = min(parts[i] - 1, 1 - last)
        if take <= 0:
            raise ConfigError(f"task of {total} bits cannot be split into {n} units")
        parts[i] -= take
        last += take
    return parts + [last]


def generate(
    config: ScenarioConfig,
    snr_db: float | None = None,
    seed=None,
) -> Scenario:
    """Draw one scenario. snr_db defaults to the first configured setpoint,
    seed to config.seed; seed may be an int or a numpy SeedSequence."""
    config.validate()
    if snr_db is None:
        snr_db = config.target_snr_db[0]
    rng = np.random.default_rng(config.seed if seed is None else seed)

    caps = DeviceCaps(
        f_max=config.f_max,
        p_max=config.p_max,
        kappa=config.kappa,
        user_deadline=config.user_deadline,
    )
    mec = MecCaps(f_mec=config.f_mec)

    users: list[UserScenario] = []
    for user in range(config.n_users):
        channel = sample_channel(rng, snr_db, config.bw, config.p_max)
        n_tasks = int(rng.integers(config.tasks_per_user[0], config.tasks_per_user[1] + 1))
        units: list[Unit] = []
        frames: dict[int, tuple[Frame, ...]] = {}
        uid = 0
        next_type = 0
        next_source = 0
        for task in range(n_tasks):
            size = int(rng.integers(int(config.task_size[0]), int(config.task_size[1]) + 1))
            deadline = float(config.deadlines[int(rng.integers(len(config.deadlines)))])
            n_units = int(
                rng.integers(config.units_per_task[0], config.units_per_task[1] + 1)
            )
            if config.cycle_model == "per_bit":
                density = float(rng.uniform(*config.cycle_density))
                cycles_of = lambda d: d * density
            else:
                total_cycles = float(rng.uniform(*config.cycle_density))
                cycles_of = lambda d: total_cycles * d / size

            # optionally tie this task's first unit to an earlier unit;
            # needs >= 2 units so the drawn task size is still met exactly
            plant: tuple[str, Unit] | None = None
            if units and n_units >= 2:
                roll = float(rng.random())
                if roll < config.dup_unit_fraction:
                    plant = ("dup", units[int(rng.integers(len(units)))])
                elif roll < config.dup_unit_fraction + config.shared_source_fraction:
                    plant = ("shared", units[int(rng.integers(len(units)))])
                if plant is not None and plant[1].d > size - (n_units - 1):
                    plant = None  # the copied unit would not fit in this task

            if plant is not None:
                rest = _split_size(rng, size - int(plant[1].d), n_units - 1) if n_units > 1 else []
                sizes = [int(plant[1].d)] + rest
            else:
                sizes = _split_size(rng, size, n_units)

            for j, d_j in enumerate(sizes):
                if j == 0 and plant is not None:
                    kind, ref = plant
                    if kind == "dup":
                        type_id, source_id, w_j = ref.type_id, ref.source_id, ref.w
                    else:  # shared source, own computation
                        type_id, source_id, w_j = next_type, ref.source_id, cycles_of(d_j)
                        next_type += 1
                else:
                    type_id, source_id, w_j = next_type, next_source, cycles_of(d_j)
                    next_type += 1
                    next_source += 1
                units.append(
                    Unit(
                        id=uid,
                        user=user,
                        task_id=task,
                        type_id=type_id,
                        source_id=source_id,
                        d=float(d_j),
                        w=float(w_j),
                        deadline=deadline,
                    )
                )
                uid += 1

            data, _ = synthesize_frames(
                rng, config.frames_per_task, config.frame_len, *config.frame_rho
            )
            frames[task] = tuple(
                Frame(task_label=task, epoch=i, data=arr) for i, arr in enumerate(data)
            )
        users.append(
            UserScenario(units=tuple(units), frames=frames, channel=channel, n_tasks=n_tasks)
        )
    return Scenario(config=config, snr_db=float(snr_db), users=tuple(users), caps=caps, mec=mec)


def demo_config(seed: int = 42) -> ScenarioConfig:
    """Preset used by the demo and the trend experiments.

    Sized so the methods operate in a mixed-feasibility regime: the edge
    server comfortably fits any drawn workload, transmission is the binding
    resource at the low end of the SNR sweep, and local execution is viable
    only for small units. kappa uses the per-cycle-scale convention so local
    and radio energies are comparable.
    """
    return ScenarioConfig(
        tasks_per_user=(1, 2),
        units_per_task=(2, 3),
        cycle_density=(40.0, 160.0),
        kappa=1e-26,
        deadlines=(0.1, 0.2),
        user_deadline=0.25,
        frames_per_task=4,
        frame_len=256,
        frame_rho=(0.4, 0.995),
        dup_unit_fraction=0.2,
        shared_source_fraction=0.2,
        seed=seed,
    )


# --- flat key = value config files -------------------------------------------

def _parse_int(v: str) -> int:
    return int(v)


def _parse_float(v: str) -> float:
    return float(v)


def _parse_str(v: str) -> str:
    return v


def _parse_int_pair(v: str) -> tuple[int, int]:
    parts = [int(float(x)) for x in v.split(",")]
    if len(parts) != 2:
        raise ValueError("expected 'lo,hi'")
    return (parts[0], parts[1])


def _parse_float_pair(v: str) -> tuple[float, float]:
    parts = [float(x) for x in v.split(",")]
    if len(parts) != 2:
        raise ValueError("expected 'lo,hi'")
    return (parts[0], parts[1])


def _parse_float_tuple(v: str) -> tuple[float, ...]:
    return tuple(float(x) for x in v.split(","))


_FIELD_PARSERS = {
    "n_users": _parse_int,
    "tasks_per_user": _parse_int_pair,
    "units_per_task": _parse_int_pair,
    "task_size": _parse_float_pair,
    "cycle_density": _parse_float_pair,
    "cycle_model": _parse_str,
    "bw": _parse_float,
    "f_max": _parse_float,
    "f_mec": _parse_float,
    "kappa": _parse_float,
    "deadlines": _parse_float_tuple,
    "user_deadline": _parse_float,
    "target_snr_db": _parse_float_tuple,
    "p_max": _parse_float,
    "frames_per_task": _parse_int,
    "frame_len": _parse_int,
    "frame_rho": _parse_float_pair,
    "dup_unit_fraction": _parse_float,
    "shared_source_fraction": _parse_float,
    "alpha": _parse_float,
    "beta": _parse_float,
    "filter_mode": _parse_str,
    "seed": _parse_int,
}


def load_config(path: str | Path) -> ScenarioConfig:
    """Read a flat `key = value` file. Unknown keys are rejected; missing
    keys keep their defaults. Tuples are comma separated; '#' starts a
    comment."""
    overrides = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        parser = _FIELD_PARSERS.get(key)
        if parser is None:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            overrides[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    config = ScenarioConfig(**overrides)
    config.validate()
    return config


def save_config(config: ScenarioConfig, path: str | Path) -> None:
    """Inverse of load_config; writes every field."""
    lines = []
    for key, value in asdict(config).items():
        if isinstance(value, tuple):
            rendered = ",".join(repr(v) for v in value)
        else:
            rendered = repr(value) if not isinstance(value, str) else value
        lines.append(f"{key} = {rendered}")
    Path(path).write_text("\n".join(lines) + "\n")


def dump_scenario(scenario: Scenario, path: str | Path) -> None:
    """Write the drawn units as a columnar text table for inspection.

    Columns: user task unit type source d_bits w_cycles deadline_s.
    """
    lines = [
        f"# snr_db={scenario.snr_db!r} n_users={len(scenario.users)}",
        "# user task unit type source d_bits w_cycles deadline_s",
    ]
    for u, user in enumerate(scenario.users):
        for unit in user.units:
            lines.append(
                f"{u} {unit.task_id} {unit.id} {unit.type_id} {unit.source_id} "
                f"{unit.d!r} {unit.w!r} {unit.deadline!r}"
            )
    Path(path).write_text("\n".join(lines) + "\n")
