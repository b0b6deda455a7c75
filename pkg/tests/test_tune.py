import numpy as np
import pytest

from mecoff.allocate import order_units
from mecoff.errors import InvalidParameterError
from mecoff.model import ChannelState, DeviceCaps, MecCaps, Unit, snr, uplink_rate
from mecoff.schedule import assignment_from_bits, check_constraints, evaluate
from mecoff.tune import (
    F_MIN_FLOOR,
    TunedSolution,
    min_feasible_frequency,
    min_feasible_power,
    optimize_user,
    tx_energy_total,
)
from oracles import grid_search_best

MEC = MecCaps(f_mec=20e9)


def channel(mean_snr_at_1w=100.0, bw=20e6, h=1.0):
    return ChannelState(h=h, bw=bw, n0=1.0 / (bw * mean_snr_at_1w))


def caps(user_deadline=0.2, f_max=2e9, p_max=1.0, kappa=1e-26):
    return DeviceCaps(f_max=f_max, p_max=p_max, kappa=kappa, user_deadline=user_deadline)


def unit(uid, d=1e6, w=2e8, deadline=0.1):
    return Unit(id=uid, user=0, task_id=0, type_id=uid, source_id=uid,
                d=d, w=w, deadline=deadline)


class TestTxEnergyTotal:
    def test_identity_case(self):
        # D = bw bits, unity gain factor: eta = 2, log_2(2) = 1 -> 1 J
        ch = ChannelState(h=1.0, bw=1.0, n0=1.0)
        assert tx_energy_total(1.0, 1.0, ch) == pytest.approx(1.0)

    def test_direct_evaluation(self):
        ch = ChannelState(h=1.0, bw=1.0, n0=1.0)
        assert tx_energy_total(1.0, 3.0, ch) == pytest.approx(1.5)

    def test_rejects_nonpositive_power(self):
        with pytest.raises(InvalidParameterError):
            tx_energy_total(1e6, 0.0, channel())

    def test_equals_power_times_duration(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            ch = channel(mean_snr_at_1w=float(rng.uniform(1, 1e5)),
                         h=float(rng.uniform(0.05, 3.0)))
            p = float(rng.uniform(1e-4, 1.0))
            d = float(rng.uniform(1e4, 1e7))
            direct = p * d / uplink_rate(ch, snr(p, ch))
            assert tx_energy_total(d, p, ch) == pytest.approx(direct, rel=1e-9)

    def test_strictly_increasing_in_power(self):
        ch = channel()
        ps = np.linspace(1e-4, 1.0, 500)
        es = [tx_energy_total(1e6, p, ch) for p in ps]
        assert all(b > a for a, b in zip(es, es[1:]))


class TestMinFeasibleFrequency:
    def test_no_local_units_returns_floor(self):
        us = [unit(0)]
        asg = assignment_from_bits([0], [1])
        f = min_feasible_frequency(asg, us, channel(), MEC, caps(), p=1.0)
        assert f == F_MIN_FLOOR

    def test_matches_closed_form(self):
        # single local unit: smallest clock is w / deadline
        us = [unit(0, w=1e8, deadline=0.1)]
        asg = assignment_from_bits([0], [0])
        f = min_feasible_frequency(asg, us, channel(), MEC, caps(user_deadline=10.0), p=1.0)
        assert f == pytest.approx(1e9, rel=1e-6)

    def test_infeasible_when_cap_too_low(self):
        us = [unit(0, w=3e8, deadline=0.1)]
        asg = assignment_from_bits([0], [0])
        assert min_feasible_frequency(asg, us, channel(), MEC, caps(f_max=2e9), p=1.0) is None

    def test_cumulative_constraint_drives_clock(self):
        # two local units; the second's cumulative deadline dominates
        us = [unit(0, w=1e8, deadline=0.1), unit(1, w=2e8, deadline=0.12)]
        asg = assignment_from_bits([0, 1], [0, 0])
        f = min_feasible_frequency(
            asg, us, channel(), MEC, caps(user_deadline=10.0, f_max=4e9), p=1.0
        )
        assert f == pytest.approx(3e8 / 0.12, rel=1e-6)

    def test_within_tolerance_of_fine_grid(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            us = [unit(i, w=float(rng.integers(4e7, 1.3e8)), deadline=0.2)
                  for i in range(3)]
            asg = assignment_from_bits([u.id for u in order_units(us)], [0, 0, 0])
            c = caps(user_deadline=0.5)
            f = min_feasible_frequency(asg, us, channel(), MEC, c, p=1.0)
            assert f is not None
            # independent fine grid: step 1e-7 of the range
            step = 1e-7 * c.f_max
            grid = np.arange(max(step, f - 1000 * step), min(c.f_max, f + 1000 * step), step)
            feasible = [
                g for g in grid
                if check_constraints(evaluate(asg, us, g, 1.0, channel(), MEC, c), us, c).ok
            ]
            assert feasible
            assert abs(f - feasible[0]) / feasible[0] <= 1e-6


class TestMinFeasiblePower:
    def test_no_offloaded_units_returns_zero(self):
        us = [unit(0)]
        asg = assignment_from_bits([0], [0])
        assert min_feasible_power(asg, us, channel(), MEC, caps(), f=2e9) == 0.0

    def test_matches_closed_form_single_unit(self):
        # required rate r* = d / (deadline - compute); p = (2^(r*/bw) - 1) * bw * n0 / h^2
        ch = channel(mean_snr_at_1w=1000.0)
        us = [unit(0, d=2e6, w=4e8, deadline=0.05)]
        asg = assignment_from_bits([0], [1])
        p = min_feasible_power(asg, us, ch, MEC, caps(user_deadline=1.0), f=2e9)
        r_star = 2e6 / (0.05 - 4e8 / 20e9)
        expected = (2 ** (r_star / ch.bw) - 1) * ch.bw * ch.n0 / ch.h**2
        assert p == pytest.approx(expected, rel=1e-6)

    def test_infeasible_beyond_cap(self):
        ch = channel(mean_snr_at_1w=1.0)  # terrible channel
        us = [unit(0, d=5e6, w=4e8, deadline=0.03)]
        asg = assignment_from_bits([0], [1])
        assert min_feasible_power(asg, us, ch, MEC, caps(), f=2e9) is None

    def test_local_side_beyond_repair(self):
        us = [unit(0, w=1e9, deadline=0.1), unit(1, d=1e5, w=1e7, deadline=0.2)]
        asg = assignment_from_bits([0, 1], [0, 1])
        # local unit needs 0.5 s at f_max: no power can fix that
        assert min_feasible_power(asg, us, channel(), MEC, caps(), f=2e9) is None

    def test_within_tolerance_of_fine_grid(self):
        rng = np.random.default_rng(8)
        checked = 0
        for _ in range(40):
            ch = channel(mean_snr_at_1w=float(rng.uniform(20, 300)))
            us = [unit(i, d=float(rng.integers(5e5, 3e6)),
                       w=float(rng.integers(5e7, 5e8)),
                       deadline=float(rng.choice([0.05, 0.1]))) for i in range(2)]
            asg = assignment_from_bits([u.id for u in order_units(us)], [1, 1])
            c = caps(user_deadline=0.5)
            p = min_feasible_power(asg, us, ch, MEC, c, f=2e9)
            if p is None or p < 0.1:  # keep the grid step meaningful
                continue
            checked += 1
            step = 1e-7 * c.p_max
            grid = np.arange(max(step, p - 2000 * step), min(c.p_max, p + 2000 * step), step)
            feasible = [
                g for g in grid
                if check_constraints(evaluate(asg, us, 2e9, g, ch, MEC, c), us, c).ok
            ]
            assert feasible
            assert abs(p - feasible[0]) / feasible[0] <= 1e-6
        assert checked >= 5


class TestOptimizeUser:
    def test_empty_feasible_set_is_total_failure(self):
        # nothing fits: local too slow, channel too weak
        ch = channel(mean_snr_at_1w=0.01)
        us = [unit(0, d=5e6, w=4e9, deadline=0.05)]
        assert optimize_user(us, ch, MEC, caps()) is None

    def test_terrible_channel_prefers_local(self):
        ch = channel(mean_snr_at_1w=1e-3)
        us = [unit(i, d=1e6, w=5e7, deadline=0.1) for i in range(3)]
        sol = optimize_user(us, ch, MEC, caps(user_deadline=0.5))
        assert sol is not None
        assert sol.assignment.bits() == (0, 0, 0)

    def test_never_worse_than_untuned(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            ch = channel(mean_snr_at_1w=float(rng.uniform(10, 1e4)))
            us = [unit(i, d=float(rng.integers(2e5, 2e6)),
                       w=float(rng.integers(5e7, 1e9)),
                       deadline=float(rng.choice([0.1, 0.2]))) for i in range(4)]
            c = caps(user_deadline=0.4)
            sol = optimize_user(us, ch, MEC, c)
            if sol is None:
                continue
            untuned = evaluate(sol.assignment, us, c.f_max, c.p_max, ch, MEC, c)
            assert sol.energy <= untuned.e_total + 1e-12

    def test_returned_solution_is_revalidated(self):
        ch = channel()
        us = [unit(i) for i in range(3)]
        c = caps()
        sol = optimize_user(us, ch, MEC, c)
        assert sol is not None
        report = check_constraints(sol.schedule, us, c)
        assert report.ok
        assert sol.f <= c.f_max and sol.p <= c.p_max
        assert sol.energy == sol.schedule.e_total

    def test_close_to_exhaustive_grid(self):
        rng = np.random.default_rng(23)
        gaps = []
        for _ in range(15):
            ch = channel(mean_snr_at_1w=float(rng.uniform(20, 2000)))
            k = int(rng.integers(2, 5))
            us = [unit(i, d=float(rng.integers(2e5, 2e6)),
                       w=float(rng.integers(5e7, 8e8)),
                       deadline=float(rng.choice([0.1, 0.2]))) for i in range(k)]
            c = caps(user_deadline=0.4)
            sol = optimize_user(us, ch, MEC, c)
            best = grid_search_best(us, ch, MEC, c)
            if sol is None:
                assert best is None or best == pytest.approx(0.0)
                continue
            assert best is not None
            gaps.append((sol.energy - best) / best)
        # the tuner may beat the discrete grid but must never trail it
        assert max(gaps) <= 5e-3
