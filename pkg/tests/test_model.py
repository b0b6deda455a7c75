import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mecoff.errors import ConstraintViolationError, InvalidParameterError
from mecoff.model import (
    ChannelState,
    DeviceCaps,
    MecCaps,
    Unit,
    local_energy,
    local_latency,
    mec_latency,
    snr,
    tx_energy,
    tx_latency,
    uplink_rate,
)


def make_channel(h=1.0, bw=1.0, n0=1.0):
    return ChannelState(h=h, bw=bw, n0=n0)


CAPS = DeviceCaps(f_max=2e9, p_max=1.0, kappa=1e-11, user_deadline=0.1)


class TestSnr:
    def test_identity_case(self):
        assert snr(1.0, make_channel()) == 1.0

    def test_zero_power(self):
        assert snr(0.0, make_channel(h=3.0, bw=2e6, n0=1e-9)) == 0.0

    def test_direct_evaluation(self):
        # p=0.1, h^2=4, bw*n0=0.04 -> 10
        ch = make_channel(h=2.0, bw=0.2, n0=0.2)
        assert snr(0.1, ch) == pytest.approx(10.0, rel=1e-12)

    @given(st.floats(0.0, 10.0), st.floats(0.0, 100.0))
    def test_linear_in_power(self, a, p):
        ch = make_channel(h=1.3, bw=2.0, n0=0.5)
        assert snr(a * p, ch) == pytest.approx(a * snr(p, ch), rel=1e-12, abs=1e-300)


class TestUplinkRate:
    def test_snr_one(self):
        assert uplink_rate(make_channel(bw=20e6), 1.0) == pytest.approx(20e6)

    def test_snr_three(self):
        assert uplink_rate(make_channel(bw=20e6), 3.0) == pytest.approx(40e6)

    def test_snr_ten(self):
        assert uplink_rate(make_channel(bw=20e6), 10.0) == pytest.approx(
            20e6 * math.log2(11.0), rel=1e-12
        )

    def test_rejects_negative_snr(self):
        with pytest.raises(InvalidParameterError):
            uplink_rate(make_channel(), -0.1)

    def test_increasing_and_concave(self):
        ch = make_channel(bw=20e6)
        grid = np.linspace(0.0, 200.0, 400)
        rates = np.array([uplink_rate(ch, s) for s in grid])
        first = np.diff(rates)
        assert np.all(first > 0)
        assert np.all(np.diff(first) <= 1e-9 * rates.max())


class TestLocalCompute:
    def test_quotient(self):
        assert local_latency(2e8, 2e9) == pytest.approx(0.1)

    def test_identity(self):
        assert local_latency(3.7e9, 3.7e9) == 1.0

    def test_direct(self):
        assert local_latency(1.875e8, 2e9) == pytest.approx(0.09375)

    def test_rejects_nonpositive_clock(self):
        with pytest.raises(InvalidParameterError):
            local_latency(1e8, 0.0)

    @given(st.floats(1.0, 1e12), st.floats(1e3, 1e10))
    def test_round_trip(self, w, f):
        assert local_latency(w, f) * f == pytest.approx(w, rel=1e-12)

    def test_energy_kappa_scale(self):
        assert local_energy(CAPS, 1e6, 1.0) == pytest.approx(1e-5)

    def test_energy_direct(self):
        assert local_energy(CAPS, 2e8, 2e9) == pytest.approx(8e15)

    def test_energy_increasing_in_clock(self):
        fs = np.linspace(1e6, 2e9, 50)
        es = [local_energy(CAPS, 1e8, f) for f in fs]
        assert all(b > a for a, b in zip(es, es[1:]))

    def test_energy_rejects_overclock(self):
        with pytest.raises(ConstraintViolationError) as err:
            local_energy(CAPS, 1e8, CAPS.f_max * 1.01)
        assert err.value.constraints == ("C4",)


class TestTransmission:
    def test_latency_identity(self):
        assert tx_latency(1e6, 1e6) == 1.0

    def test_latency_chained(self):
        rate = uplink_rate(make_channel(bw=20e6), 10.0)
        assert tx_latency(1e6, rate) == pytest.approx(0.0144533, rel=1e-5)

    def test_latency_direct(self):
        assert tx_latency(2e6, 4e7) == pytest.approx(0.05)

    def test_latency_rejects_zero_rate(self):
        with pytest.raises(InvalidParameterError):
            tx_latency(1e6, 0.0)

    def test_latency_decreasing_in_rate(self):
        rs = np.linspace(1e6, 1e9, 40)
        ts = [tx_latency(5e6, r) for r in rs]
        assert all(b < a for a, b in zip(ts, ts[1:]))

    def test_energy_zero_power(self):
        assert tx_energy(0.0, 123.0) == 0.0

    def test_energy_identity(self):
        assert tx_energy(1.0, 0.05) == pytest.approx(0.05)

    def test_energy_product(self):
        assert tx_energy(0.1, 0.014453) == pytest.approx(0.0014453)


class TestMecLatency:
    def test_identity(self):
        assert mec_latency(2e10, MecCaps(2e10)) == 1.0

    def test_direct(self):
        assert mec_latency(1.875e8, MecCaps(2e10)) == pytest.approx(0.009375)
        assert mec_latency(4.5e8, MecCaps(2e10)) == pytest.approx(0.0225)


class TestDomainTypes:
    def test_unit_rejects_nonpositive_fields(self):
        with pytest.raises(InvalidParameterError):
            Unit(id=0, user=0, task_id=0, type_id=0, source_id=0, d=0, w=1, deadline=1)
        with pytest.raises(InvalidParameterError):
            Unit(id=0, user=0, task_id=0, type_id=0, source_id=0, d=1, w=-1, deadline=1)

    def test_channel_rejects_bad_fields(self):
        with pytest.raises(InvalidParameterError):
            ChannelState(h=-0.1, bw=1.0, n0=1.0)
        with pytest.raises(InvalidParameterError):
            ChannelState(h=1.0, bw=0.0, n0=1.0)

    def test_caps_reject_nonpositive(self):
        with pytest.raises(InvalidParameterError):
            DeviceCaps(f_max=0, p_max=1, kappa=1, user_deadline=1)
        with pytest.raises(InvalidParameterError):
            MecCaps(f_mec=0)
