import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pxbar.crossbar import vmm_ideal
from pxbar.device import Pulse
from pxbar.energy import EnergyReport, Trace, energy_report, report_from_rows


def test_mac_count_one_read(make_array):
    a = make_array(3, 7)
    trace = Trace()
    vmm_ideal(a, np.full(3, 0.1), trace)
    assert energy_report(trace).mac_count == 21


def test_zero_voltage_zero_energy(make_array):
    trace = Trace()
    vmm_ideal(make_array(4, 4), np.zeros(4), trace)
    rep = energy_report(trace)
    assert rep.read_energy == 0.0
    assert rep.macs_per_second_per_watt == math.inf


def test_two_by_two_read_energy():
    trace = Trace()
    trace.record_read([1.0, 1.0], np.full((2, 2), 1e-6), 1e-9)
    assert energy_report(trace).read_energy == pytest.approx(4e-15, rel=1e-15)


def test_program_energy_by_domain():
    trace = Trace()
    trace.record_program(Pulse("electrical", "set", 2.0, 1e-8), 1e-5)
    trace.record_program(Pulse("optical", "set", 1e-3, 1e-9), 1e-5)
    rep = energy_report(trace)
    assert rep.program_energy == pytest.approx(4.0 * 1e-5 * 1e-8 + 1e-3 * 1e-9, rel=1e-15)
    assert rep.wall_model_time == pytest.approx(1.1e-8, rel=1e-15)
    assert rep.mac_count == 0
    assert rep.macs_per_second_per_watt == 0.0


def test_metric_definition():
    rep = EnergyReport(100, 2e-12, 3e-12, 1e-6)
    assert rep.macs_per_second_per_watt == pytest.approx(100 / 5e-12, rel=1e-15)
    assert rep.as_dict()["total_energy_J"] == pytest.approx(5e-12, rel=1e-15)
    assert "macs_per_second_per_watt" in rep.to_text()


def test_summary_rows_rebuild_report(rng):
    trace = Trace()
    for _ in range(5):
        trace.record_read(rng.uniform(0, 0.2, 3), rng.uniform(1e-6, 1e-4, (3, 2)), 1e-8)
    trace.record_program(Pulse("electrical", "reset", 2.0, 1e-7), 3e-5)
    assert report_from_rows(trace.summary_rows()) == energy_report(trace)


events = st.lists(
    st.tuples(
        st.lists(st.floats(0, 0.5), min_size=2, max_size=2),
        st.floats(1e-7, 1e-3),
        st.floats(1e-10, 1e-7),
    ),
    max_size=8,
)


def build(evts):
    t = Trace()
    for v, g, dt in evts:
        t.record_read(v, np.full((2, 3), g), dt)
    return t


@given(a=events, b=events)
def test_report_additive(a, b):
    ta, tb = build(a), build(b)
    whole = energy_report(ta + tb)
    parts = energy_report(ta) + energy_report(tb)
    assert whole.mac_count == parts.mac_count
    assert whole.read_energy == pytest.approx(parts.read_energy, rel=1e-12, abs=1e-300)
    assert whole.wall_model_time == pytest.approx(parts.wall_model_time, rel=1e-12, abs=1e-300)
