import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kregbattery.closed_form import PERIOD, closed_form_work, integrated_average_work
from kregbattery.engine import QuantumState, evolve_stabilizer_product, partial_trace_block, to_dense
from kregbattery.errors import ValidationError
from kregbattery.metrics import (
    TimeSeries,
    average_work,
    block_energy_and_ergotropy,
    ergotropy,
    fraction_extractable,
    general_work,
    integrate,
    max_average_power,
    passive_energy,
    scaling_exponent,
    stored_work,
    work_function,
    work_series,
)
from kregbattery.models import (
    CollectiveCharger,
    LocalBattery,
    ModelSpec,
    RegularCharger,
    ground_state,
    local_battery,
    stabilizer_generators,
)
from kregbattery.pauli import PauliString, PauliSum


def test_stored_work_examples():
    n = 6
    psi0 = ground_state(LocalBattery("Z"), n)
    H_B = local_battery(n, "Z")
    assert stored_work(H_B, psi0, psi0) == 0
    psi = evolve_stabilizer_product(stabilizer_generators(n, 2), psi0, math.pi / 2)
    assert stored_work(H_B, psi0, psi) == pytest.approx(12)


def test_stored_work_x_k4():
    # N = 8 so that K = 4 lies below K_max and the cos^K law applies
    w = work_function(ModelSpec(8, LocalBattery("X"), RegularCharger(4)))
    assert w(np.array([math.pi / 8]))[0] == pytest.approx(8 * (1 - math.cos(math.pi / 4) ** 4))


@pytest.mark.parametrize("axis", "XYZ")
@pytest.mark.parametrize("n", [5, 8])
def test_engines_agree(axis, n):
    spec = ModelSpec(n, LocalBattery(axis), RegularCharger(2))
    a = work_series(spec, engine="product")
    b = work_series(spec, engine="spectral")
    assert a.max_abs_diff(b) < 1e-10
    assert a.max_abs_diff(closed_form_work(axis, n, 2, a.ts)) < 1e-9


def test_work_series_only_t0():
    s = work_series(ModelSpec(6, LocalBattery("X"), RegularCharger(2), 0.0, 0.0, 1))
    assert s.values.tolist() == [0.0]


def test_collective_work_runs():
    s = work_series(ModelSpec(6, LocalBattery("X"), CollectiveCharger(1.0), t_points=11))
    assert s.values[0] == pytest.approx(0, abs=1e-12)
    assert np.all(s.values >= -1e-10)


def test_general_work_interchange():
    ts = np.linspace(0, math.pi, 41)
    a, b = general_work(8, 2, 6, ts), general_work(8, 6, 2, ts)
    assert a.max_abs_diff(b) < 1e-9
    assert a.values[0] == pytest.approx(0, abs=1e-12)


def test_ergotropy_examples():
    Z = to_dense(local_battery(1, "Z"))
    assert ergotropy(QuantumState.density(np.diag([0.75, 0.25])), Z) == pytest.approx(1.0)
    assert ergotropy(QuantumState.density(np.diag([0.0, 1.0])), Z) == 0.0
    assert passive_energy(np.array([0.75, 0.25]), np.array([1.0, -1.0])) == pytest.approx(-0.5)


@given(st.floats(0, math.pi), st.sampled_from("XYZ"))
def test_pure_state_ergotropy_is_work(t, axis):
    n = 4
    psi0 = ground_state(LocalBattery(axis), n)
    psi = evolve_stabilizer_product(stabilizer_generators(n, 2), psi0, t)
    H_B = local_battery(n, axis)
    assert ergotropy(psi, to_dense(H_B)) == pytest.approx(stored_work(H_B, psi0, psi), abs=1e-9)


@pytest.mark.parametrize("axis", "XYZ")
def test_block_ergotropy_matches_dense(axis):
    n = 6
    psi = evolve_stabilizer_product(stabilizer_generators(n, 2), ground_state(LocalBattery(axis), n), 0.9)
    for m in range(1, n + 1):
        energy, erg = block_energy_and_ergotropy(psi, m, axis)
        H_m = PauliSum.from_strings([PauliString.single(m, i, axis) for i in range(m)])
        assert erg == pytest.approx(ergotropy(partial_trace_block(psi, m), H_m), abs=1e-10)
        assert erg <= energy + m + 1e-12


def test_integrate_and_average():
    assert integrate(np.sin, 0, math.pi) == pytest.approx(2, abs=1e-10)
    ts = np.linspace(0, 2, 201)
    assert average_work(TimeSeries(ts, np.full_like(ts, 3.0)), 2.0) == pytest.approx(3.0)
    with pytest.raises(ValidationError):
        average_work(TimeSeries(np.linspace(0, 2, 200), np.ones(200)), 2.0)


@pytest.mark.parametrize("axis,k", [("X", 2), ("X", 4), ("Y", 2), ("Z", 4)])
def test_average_work_matches_law(axis, k):
    n = 10
    spec = ModelSpec(n, LocalBattery(axis), RegularCharger(k), 0.0, PERIOD[axis], 401)
    assert average_work(work_series(spec), PERIOD[axis], n) == pytest.approx(integrated_average_work(axis, k), abs=1e-6)


def test_max_average_power():
    p, t = max_average_power(lambda t: 1 - np.cos(2 * t))
    assert p == pytest.approx(1.4492227075534, abs=1e-9)
    assert t == pytest.approx(1.1655611835, abs=1e-6)
    p, _ = max_average_power(lambda t: 2.5 * t)
    assert p == pytest.approx(2.5)


def test_scaling_exponent():
    xs = np.array([4, 6, 8, 10])
    fit = scaling_exponent(xs, 2 * xs)
    assert fit.beta == pytest.approx(1) and fit.residual < 1e-12 and fit.prefactor == pytest.approx(2)
    assert scaling_exponent(xs, 3 * np.sqrt(xs)).beta == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        scaling_exponent([1, 2], [1, -1])


def test_fraction_extractable():
    assert fraction_extractable(6, 2, "Z", 6, n_grid=101) == pytest.approx(1, abs=1e-12)
    rz = fraction_extractable(8, 2, "Z", 4, n_grid=101)
    rx = fraction_extractable(8, 2, "X", 4, n_grid=101)
    ry = fraction_extractable(8, 2, "Y", 4, n_grid=101)
    assert rz > max(rx, ry)
    assert fraction_extractable(6, 2, "Z", 2, n_grid=101) == pytest.approx(
        fraction_extractable(10, 2, "Z", 2, n_grid=101), abs=1e-6)
