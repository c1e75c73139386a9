import math

import numpy as np
import pytest

from pairpot.kernels import (
    KERNELS,
    BandwidthSchedule,
    check_moments,
    default_bandwidth_schedule,
    eval_kernel,
    get_kernel,
    lipschitz_check,
    squared_integral,
)


def test_eval_examples():
    assert eval_kernel("epanechnikov", 0.0) == 0.75
    assert eval_kernel("epanechnikov", 1.0) == 0.0
    assert eval_kernel("epanechnikov", 1.5) == 0.0
    assert eval_kernel("box", 0.5) == 1.0
    assert eval_kernel("box", 0.51) == 0.0
    assert eval_kernel("quartic", 0.0) == 15 / 16


@pytest.mark.parametrize("kind", sorted(KERNELS))
def test_symmetric(kind):
    u = np.linspace(0, 1.2, 101)
    assert np.array_equal(eval_kernel(kind, u), eval_kernel(kind, -u))


@pytest.mark.parametrize("kind", sorted(KERNELS))
def test_declared_order_moments(kind):
    k = get_kernel(kind)
    assert check_moments(k, k.order, 1e-9).passed


def test_epanechnikov_is_not_order_three():
    rep = check_moments("epanechnikov", 3, 1e-6)
    assert not rep.passed
    assert rep.moments[2] == pytest.approx(0.2, abs=1e-9)


def test_higher_order_kernel_is_signed():
    assert get_kernel("higher_order_4").signed
    assert eval_kernel("higher_order_4", 0.9) < 0


@pytest.mark.parametrize("kind, value", [("box", 1.0), ("epanechnikov", 0.6), ("quartic", 5 / 7)])
def test_squared_integral(kind, value):
    assert squared_integral(kind) == pytest.approx(value, abs=1e-9)


def test_lipschitz_check():
    c, jump = lipschitz_check("epanechnikov")
    assert c == pytest.approx(1.5, rel=1e-3) and not jump
    c, jump = lipschitz_check("quartic")
    assert c == pytest.approx(KERNELS["quartic"].lipschitz, rel=1e-3) and not jump
    assert lipschitz_check("box")[1]
    with pytest.raises(ValueError):
        lipschitz_check("box", probes=10)


def test_unknown_kernel_and_bad_arguments():
    with pytest.raises(ValueError):
        get_kernel("gaussian")
    with pytest.raises(ValueError):
        check_moments("box", 0, 1e-9)
    with pytest.raises(ValueError):
        check_moments("box", 2, 0.0)


def test_bandwidth_schedule():
    s = BandwidthSchedule(q1=1.0, q2=0.5, constant=2.0)
    assert s(100.0) == pytest.approx(2.0 * 0.1 * math.log(100.0))
    with pytest.raises(ValueError):
        BandwidthSchedule(q1=-1.0)
    with pytest.raises(ValueError):
        BandwidthSchedule(constant=0.0)


def test_default_schedule_passes_its_own_check():
    s = default_bandwidth_schedule("epanechnikov", 2, 1.0, 10.0)
    assert s.q2 == pytest.approx(1 / 6)
    assert s(10.0) == pytest.approx(0.25)
    assert s.check([10.0, 20.0, 40.0, 80.0], 2, 1.0)
    # a constant bandwidth never shrinks, so the mass grows but b does too little
    assert BandwidthSchedule(q2=0.0, constant=0.1).check([10.0, 20.0], 2, 1.0)
    # b * |W| shrinking fails
    assert not BandwidthSchedule(q2=3.0, constant=1.0).check([10.0, 20.0], 2, 1.0)
