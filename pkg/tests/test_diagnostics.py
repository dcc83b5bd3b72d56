import math
from types import SimpleNamespace

import numpy as np
import pytest

from critabs.diagnostics import (
    CSV_COLUMNS,
    TrajectoryRecord,
    compensate,
    compensated_decay,
    convergence_report,
    decay_exponents,
    error_at,
    mass_production,
    poincare_check,
    predicted_support,
    record,
)
from critabs.evolution import EvolutionMode, Mode
from critabs.profiles import Params, barenblatt_value, compute_constants, g_of_a
from critabs.radial import RadialField, RadialGrid, sample_profile

P31 = Params.critical(3, 1)
A_STAR = compute_constants(P31).a_star


def _state(field, mode=Mode.RESCALED_FULL, time=1.0):
    return SimpleNamespace(field=field, time=time, params=P31, mode=EvolutionMode(mode))


def test_csv_header_is_frozen():
    assert ",".join(CSV_COLUMNS) == ("time,l1,linf,grad_linf,grad_lq_q,support_radius,theta,"
                                     "amplitude,profile_error_sup,profile_error_star")


def test_record_of_zero_field():
    grid = RadialGrid(4.0, 64)
    for mode in Mode:
        rec = record(_state(RadialField(grid, np.zeros(64)), mode))
        assert rec.l1 == rec.linf == rec.grad_linf == rec.grad_lq_q == rec.support_radius == 0
        assert rec.amplitude is None


def test_record_of_a_star_profile():
    grid = RadialGrid(16.0, 800)
    rec = record(_state(sample_profile(grid, A_STAR, P31)))
    assert rec.amplitude == pytest.approx(A_STAR, rel=5e-3)
    assert rec.profile_error_sup <= 5e-3 * rec.linf
    assert rec.theta == rec.l1


def test_record_of_unit_profile():
    grid = RadialGrid(4.0, 800)
    rec = record(_state(sample_profile(grid, 1.0, P31)))
    assert rec.theta == pytest.approx(2.9717, rel=5e-3)
    phys = record(_state(sample_profile(grid, 1.0, P31), Mode.PHYSICAL, time=0.0))
    assert phys.amplitude is None and phys.profile_error_sup is None
    assert phys.theta == pytest.approx(phys.l1)


def test_row_formatting():
    rec = TrajectoryRecord(1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0)
    row = rec.as_row()
    assert row[:7] == ["1.0", "2.0", "3.0", "4.0", "5.0", "6.0", "7.0"]
    assert row[7:] == ["", "", ""]


def test_compensated_synthetic_laws():
    t = np.geomspace(10.0, 1e4, 61)
    exact = t**-0.25 * np.log(t) ** -1.5
    fit = compensate(t, exact, *decay_exponents("sup_norm", P31), "sup_norm")
    assert np.allclose(fit.compensated, 1.0, rtol=1e-12, atol=0)
    assert fit.ratio == pytest.approx(1.0, abs=1e-12)
    assert fit.fitted_power == pytest.approx(-0.25, abs=1e-10)

    t2 = np.geomspace(1e2, 1e4, 41)
    pure = compensate(t2, t2**-0.25, -0.25, -1.5)
    full = (math.log(1e4) / math.log(1e2)) ** 1.5
    assert pure.compensated[-1] / pure.compensated[0] == pytest.approx(full, rel=1e-12)
    assert full > 2.8

    const = compensate(t, np.ones_like(t), -0.25, -1.5)
    assert np.all(np.diff(const.compensated) > 0)


def test_decay_exponents():
    assert decay_exponents("sup_norm", P31) == (-0.25, -1.5)
    assert decay_exponents("support", P31) == (0.25, -0.5)
    assert decay_exponents("mass", P31) == (0.0, -2.0)
    with pytest.raises(ValueError):
        decay_exponents("energy", P31)
    with pytest.raises(ValueError):
        compensate([0.5, 1.0], [1.0, 1.0], 0.0, 0.0)


def test_compensated_decay_reads_columns():
    t = np.geomspace(2.0, 200.0, 20)
    recs = [TrajectoryRecord(x, 1.0, x**-0.25 * math.log(x) ** -1.5, 0, 0, 1.0, 0) for x in t]
    fit = compensated_decay(recs, "sup_norm", P31)
    assert fit.ratio == pytest.approx(1.0, abs=1e-12)
    assert set(fit.summary()) >= {"ratio", "plateau_min", "plateau_max", "fitted_power"}


def test_poincare_hat_function():
    grid = RadialGrid(2.0, 200)
    hat = RadialField(grid, np.maximum(1.0 - grid.centers, 0.0))
    lhs, rhs, ratio = poincare_check(hat, 1.0)
    assert lhs == pytest.approx(1.0, abs=1e-12)
    assert rhs == pytest.approx(2.0, abs=1e-12)
    assert ratio == pytest.approx(0.5, abs=1e-6)


def test_poincare_zero_field_and_bad_mu():
    grid = RadialGrid(2.0, 32)
    with pytest.raises(ValueError):
        poincare_check(RadialField(grid, np.zeros(32)), 1.0)
    with pytest.raises(ValueError):
        poincare_check(RadialField(grid, np.ones(32)), 0.5)


@pytest.mark.parametrize("mu", [1.0, 2.5])
def test_poincare_dilation_invariance(mu):
    ratios = []
    for lam in (1.0, 2.0, 4.0):
        grid = RadialGrid(16.0, 8000)
        ratios.append(poincare_check(RadialField(grid, barenblatt_value(1.0, grid.centers / lam, P31)), mu)[2])
    assert max(ratios) / min(ratios) - 1 <= 0.01


def _constant_trajectory(A, n=12, m=1600):
    grid = RadialGrid(16.0, m)
    rec = record(_state(sample_profile(grid, A, P31)))
    return [TrajectoryRecord(**{**rec.as_dict(), "time": s}) for s in np.geomspace(1, 50, n)]


def test_convergence_report_at_a_star():
    traj = _constant_trajectory(A_STAR)
    rep = convergence_report(traj, P31)
    assert rep["amplitude_rel_error"] <= 5e-3
    # G is a difference of two terms of size (N+1)|w|_1; relative to that it vanishes
    assert max(abs(G) for G in rep["G"]) <= 1e-5 * 2 * traj[0].l1
    assert rep["a_star"] == A_STAR


def test_convergence_report_below_a_star():
    rep = convergence_report(_constant_trajectory(0.5 * A_STAR), P31)
    assert all(G > 0 for G in rep["G"])
    assert rep["G_sign_agreement"] == 1.0
    assert rep["G"][0] == pytest.approx(g_of_a(0.5 * A_STAR, P31), rel=0.02)
    assert rep["profile_error_trend"] in ("decreasing", "non-decreasing")


def test_convergence_report_errors():
    with pytest.raises(ValueError):
        convergence_report([], P31)
    phys = [TrajectoryRecord(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)]
    with pytest.raises(ValueError):
        convergence_report(phys, P31)


def test_mass_production_and_error_at():
    rec = TrajectoryRecord(2.0, 3.0, 1.0, 1.0, 1.5, 1.0, 3.0, 1.0, 0.1, 0.2)
    assert mass_production(rec, P31) == pytest.approx(4.5)
    other = TrajectoryRecord(5.0, 3.0, 1.0, 1.0, 1.5, 1.0, 3.0, 1.0, 0.05, 0.2)
    assert error_at([rec, other], 4.0) == 0.05


def test_predicted_support_exponents():
    t = np.array([10.0, 1e3])
    ratio = predicted_support(t[1], 1.0, P31) / predicted_support(t[0], 1.0, P31)
    expected = (1001 / 11) ** 0.25 * (math.log(1001) / math.log(11)) ** -0.5
    assert ratio == pytest.approx(expected, rel=1e-12)
