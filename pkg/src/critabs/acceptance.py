"""Acceptance suite: eight numbered criteria, each a list of sub-checks.

Levels: ``fast`` runs criteria 1-4, 7 and 8; ``full`` adds the long
physical decay run (5) and the convergence run to B_{A_*} (6).
Tolerances live in module constants so that the CLI, the test-suite and
the README quote the same numbers.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .config import InitialData, RunConfig
from .diagnostics import (
    compensate,
    convergence_report,
    decay_exponents,
    error_at,
    mass_production,
    poincare_check,
    predicted_support,
)
from .evolution import (
    EvolutionMode,
    Mode,
    RunState,
    Trajectory,
    advance_to,
    initial_values,
    run,
    run_ordered_pair,
)
from .profiles import (
    Params,
    barenblatt_value,
    compute_constants,
    subsolution_residual,
    support_radius_of,
    theta_exponent,
)
from .radial import RadialField, RadialGrid, sample_profile

P3N1 = Params.critical(3.0, 1)

TOL_I = 1e-5
TOL_A_STAR = 1e-3
TOL_THETA = 1e-12
TOL_RESIDUAL = 1e-12
STATIONARY_M800 = 5e-3
STATIONARY_M1600 = 2.5e-3
MASS_BALANCE_REL = 0.02
MASS_DRIFT = 1e-10
PLATEAU_RATIO = 1.5
ALTERNATIVE_MARGIN = 1.2
ERROR_DROP = 4.0
AMPLITUDE_REL = 0.15
SIGN_AGREEMENT = 0.9
HAT_RATIO = 0.5
HAT_TOL = 1e-6
DILATION_REL = 0.01
# empirical K: the largest poincare_check ratio (mu = q_*) over every field of
# the fast suite was 0.5575 when recorded; the ceiling adds 0.5% headroom
POINCARE_CEILING = 0.56

FAST = (1, 2, 3, 4, 7, 8)
FULL = FAST + (5, 6)
LEVELS = {"fast": FAST, "full": tuple(sorted(FULL))}


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    passed: bool
    value: float | str
    limit: str

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        val = f"{self.value:.6g}" if isinstance(self.value, float) else str(self.value)
        return f"[{flag}] C{self.criterion} {self.name}: {val} ({self.limit})"


def _check(criterion: int, name: str, value: float, ok: bool, limit: str) -> Check:
    return Check(criterion, name, bool(ok), float(value), limit)


def _beta(a: float, b: float) -> float:
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def beta_oracles_p3_n1() -> tuple[float, float]:
    """Closed forms of I1, I2 at p=3, N=1 via the Euler beta function."""
    i1 = 2 * (2 / 3) * 6 ** (2 / 3) * _beta(2 / 3, 3)
    i2 = 4 ** (-5 / 4) * (2 / 3) * 6**1.5 * _beta(1.5, 3.5)
    return i1, i2


# ---------------------------------------------------------------------------
# criteria


def criterion_1() -> list[Check]:
    c = compute_constants(P3N1)
    i1, i2 = beta_oracles_p3_n1()
    return [
        _check(1, "eta", c.eta, c.eta == 0.25, "== 0.25"),
        _check(1, "q_star", P3N1.q, P3N1.q == 2.5, "== 2.5"),
        _check(1, "B0", c.b0, abs(c.b0 - 1 / 6) <= 1e-15, "== 1/6"),
        _check(1, "I1 vs beta form", abs(c.i1 - i1), abs(c.i1 - i1) <= TOL_I, f"<= {TOL_I}"),
        _check(1, "I1 vs 2.971735", abs(c.i1 - 2.971735), abs(c.i1 - 2.971735) <= TOL_I, f"<= {TOL_I}"),
        _check(1, "I2 vs beta form", abs(c.i2 - i2), abs(c.i2 - i2) <= TOL_I, f"<= {TOL_I}"),
        _check(1, "I2 vs 0.212554", abs(c.i2 - 0.212554), abs(c.i2 - 0.212554) <= TOL_I, f"<= {TOL_I}"),
        _check(1, "A_star", c.a_star, abs(c.a_star - 7.2301) <= TOL_A_STAR, f"7.2301 +- {TOL_A_STAR}"),
        _check(1, "theta", theta_exponent(P3N1), abs(theta_exponent(P3N1) - 4 / 3) <= TOL_THETA,
               f"4/3 +- {TOL_THETA}"),
    ]


def criterion_2() -> list[Check]:
    a_sub = compute_constants(P3N1).a_sub
    checks = []
    for frac in (0.25, 0.5, 0.99):
        A = frac * a_sub
        r = np.linspace(0.0, 1.2 * support_radius_of(A, P3N1), 1000)
        worst = float(np.max(subsolution_residual(A, 1.0, r, P3N1)))
        checks.append(_check(2, f"max residual at {frac}*A_sub", worst, worst <= TOL_RESIDUAL,
                             f"<= {TOL_RESIDUAL}"))
    A = 10 * a_sub
    r = np.linspace(0.0, support_radius_of(A, P3N1), 1000)
    best = float(np.max(subsolution_residual(A, 1.0, r, P3N1)))
    checks.append(_check(2, "max residual at 10*A_sub", best, best > 0, "> 0"))
    return checks


@lru_cache(maxsize=None)
def stationarity_defect(m: int) -> float:
    grid = RadialGrid(4.0, m, 1)
    start = sample_profile(grid, 1.0, P3N1)
    state = RunState(start, 1.0, P3N1, EvolutionMode(Mode.RESCALED_AUTONOMOUS, 1.0))
    end = advance_to(state, 2.0)
    _FIELDS.append(end.field)
    return float(np.max(np.abs(end.field.values - start.values)))


def criterion_3() -> list[Check]:
    e800, e1600 = stationarity_defect(800), stationarity_defect(1600)
    return [
        _check(3, "defect m=800", e800, e800 <= STATIONARY_M800, f"<= {STATIONARY_M800}"),
        _check(3, "defect m=1600", e1600, e1600 <= STATIONARY_M1600, f"<= {STATIONARY_M1600}"),
    ]


PLATEAU = InitialData("plateau", amplitude=1.0, radius=1.0, outer=3.0)
GAUSSIAN = InitialData("gaussian", amplitude=20.0, width=3.0, radius=8.0)


def _keep(traj: Trajectory) -> Trajectory:
    _FIELDS.extend(RadialField(traj.grid, f) for f in traj.fields)
    return traj


@lru_cache(maxsize=None)
def mass_runs() -> tuple[Trajectory, Trajectory, Trajectory]:
    base = RunConfig(mode="physical", r_max=10.0, m=400, t_end=100.0, snapshots=161, initial=PLATEAU)
    absorbing = _keep(run(base, keep_fields=True))
    # pure diffusion spreads further; the larger box keeps the support interior
    diffusive = _keep(run(base.with_(absorption=0.0, r_max=20.0), keep_fields=True))
    resc = RunConfig(mode="rescaled_full", r_max=20.0, m=400, t_end=5.0, snapshots=81, initial=GAUSSIAN)
    rescaled = _keep(run(resc, keep_fields=True))
    return absorbing, diffusive, rescaled


def _trapezoid(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    return 0.5 * (y[1:] + y[:-1]) * np.diff(x)


def mass_balance_errors(traj: Trajectory) -> np.ndarray:
    """Per-interval relative defect of the mass identity of a trajectory."""
    t = traj.times
    l1 = traj.column("l1")
    dl1 = np.diff(l1)
    if traj.mode.kind is Mode.PHYSICAL:
        flux = traj.mode.absorption * traj.column("grad_lq_q")
        return np.abs(dl1 + _trapezoid(flux, t)) / np.abs(dl1)
    G = np.array([mass_production(r, traj.params) for r in traj.records])
    return np.abs(dl1 - _trapezoid(G / t, t)) / np.abs(dl1)


def criterion_4() -> list[Check]:
    absorbing, diffusive, rescaled = mass_runs()
    e_abs = float(mass_balance_errors(absorbing).max())
    l1 = diffusive.column("l1")
    drift = float(np.max(np.abs(l1 - l1[0])))
    e_res = float(mass_balance_errors(rescaled).max())
    return [
        _check(4, "physical lam=1 worst interval", e_abs, e_abs <= MASS_BALANCE_REL,
               f"<= {MASS_BALANCE_REL}"),
        _check(4, "physical lam=0 mass drift", drift, drift <= MASS_DRIFT, f"<= {MASS_DRIFT}"),
        _check(4, "rescaled_full worst interval", e_res, e_res <= MASS_BALANCE_REL,
               f"<= {MASS_BALANCE_REL}"),
    ]


def decay_config(m: int = 2000, t_end: float = 1e4, snapshots: int = 161) -> RunConfig:
    """Physical run from t=1 whose box follows the predicted support bound."""
    c2 = 1.3 * support_radius_of(compute_constants(P3N1).a_star, P3N1)
    r_max = float(predicted_support(t_end, c2, P3N1))
    return RunConfig(mode="physical", r_max=r_max, m=m, t_start=1.0, t_end=t_end,
                     snapshots=snapshots, initial=GAUSSIAN)


@lru_cache(maxsize=None)
def decay_run() -> Trajectory:
    return run(decay_config())


def decay_fits(traj: Trajectory) -> dict[str, dict[str, float]]:
    """Last-decade ratios of the predicted and two alternative compensations."""
    out = {}
    t = traj.times
    for kind, col in (("sup_norm", "linf"), ("support", "support_radius")):
        alpha, beta = decay_exponents(kind, traj.params)
        v = traj.column(col)
        out[kind] = {
            "predicted": compensate(t, v, alpha, beta, kind).ratio,
            "pure_power": compensate(t, v, alpha, 0.0, kind).ratio,
            "wrong_sign_log": compensate(t, v, alpha, -beta, kind).ratio,
        }
    return out


def criterion_5() -> list[Check]:
    fits = decay_fits(decay_run())
    checks = []
    for kind, r in fits.items():
        checks.append(_check(5, f"{kind} compensated ratio", r["predicted"],
                             r["predicted"] <= PLATEAU_RATIO, f"<= {PLATEAU_RATIO}"))
        for alt in ("pure_power", "wrong_sign_log"):
            rel = r[alt] / r["predicted"]
            checks.append(_check(5, f"{kind} {alt} / predicted", rel, rel >= ALTERNATIVE_MARGIN,
                                 f">= {ALTERNATIVE_MARGIN}"))
    return checks


def convergence_config(m: int = 400) -> RunConfig:
    return RunConfig(mode="rescaled_full", r_max=20.0, m=m, t_end=200.0, snapshots=41, initial=GAUSSIAN)


@lru_cache(maxsize=None)
def convergence_run(m: int = 400) -> Trajectory:
    return run(convergence_config(m))


def criterion_6() -> list[Check]:
    checks = []
    stats = {}
    for m in (400, 800):
        traj = convergence_run(m)
        rep = convergence_report(traj.records, traj.params)
        drop = error_at(traj.records, 10.0) / error_at(traj.records, 200.0)
        stats[m] = rep
        checks += [
            _check(6, f"m={m} error drop s=10 -> 200", drop, drop >= ERROR_DROP, f">= {ERROR_DROP}"),
            _check(6, f"m={m} |A-A*|/A*", rep["amplitude_rel_error"],
                   rep["amplitude_rel_error"] <= AMPLITUDE_REL, f"<= {AMPLITUDE_REL}"),
            _check(6, f"m={m} sign(G) agreement", rep["G_sign_agreement"],
                   rep["G_sign_agreement"] >= SIGN_AGREEMENT, f">= {SIGN_AGREEMENT}"),
        ]
    for key in ("profile_error_end", "amplitude_rel_error"):
        coarse, fine = stats[400][key], stats[800][key]
        checks.append(_check(6, f"{key} m=800 vs m=400", fine, fine <= coarse, f"<= {coarse:.6g}"))
    return checks


ORDER_PAIR = (
    InitialData("plateau", amplitude=0.5, radius=0.5, outer=1.5),
    InitialData("gaussian", amplitude=1.0, width=1.0, radius=3.0),
)


def order_margins() -> dict[str, float]:
    """min(upper - lower) over every snapshot of each mode (>= 0 means ordered)."""
    out = {}
    for mode, t0, t1 in (("physical", 0.0, 1.0), ("rescaled_full", 1.0, 2.0),
                         ("rescaled_autonomous", 1.0, 2.0)):
        cfg = RunConfig(mode=mode, r_max=6.0, m=200)
        grid = RadialGrid(cfg.r_max, cfg.m, 1)
        states = [RunState(initial_values(cfg.with_(initial=d), grid, P3N1), t0, P3N1,
                           EvolutionMode(Mode(mode), 1.0)) for d in ORDER_PAIR]
        times = np.linspace(t0, t1, 11)[1:]
        margin = float(np.min(states[1].field.values - states[0].field.values))
        for lo, hi in run_ordered_pair(states[0], states[1], times):
            _FIELDS.extend((lo, hi))
            margin = min(margin, float(np.min(hi.values - lo.values)))
        out[mode] = margin
    return out


def criterion_7() -> list[Check]:
    return [_check(7, f"{mode} min(upper - lower)", v, v >= 0, ">= 0") for mode, v in order_margins().items()]


def hat_ratio() -> float:
    grid = RadialGrid(2.0, 200, 1)
    hat = RadialField(grid, np.maximum(1.0 - grid.centers, 0.0))
    return poincare_check(hat, 1.0)[2]


def dilation_ratios(mu: float | None = None) -> list[float]:
    mu = P3N1.q if mu is None else mu
    out = []
    for lam in (1.0, 2.0, 4.0):
        grid = RadialGrid(16.0, 8000, 1)
        field = RadialField(grid, barenblatt_value(1.0, grid.centers / lam, P3N1))
        out.append(poincare_check(field, mu)[2])
    return out


def criterion_8() -> list[Check]:
    h = hat_ratio()
    ratios = dilation_ratios()
    spread = max(ratios) / min(ratios) - 1
    checks = [
        _check(8, "hat ratio", h, abs(h - HAT_RATIO) <= HAT_TOL, f"{HAT_RATIO} +- {HAT_TOL}"),
        _check(8, "B_1 dilation spread", spread, spread <= DILATION_REL, f"<= {DILATION_REL}"),
    ]
    if _FIELDS:
        ratios = [poincare_check(f, P3N1.q)[2] for f in _FIELDS if f.values.max() > 0]
        worst = max(ratios)
        checks.append(_check(8, f"max ratio over {len(ratios)} suite fields", worst,
                             worst <= POINCARE_CEILING, f"<= {POINCARE_CEILING}"))
        field = _FIELDS[int(np.argmax(ratios))]
        stretched = RadialField(RadialGrid(2 * field.grid.r_max, field.grid.m, field.grid.N), field.values)
        rel = abs(poincare_check(stretched, P3N1.q)[2] / worst - 1)
        checks.append(_check(8, "ceiling field dilated by 2", rel, rel <= DILATION_REL, f"<= {DILATION_REL}"))
    return checks


# fields produced by the suite's runs, for the Poincare ceiling
_FIELDS: list[RadialField] = []

CRITERIA: dict[int, Callable[[], list[Check]]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
}


def run_acceptance(level: str = "fast", progress: Callable[[str], None] | None = None) -> dict:
    """Run every criterion of ``level`` and return a JSON-ready verdict."""
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}; choose from {sorted(LEVELS)}")
    results = []
    for number in LEVELS[level]:
        start = time.perf_counter()
        checks = CRITERIA[number]()
        elapsed = time.perf_counter() - start
        for c in checks:
            if progress:
                progress(c.line())
        results.append({
            "criterion": number,
            "passed": all(c.passed for c in checks),
            "seconds": round(elapsed, 3),
            "checks": [asdict(c) for c in checks],
        })
    return {"level": level, "passed": all(r["passed"] for r in results), "criteria": results}
