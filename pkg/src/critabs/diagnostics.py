"""Snapshot diagnostics, compensated decay series and convergence summaries."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Sequence

import numpy as np

from .profiles import Params, barenblatt_value, compute_constants, g_of_a, mass_to_amplitude
from .radial import RadialField, face_gradients, norms, support_radius

CSV_COLUMNS = (
    "time", "l1", "linf", "grad_linf", "grad_lq_q", "support_radius",
    "theta", "amplitude", "profile_error_sup", "profile_error_star",
)


@dataclass(frozen=True)
class TrajectoryRecord:
    time: float
    l1: float
    linf: float
    grad_linf: float
    grad_lq_q: float
    support_radius: float
    theta: float
    amplitude: float | None = None
    profile_error_sup: float | None = None
    profile_error_star: float | None = None

    def as_row(self) -> list[str]:
        return ["" if getattr(self, c) is None else repr(float(getattr(self, c))) for c in CSV_COLUMNS]

    def as_dict(self) -> dict:
        return asdict(self)


assert tuple(f.name for f in fields(TrajectoryRecord)) == CSV_COLUMNS


def record(state) -> TrajectoryRecord:
    """Diagnostics of a run state (anything with field/time/params/mode).

    In physical mode ``theta`` is the mass the solution has in self-similar
    variables, log(e+t)^{N+1} |u|_1; in rescaled modes it is |w|_1 itself.
    """
    field, params, t = state.field, state.params, float(state.time)
    nrm = norms(field, params.q)
    rho = support_radius(field)
    rescaled = state.mode.kind.rescaled
    if not rescaled:
        theta = math.log(math.e + t) ** (params.N + 1) * nrm.l1
        return TrajectoryRecord(t, nrm.l1, nrm.linf, nrm.grad_linf, nrm.grad_lq_q, rho, theta)
    if nrm.l1 <= 0:
        return TrajectoryRecord(t, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    amp = mass_to_amplitude(nrm.l1, params)
    r = field.grid.centers
    err = float(np.max(np.abs(field.values - barenblatt_value(amp, r, params))))
    a_star = compute_constants(params).a_star
    err_star = None
    if a_star is not None:
        err_star = float(np.max(np.abs(field.values - barenblatt_value(a_star, r, params))))
    return TrajectoryRecord(t, nrm.l1, nrm.linf, nrm.grad_linf, nrm.grad_lq_q, rho,
                            nrm.l1, amp, err, err_star)


def mass_production(rec: TrajectoryRecord, params: Params) -> float:
    """G(w) = (N+1)|w|_1 - |grad w|_q^q evaluated from a rescaled record."""
    return (params.N + 1) * rec.l1 - rec.grad_lq_q


# ---------------------------------------------------------------------------
# compensated series


@dataclass(frozen=True)
class RateFit:
    series: str
    alpha_power: float
    beta_log: float
    times: np.ndarray
    compensated: np.ndarray
    plateau_min: float
    plateau_max: float
    ratio: float
    fitted_power: float

    def summary(self) -> dict:
        return {
            "series": self.series,
            "alpha_power": self.alpha_power,
            "beta_log": self.beta_log,
            "plateau_min": self.plateau_min,
            "plateau_max": self.plateau_max,
            "ratio": self.ratio,
            "fitted_power": self.fitted_power,
        }


def decay_exponents(kind: str, params: Params) -> tuple[float, float]:
    """(power, log power) of the predicted law value ~ t^power (log t)^logpower."""
    p, N, eta = params.p, params.N, params.eta
    if kind == "sup_norm":
        return -N * eta, -p * eta * (N + 1)
    if kind == "support":
        return eta, -(p - 2) * (N + 1) * eta
    if kind == "mass":
        return 0.0, -(N + 1.0)
    raise ValueError(f"unknown series kind {kind!r}")


_SERIES_FIELD = {"sup_norm": "linf", "support": "support_radius", "mass": "l1"}


def compensate(times, values, alpha_power: float, beta_log: float, series: str = "custom") -> RateFit:
    """Divide ``values`` by t^alpha (log t)^beta and summarise the last decade.

    Only samples with t > 1 are used (log t must be positive).
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    keep = t > 1
    t, v = t[keep], v[keep]
    if t.size == 0:
        raise ValueError("compensated series needs samples with t > 1")
    c = v * t ** (-alpha_power) * np.log(t) ** (-beta_log)
    tail = c[t >= t[-1] / 10]
    lo, hi = float(tail.min()), float(tail.max())
    ratio = hi / lo if lo > 0 else math.inf
    fitted = math.nan
    good = v > 0
    if good.sum() >= 2:
        # free power with the log correction held fixed (cross-check only)
        y = np.log(v[good]) - beta_log * np.log(np.log(t[good]))
        fitted = float(np.polyfit(np.log(t[good]), y, 1)[0])
    return RateFit(series, alpha_power, beta_log, t, c, lo, hi, ratio, fitted)


def compensated_decay(trajectory: Sequence[TrajectoryRecord], kind: str, params: Params) -> RateFit:
    alpha, beta = decay_exponents(kind, params)
    times = [r.time for r in trajectory]
    values = [getattr(r, _SERIES_FIELD[kind]) for r in trajectory]
    return compensate(times, values, alpha, beta, kind)


# ---------------------------------------------------------------------------
# Poincare-type inequality


def poincare_check(field: RadialField, mu: float) -> tuple[float, float, float]:
    """Empirical constant in |w|_1^mu <= K R^{mu(N+1)-N} |grad w|_mu^mu.

    The cell gradient is the larger one-sided difference, taken on cells
    inside the support only; it is exact for piecewise-linear profiles whose
    kinks sit on cell faces.
    """
    if mu < 1:
        raise ValueError("mu must be >= 1")
    R = support_radius(field)
    if R <= 0:
        raise ValueError("poincare_check needs a field with non-empty support")
    grid = field.grid
    lhs = float(np.dot(grid.volumes, field.values)) ** mu
    g = face_gradients(field)
    cell = np.maximum(np.abs(g[:-1]), np.abs(g[1:]))
    cell[field.values <= 0] = 0.0
    grad = float(np.dot(grid.volumes, cell**mu))
    rhs = R ** (mu * (grid.N + 1) - grid.N) * grad
    return lhs, rhs, lhs / rhs


# ---------------------------------------------------------------------------
# convergence summary


def convergence_report(trajectory: Sequence[TrajectoryRecord], params: Params) -> dict:
    """Summarise relaxation of a rescaled run towards B_{A_*}."""
    if not trajectory:
        raise ValueError("empty trajectory")
    consts = compute_constants(params)
    if consts.a_star is None:
        raise ValueError("convergence report needs the critical exponent")
    a_star = consts.a_star
    recs = [r for r in trajectory if r.amplitude is not None]
    if not recs:
        raise ValueError("trajectory has no rescaled snapshots")
    s = np.array([r.time for r in recs])
    err = np.array([r.profile_error_sup for r in recs])
    linf = np.array([r.linf for r in recs])
    amp = np.array([r.amplitude for r in recs])
    G = np.array([mass_production(r, params) for r in recs])
    g_model = np.array([g_of_a(a, params) for a in amp])

    first_below = {}
    for level in (0.2, 0.1, 0.05):
        hit = np.flatnonzero(err < level * linf)
        first_below[str(level)] = float(s[hit[0]]) if hit.size else None

    # trend over the second half of the run in log s
    half = s >= math.sqrt(s[0] * s[-1])
    trend = "insufficient"
    if half.sum() >= 3 and np.all(err[half] > 0):
        slope = float(np.polyfit(np.log(s[half]), np.log(err[half]), 1)[0])
        trend = "decreasing" if slope < 0 else "non-decreasing"

    sign_match = np.sign(G) == np.sign(a_star - amp)
    return {
        "a_star": a_star,
        "s_end": float(s[-1]),
        "amplitude_end": float(amp[-1]),
        "amplitude_rel_error": float(abs(amp[-1] - a_star) / a_star),
        "profile_error_end": float(err[-1]),
        "profile_error_trend": trend,
        "first_s_below": first_below,
        "G": G.tolist(),
        "g_of_amplitude": g_model.tolist(),
        "G_sign_agreement": float(np.mean(sign_match)),
        "support_min": float(min(r.support_radius for r in recs)),
        "support_max": float(max(r.support_radius for r in recs)),
    }


def error_at(trajectory: Sequence[TrajectoryRecord], s: float) -> float:
    """profile_error_sup at the snapshot closest to ``s``."""
    recs = [r for r in trajectory if r.profile_error_sup is not None]
    best = min(recs, key=lambda r: abs(r.time - s))
    return best.profile_error_sup


def predicted_support(t, c2: float, params: Params):
    """Support bound c2 (1+t)^eta log(1+t)^{-eta(p-2)(N+1)} in physical variables."""
    p, N, eta = params.p, params.N, params.eta
    t = np.asarray(t, dtype=float)
    return c2 * (1 + t) ** eta * np.log1p(t) ** (-eta * (p - 2) * (N + 1))
