"""Barenblatt profiles and the scalar constants attached to them.

Everything here is a pure function of a :class:`Params` triple.  The two
profile integrals are evaluated by a small adaptive Gauss-Legendre routine
after mapping them onto the unit interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

_CRITICAL_ATOL = 1e-12


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature cannot reach the requested tolerance."""


@dataclass(frozen=True)
class Params:
    """Exponents of du/dt - div(|grad u|^{p-2} grad u) + |grad u|^q = 0."""

    p: float
    N: int
    q: float

    def __post_init__(self) -> None:
        if not self.p > 2:
            raise ValueError(f"p must be > 2, got {self.p}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if not self.q > 1:
            raise ValueError(f"q must be > 1, got {self.q}")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "q", float(self.q))

    @classmethod
    def critical(cls, p: float, N: int) -> "Params":
        return cls(p, N, critical_exponent(p, N))

    @property
    def q_star(self) -> float:
        return critical_exponent(self.p, self.N)

    @property
    def is_critical(self) -> bool:
        return abs(self.q - self.q_star) <= _CRITICAL_ATOL

    @property
    def eta(self) -> float:
        return 1.0 / (self.p * (self.N + 1) - 2 * self.N)

    @property
    def b0(self) -> float:
        return (self.p - 2) / self.p * self.eta ** (1.0 / (self.p - 1))


def critical_exponent(p: float, N: int) -> float:
    return p - N / (N + 1)


def unit_ball_volume(N: int) -> float:
    return math.pi ** (N / 2) / math.gamma(N / 2 + 1)


@dataclass(frozen=True)
class ProfileConstants:
    """Derived scalars; fields tied to the critical exponent are None otherwise."""

    eta: float
    b0: float
    theta: float
    a_sub: float | None
    i1: float
    i2: float | None
    a_star: float | None

    def as_dict(self) -> dict[str, float | None]:
        return {
            "eta": self.eta,
            "b0": self.b0,
            "theta": self.theta,
            "a_sub": self.a_sub,
            "i1": self.i1,
            "i2": self.i2,
            "a_star": self.a_star,
        }


# ---------------------------------------------------------------------------
# quadrature

_GL_ORDER = 12
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


def _gauss(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> float:
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _GL_NODES
    return half * float(np.dot(_GL_WEIGHTS, f(x)))


def adaptive_gauss(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-12,
    max_intervals: int = 20000,
) -> tuple[float, float]:
    """Integrate a vectorised ``f`` over [a, b] by interval bisection.

    Each interval is accepted once the single-panel rule and the two-panel
    rule agree to within its share of ``tol`` (share proportional to its
    length).  Returns ``(value, error_estimate)``.
    """
    if b <= a:
        return 0.0, 0.0
    length = b - a
    stack = [(a, b, _gauss(f, a, b))]
    total = 0.0
    err = 0.0
    n = 0
    while stack:
        lo, hi, coarse = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _gauss(f, lo, mid)
        right = _gauss(f, mid, hi)
        fine = left + right
        local = abs(fine - coarse)
        n += 1
        if local <= tol * (hi - lo) / length or hi - lo < 1e-15 * length:
            total += fine
            err += local
            continue
        if n > max_intervals:
            raise QuadratureError(
                f"adaptive quadrature exceeded {max_intervals} subdivisions "
                f"(current error estimate {err + local:.3e})"
            )
        stack.append((lo, mid, left))
        stack.append((mid, hi, right))
    if err > tol:
        raise QuadratureError(f"quadrature error estimate {err:.3e} exceeds tol {tol:.3e}")
    return total, err


def _beta_integral(a: float, b: float, tol: float) -> float:
    """int_0^1 u^{a-1} (1-u)^{b-1} du with a > 0, b >= 1.

    The change of variables u = v^{1/a} removes the singularity at u = 0;
    the remaining non-smoothness at v = 1 is handled by bisection.
    """

    def integrand(v: np.ndarray) -> np.ndarray:
        return np.maximum(1.0 - v ** (1.0 / a), 0.0) ** (b - 1.0)

    value, _ = adaptive_gauss(integrand, 0.0, 1.0, tol=tol * a)
    return value / a


def quad_I1_I2(params: Params, tol: float = 1e-12) -> tuple[float, float]:
    """Return the two profile integrals (I1, I2) to absolute accuracy ``tol``.

    Both integrals are over the support of the unit-amplitude profile; the
    substitution u = B0 r^{p/(p-1)} turns them into incomplete-free beta
    integrals.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not params.is_critical:
        raise ValueError("I1/I2 are only defined for the critical exponent")
    p, N, q = params.p, params.N, params.q
    eta, b0 = params.eta, params.b0
    k = (p - 1) / p

    a1 = N * k
    pref1 = (N + 1) * k * b0 ** (-a1)
    i1 = pref1 * _beta_integral(a1, (p - 1) / (p - 2) + 1.0, tol / max(pref1, 1.0))

    a2 = (N * (p - 1) + q) / p
    pref2 = eta ** (q / (p - 1)) * k * b0 ** (-a2)
    i2 = pref2 * _beta_integral(a2, q / (p - 2) + 1.0, tol / max(pref2, 1.0))
    return i1, i2


# ---------------------------------------------------------------------------
# constants


def theta_exponent(params: Params) -> float:
    p, q = params.p, params.q
    return (q - 1) / (p - 2) + q / p - 1


def subsolution_threshold(params: Params) -> float:
    """Largest amplitude for which the profile is a subsolution of the full rescaled flow."""
    p, N, q = params.p, params.N, params.q
    eta, b0 = params.eta, params.b0
    bracket = (N + 1) * p * b0 ** (q / p) * eta ** (-(q - p + 1) / (p - 1))
    return bracket ** (1.0 / theta_exponent(params))


def a_star_exponent(params: Params) -> float:
    p, N = params.p, params.N
    return p * (p - 2) * (N + 1) * params.eta / (p - 1)


@lru_cache(maxsize=64)
def compute_constants(params: Params, tol: float = 1e-12) -> ProfileConstants:
    eta, b0 = params.eta, params.b0
    theta = theta_exponent(params)
    if not params.is_critical:
        i1, _ = quad_I1_I2(Params.critical(params.p, params.N), tol)
        return ProfileConstants(eta, b0, theta, None, i1, None, None)
    i1, i2 = quad_I1_I2(params, tol)
    a_star = (i1 / i2) ** a_star_exponent(params)
    return ProfileConstants(eta, b0, theta, subsolution_threshold(params), i1, i2, a_star)


# ---------------------------------------------------------------------------
# profiles


def support_radius_of(A: float, params: Params) -> float:
    return (A / params.b0) ** ((params.p - 1) / params.p)


def barenblatt_value(A: float, r, params: Params):
    p = params.p
    base = np.maximum(A - params.b0 * np.asarray(r, dtype=float) ** (p / (p - 1)), 0.0)
    out = base ** ((p - 1) / (p - 2))
    return float(out) if np.ndim(out) == 0 else out


def barenblatt_gradient_magnitude(A: float, r, params: Params):
    p = params.p
    r = np.asarray(r, dtype=float)
    base = np.maximum(A - params.b0 * r ** (p / (p - 1)), 0.0)
    out = params.eta ** (1.0 / (p - 1)) * base ** (1.0 / (p - 2)) * r ** (1.0 / (p - 1))
    return float(out) if np.ndim(out) == 0 else out


def mass_exponent(params: Params) -> float:
    p = params.p
    return (p - 1) / (p * (p - 2) * params.eta)


def gradient_norm_exponent(params: Params) -> float:
    p, N = params.p, params.N
    return (N + 2) * (p - 1) / ((N + 1) * params.eta * p * (p - 2))


def _mass_prefactor(params: Params) -> float:
    N = params.N
    return N / (N + 1) * unit_ball_volume(N) * compute_constants(params).i1


def barenblatt_mass(A: float, params: Params) -> float:
    if A <= 0:
        return 0.0
    return _mass_prefactor(params) * A ** mass_exponent(params)


def mass_to_amplitude(theta: float, params: Params) -> float:
    """Inverse of :func:`barenblatt_mass` (the power law is inverted exactly)."""
    if theta <= 0:
        return 0.0
    return (theta / _mass_prefactor(params)) ** (1.0 / mass_exponent(params))


def g_of_a(a: float, params: Params) -> float:
    """Mass production rate (N+1)|B_a|_1 - |grad B_a|_q^q of the profile B_a."""
    c = compute_constants(params)
    if c.i2 is None:
        raise ValueError("g is only defined for the critical exponent")
    scale = params.N * unit_ball_volume(params.N)
    a = np.asarray(a, dtype=float)
    out = scale * c.i1 * a ** mass_exponent(params) - scale * c.i2 * a ** gradient_norm_exponent(params)
    return float(out) if np.ndim(out) == 0 else out


def subsolution_residual(A: float, s: float, r, params: Params):
    """-s * (full rescaled operator applied to B_A) at radius r.

    The autonomous part annihilates B_A, so the value does not depend on s.
    Non-positive values mean B_A is a subsolution there.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    p, N, q, eta = params.p, params.N, params.q, params.eta
    r = np.asarray(r, dtype=float)
    base = np.maximum(A - params.b0 * r ** (p / (p - 1)), 0.0)
    out = (
        eta ** (q / (p - 1)) * base ** (q / (p - 2)) * r ** (q / (p - 1))
        - eta * (N + 1) * p * A * base ** (1.0 / (p - 2))
    )
    return float(out) if np.ndim(out) == 0 else out
