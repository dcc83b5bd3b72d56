"""Compiled inner loops for the explicit scheme.

These mirror the vectorised operators in :mod:`critabs.radial` term by term
(the test-suite checks one against the other) but fuse them into a single
pass so that long runs are affordable.
"""
from __future__ import annotations

import numpy as np
from numba import njit

PHYSICAL = 0
RESCALED_FULL = 1
RESCALED_AUTONOMOUS = 2

_EPS = 1e-30
SUPPORT_ABS = 1e-10
SUPPORT_REL = 1e-8


@njit(cache=True)
def max_face_gradient(w, dr):
    m = w.shape[0]
    gmax = w[m - 1] / dr
    for j in range(1, m):
        d = abs(w[j] - w[j - 1]) / dr
        if d > gmax:
            gmax = d
    return gmax


@njit(cache=True)
def stable_dt(gmax, dr, r_max, N, p, q, eta, lam, mode, s, safety):
    dt = dr * dr / (2.0 * N * (p - 1.0) * gmax ** (p - 2.0) + _EPS)
    if mode != PHYSICAL:
        fac = 1.0
        if mode == RESCALED_FULL:
            fac += (p - 2.0) * (N + 1.0) / s
        dt = min(dt, dr / (eta * r_max * fac + _EPS))
    if lam > 0.0 and mode != RESCALED_AUTONOMOUS:
        dt = min(dt, 1.0 / (q * gmax ** (q - 1.0) / dr + _EPS))
    return safety * dt


@njit(cache=True)
def step_into(w, out, dt, dr, faces, volumes, areas, centers, p, q, eta, N, lam, mode, s, cutoff):
    """One forward-Euler step from ``w`` into ``out``.

    ``cutoff`` > 0 is used as a fixed flush threshold; otherwise the
    threshold is max(SUPPORT_ABS, SUPPORT_REL * max(out)).
    Returns (index of the last non-zero cell or -1, max face gradient of ``out``).
    """
    m = w.shape[0]
    inv_dr = 1.0 / dr
    drift_full = 0.0
    reaction = 0.0
    if mode == RESCALED_FULL:
        drift_full = (p - 2.0) * eta * (N + 1.0) / s
        reaction = p * eta * (N + 1.0) / s
    absorb = lam
    if mode == RESCALED_FULL:
        absorb = lam / s
    elif mode == RESCALED_AUTONOMOUS:
        absorb = 0.0

    g_left = 0.0  # gradient at face i (origin face: symmetry)
    flux_left = 0.0
    top = 0.0
    for i in range(m):
        w_right = w[i + 1] if i + 1 < m else 0.0
        g_right = (w_right - w[i]) * inv_dr
        flux_right = abs(g_right) ** (p - 2.0) * g_right * areas[i + 1]
        rhs = (flux_right - flux_left) / volumes[i]
        if absorb > 0.0:
            gm = max(max(g_left, 0.0), max(-g_right, 0.0))
            rhs -= absorb * gm**q
        if mode != PHYSICAL:
            # eta*div(y w): inward transport, upwinded from the outer cell
            rhs += eta * (areas[i + 1] * faces[i + 1] * w_right - areas[i] * faces[i] * w[i]) / volumes[i]
        if mode == RESCALED_FULL:
            # outward transport y.grad w, upwinded from the inner cell
            rhs += reaction * w[i] - drift_full * centers[i] * g_left
        v = w[i] + dt * rhs
        if v < 0.0:
            v = 0.0
        out[i] = v
        if v > top:
            top = v
        g_left = g_right
        flux_left = flux_right

    thr = cutoff
    if thr <= 0.0:
        thr = max(SUPPORT_ABS, SUPPORT_REL * top)
    return flush_conservative(out, volumes, thr, dr)


@njit(cache=True)
def flush_conservative(out, volumes, thr, dr):
    """Zero every cell at or below ``thr``, moving its mass to the nearest
    inner cell above ``thr`` (or, for a sub-threshold core, to the innermost
    one).

    Returns (index of the last non-zero cell, max face gradient of the result).
    """
    m = out.shape[0]
    carry = 0.0
    last = -1
    first = -1
    for i in range(m - 1, -1, -1):
        if out[i] <= thr:
            carry += out[i] * volumes[i]
            out[i] = 0.0
        else:
            if carry > 0.0:
                out[i] += carry / volumes[i]
                carry = 0.0
            if last < 0:
                last = i
            first = i
    if carry > 0.0 and first >= 0:
        out[first] += carry / volumes[first]
    return last, max_face_gradient(out, dr)


@njit(cache=True)
def advance(w, t, t_target, safety, dr, r_max, faces, volumes, areas, centers,
            p, q, eta, N, lam, mode, cutoff, max_steps, guard):
    """Step ``w`` (modified in place) until ``t_target``.

    Returns (time, steps, status) with status 0 on success, 1 if the support
    came within ``guard`` cells of r_max, 2 if ``max_steps`` was exhausted.
    """
    m = w.shape[0]
    cur = w
    nxt = np.empty_like(w)
    steps = 0
    status = 0
    gmax = max_face_gradient(cur, dr)
    while t < t_target:
        if steps >= max_steps:
            status = 2
            break
        dt = stable_dt(gmax, dr, r_max, N, p, q, eta, lam, mode, t, safety)
        final = False
        if t + dt >= t_target:
            dt = t_target - t
            final = True
        last, gmax = step_into(cur, nxt, dt, dr, faces, volumes, areas, centers,
                               p, q, eta, N, lam, mode, t, cutoff)
        cur, nxt = nxt, cur
        t = t_target if final else t + dt
        steps += 1
        if last >= m - guard:
            status = 1
            break
    if steps % 2 == 1:
        w[:] = cur
    return t, steps, status
