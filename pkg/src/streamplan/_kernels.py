"""Compiled inner loops shared by the flow-field and edge solvers.

Every field is flattened to ``(kind, params, bounds, gu, gv, gm)`` so a
single set of njit functions serves analytic and gridded fields alike.
Analytic kinds ignore the grid arrays; callers pass 1x1 dummies.
"""

import math

import numpy as np
from numba import njit

UNIFORM = 0
SADDLE = 1
GYRE = 2
GRID = 3

OK = 0
OUT_OF_DOMAIN = 1
MASKED = 2

REACHED = 0
HORIZON_EXCEEDED = 1
STALLED = 2
LEFT_DOMAIN = 3


@njit(cache=True, nogil=True)
def velocity(kind, params, bounds, gu, gv, gm, x, y):
    if not (bounds[0] <= x <= bounds[1] and bounds[2] <= y <= bounds[3]):
        return OUT_OF_DOMAIN, 0.0, 0.0
    if kind == UNIFORM:
        return OK, params[0], params[1]
    if kind == SADDLE:
        k = params[0]
        return OK, -k * x, k * y
    if kind == GYRE:
        vp = params[0]
        w = math.pi / params[1]
        sx = math.sin(w * x)
        cx = math.cos(w * x)
        sy = math.sin(w * y)
        cy = math.cos(w * y)
        return OK, vp * sx * cy, -vp * cx * sy
    # bilinear over the enclosing cell
    ox, oy, dx, dy = params[0], params[1], params[2], params[3]
    nx = gu.shape[1]
    ny = gu.shape[0]
    fx = (x - ox) / dx
    fy = (y - oy) / dy
    i = min(int(math.floor(fx)), nx - 2)
    j = min(int(math.floor(fy)), ny - 2)
    if i < 0:
        i = 0
    if j < 0:
        j = 0
    if gm[j, i] or gm[j, i + 1] or gm[j + 1, i] or gm[j + 1, i + 1]:
        return MASKED, 0.0, 0.0
    tx = fx - i
    ty = fy - j
    w00 = (1.0 - tx) * (1.0 - ty)
    w10 = tx * (1.0 - ty)
    w01 = (1.0 - tx) * ty
    w11 = tx * ty
    u = w00 * gu[j, i] + w10 * gu[j, i + 1] + w01 * gu[j + 1, i] + w11 * gu[j + 1, i + 1]
    v = w00 * gv[j, i] + w10 * gv[j, i + 1] + w01 * gv[j + 1, i] + w11 * gv[j + 1, i + 1]
    return OK, u, v


@njit(cache=True, nogil=True)
def velocity_gradient(kind, params, bounds, gu, gv, gm, x, y, h):
    """Central differences ``(du/dx, du/dy, dv/dx, dv/dy)``; code != OK if a stencil point fails."""
    c1, u_e, v_e = velocity(kind, params, bounds, gu, gv, gm, x + h, y)
    c2, u_w, v_w = velocity(kind, params, bounds, gu, gv, gm, x - h, y)
    c3, u_n, v_n = velocity(kind, params, bounds, gu, gv, gm, x, y + h)
    c4, u_s, v_s = velocity(kind, params, bounds, gu, gv, gm, x, y - h)
    code = max(max(c1, c2), max(c3, c4))
    if code != OK:
        return code, 0.0, 0.0, 0.0, 0.0
    inv = 1.0 / (2.0 * h)
    return OK, (u_e - u_w) * inv, (u_n - u_s) * inv, (v_e - v_w) * inv, (v_n - v_s) * inv


@njit(cache=True, nogil=True)
def hessian_det(kind, params, bounds, gu, gv, gm, x, y, h):
    code, dudx, dudy, dvdx, _ = velocity_gradient(kind, params, bounds, gu, gv, gm, x, y, h)
    if code != OK:
        return code, 0.0
    psi_xx = -dvdx
    psi_yy = dudy
    psi_xy = dudx
    return OK, psi_xx * psi_yy - psi_xy * psi_xy


@njit(cache=True, nogil=True)
def _segment_flux(kind, params, bounds, gu, gv, gm, x0, y0, x1, y1, max_step):
    # trapezoid of (u dy - v dx) along a straight segment
    length = math.hypot(x1 - x0, y1 - y0)
    if length == 0.0:
        return OK, 0.0
    n = max(1, int(math.ceil(length / max_step)))
    ddx = (x1 - x0) / n
    ddy = (y1 - y0) / n
    code, u, v = velocity(kind, params, bounds, gu, gv, gm, x0, y0)
    if code != OK:
        return code, 0.0
    prev = u * ddy - v * ddx
    total = 0.0
    for m in range(1, n + 1):
        if m == n:
            xm, ym = x1, y1
        else:
            xm = x0 + m * ddx
            ym = y0 + m * ddy
        code, u, v = velocity(kind, params, bounds, gu, gv, gm, xm, ym)
        if code != OK:
            return code, 0.0
        cur = u * ddy - v * ddx
        total += 0.5 * (prev + cur)
        prev = cur
    return OK, total


@njit(cache=True, nogil=True)
def path_flux(kind, params, bounds, gu, gv, gm, px, py, qx, qy, x_first, max_step):
    """Stream value by quadrature along a two-segment axis-aligned path."""
    if x_first:
        cx, cy = qx, py
    else:
        cx, cy = px, qy
    c1, a = _segment_flux(kind, params, bounds, gu, gv, gm, px, py, cx, cy, max_step)
    if c1 != OK:
        return c1, 0.0
    c2, b = _segment_flux(kind, params, bounds, gu, gv, gm, cx, cy, qx, qy, max_step)
    if c2 != OK:
        return c2, 0.0
    return OK, a + b


@njit(cache=True, nogil=True)
def euler_shoot(kind, params, bounds, gu, gv, gm, px, py, qx, qy, ugx, ugy,
                dt, horizon, eps, stall_speed, hess_h, traj):
    """Forward-Euler shoot from P under constant control.

    Writes positions into ``traj`` (shape ``(horizon + 1, 2)``) and returns
    ``(status, steps, closest_approach)``.
    """
    x = px
    y = py
    traj[0, 0] = x
    traj[0, 1] = y
    closest = math.hypot(x - qx, y - qy)
    code, fu, fv = velocity(kind, params, bounds, gu, gv, gm, x, y)
    if code != OK:
        return LEFT_DOMAIN, 0, closest
    for k in range(1, horizon + 1):
        x = x + (fu + ugx) * dt
        y = y + (fv + ugy) * dt
        traj[k, 0] = x
        traj[k, 1] = y
        dist = math.hypot(x - qx, y - qy)
        if dist < closest:
            closest = dist
        if dist <= eps:
            return REACHED, k, closest
        code, fu, fv = velocity(kind, params, bounds, gu, gv, gm, x, y)
        if code == OK:
            if math.hypot(fu + ugx, fv + ugy) < stall_speed:
                hc, det = hessian_det(kind, params, bounds, gu, gv, gm, x, y, hess_h)
                if hc == OK and det < 0.0:
                    return STALLED, k, closest
        else:
            return LEFT_DOMAIN, k, closest
        if k == horizon:
            return HORIZON_EXCEEDED, k, closest
    return HORIZON_EXCEEDED, horizon, closest


@njit(cache=True, nogil=True)
def rk4_drift(kind, params, bounds, gu, gv, gm, px, py, dt, steps, traj):
    """Idle advection with classical RK4; returns ``(code, steps_done)``."""
    x = px
    y = py
    traj[0, 0] = x
    traj[0, 1] = y
    for k in range(1, steps + 1):
        c1, k1u, k1v = velocity(kind, params, bounds, gu, gv, gm, x, y)
        c2, k2u, k2v = velocity(kind, params, bounds, gu, gv, gm, x + 0.5 * dt * k1u, y + 0.5 * dt * k1v)
        c3, k3u, k3v = velocity(kind, params, bounds, gu, gv, gm, x + 0.5 * dt * k2u, y + 0.5 * dt * k2v)
        c4, k4u, k4v = velocity(kind, params, bounds, gu, gv, gm, x + dt * k3u, y + dt * k3v)
        code = max(max(c1, c2), max(c3, c4))
        if code != OK:
            return code, k - 1
        x = x + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        y = y + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        traj[k, 0] = x
        traj[k, 1] = y
    return OK, steps


@njit(cache=True, nogil=True)
def euler_drift(kind, params, bounds, gu, gv, gm, px, py, dt, steps, traj):
    x = px
    y = py
    traj[0, 0] = x
    traj[0, 1] = y
    for k in range(1, steps + 1):
        code, fu, fv = velocity(kind, params, bounds, gu, gv, gm, x, y)
        if code != OK:
            return code, k - 1
        x = x + fu * dt
        y = y + fv * dt
        traj[k, 0] = x
        traj[k, 1] = y
    return OK, steps


DUMMY_GRID = np.zeros((1, 1))
DUMMY_MASK = np.zeros((1, 1), dtype=np.bool_)
