"""Caustic curves and Stokes lines in the (x0, x1) configuration plane.

The caustic at fixed T is the image of the critical curve of the
initial-value map: integrate

    m x'' = -V'(x),  x(0) = x0,  x'(0) = v0,

together with the variational factor J = dx(T)/dv0,

    m J'' = -V''(x) J,  J(0) = 0,  J'(0) = 1,

and collect the (x0, x1 = x(T)) images of the v0 roots of J(T) = 0.  For the
Heaviside step the map J never vanishes (reflections are instantaneous) and
the caustic is the analytic triangle of merging closed-form paths.

Stokes lines are the loci where the real parts of two saddle actions agree;
for the step they separate the regions where the reflected (caustic) saddle
does or does not contribute.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .classical import (BoundarySpec, SaddleKind, _bounce_minimum,
                        caustic_saddle_curve, caustic_triangle_vertices,
                        heaviside_three_path_region, solve_real_paths)
from .errors import InsideCausticError, UnsupportedFamilyError
from .potential import Family, StepModel, potential_derivatives

__all__ = ["integrate_ivp", "caustic_curve", "cusp_points", "stokes_lines",
           "relevance_flag", "inside_caustic"]


def _rhs(model):
    m = model.m

    def rhs(t, y):
        x, v, J, Jp = y
        _, vp, vpp = potential_derivatives(model, x)
        return (v, -vp / m, Jp, -vpp * J / m)

    return rhs


def integrate_ivp(model: StepModel, x0: float, v0: float, T: float,
                  rtol: float = 1e-10, atol: float = 1e-10):
    """Final position x(T) and variational factor J(T) = dx(T)/dv0."""
    if model.family is not Family.WOODS_SAXON:
        raise UnsupportedFamilyError("the IVP integrator needs a smooth potential")
    sol = solve_ivp(_rhs(model), (0.0, T), (x0, v0, 0.0, 1.0),
                    method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"IVP integration failed: {sol.message}")
    x, _, J, _ = sol.y[:, -1]
    return float(x), float(J)


def _scan_batch(model, x0, v0s, T, rtol=1e-8, atol=1e-8):
    """x(T), J(T) for many v0 at once (single stacked integration)."""
    m = model.m
    n = v0s.size

    def rhs(t, y):
        x = y[0:n]
        v = y[n:2 * n]
        J = y[2 * n:3 * n]
        Jp = y[3 * n:4 * n]
        _, vp, vpp = potential_derivatives(model, x)
        return np.concatenate([v, -vp / m, Jp, -vpp * J / m])

    y0 = np.concatenate([np.full(n, x0), v0s, np.zeros(n), np.ones(n)])
    sol = solve_ivp(rhs, (0.0, T), y0, method="DOP853", rtol=rtol, atol=atol)
    y = sol.y[:, -1]
    return y[0:n], y[2 * n:3 * n]


def caustic_curve(model: StepModel, T: float, x0_grid, n_scan: int = 400,
                  v0_max_factor: float = 5.0):
    """Caustic points (x0, x1) for each x0 in the grid.

    Empty output for an x0 with no critical initial velocity."""
    if model.family is Family.HEAVISIDE:
        verts = caustic_triangle_vertices(model, T)
        pts = []
        for (a, b), (c, d) in zip(verts, verts[1:] + verts[:1]):
            for s in np.linspace(0.0, 1.0, 81)[:-1]:
                pts.append((a + s * (c - a), b + s * (d - b)))
        return pts
    v_cap = v0_max_factor * math.sqrt(2.0 * model.V0 / model.m) \
        if model.V0 > 0 else v0_max_factor
    points = []
    for x0 in np.atleast_1d(np.asarray(x0_grid, dtype=float)):
        v0s = np.linspace(1e-4, v_cap, n_scan)
        _, Js = _scan_batch(model, float(x0), v0s, T)
        flips = np.where(np.diff(np.sign(Js)) != 0)[0]
        f = lambda v: integrate_ivp(model, float(x0), float(v), T)[1]
        for i in flips:
            # confirm the bracket with the tight-tolerance integrator; the
            # batched scan can misplace a marginal crossing by one cell
            lo = v0s[max(i - 1, 0)]
            hi = v0s[min(i + 2, n_scan - 1)]
            f_lo, f_hi = f(lo), f(hi)
            if np.sign(f_lo) == np.sign(f_hi):
                continue
            v_root = brentq(f, lo, hi, xtol=1e-10)
            x1, _ = integrate_ivp(model, float(x0), v_root, T)
            points.append((float(x0), float(x1)))
    return points


def cusp_points(curve_points, angle_threshold: float = 0.6):
    """Corner points of an ordered caustic polyline (turning angle test)."""
    pts = np.asarray(curve_points, dtype=float)
    if len(pts) < 5:
        return []
    center = pts.mean(axis=0)
    order = np.argsort(np.arctan2(*(pts - center).T[::-1]))
    loop = pts[order]
    out = []
    n = len(loop)
    for i in range(n):
        a, b, c = loop[i - 1], loop[i], loop[(i + 1) % n]
        u, v = b - a, c - b
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if nu < 1e-12 or nv < 1e-12:
            continue
        cosang = np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0)
        if math.acos(cosang) > angle_threshold:
            out.append(tuple(b))
    return out


def inside_caustic(model: StepModel, bvp: BoundarySpec) -> bool:
    """True when three real classical paths exist at bvp."""
    if model.family is Family.HEAVISIDE:
        return heaviside_three_path_region(model, bvp)
    if not (bvp.x0 < 0 and bvp.x1 < 0) or model.V0 == 0.0:
        return False
    _, t_min = _bounce_minimum(model, bvp.x0, bvp.x1)
    if t_min >= bvp.T:
        return False
    # three paths need the direct one as well
    return len(solve_real_paths(model, bvp)) >= 3


def stokes_lines(model: StepModel, T: float, x0_values, x1_limit: float = None):
    """Points (x0, x1) where Re(S_caustic) = Re(S_direct).

    For the Heaviside step this set is exactly the pair of axes bounding the
    reflecting quadrants; they are returned as sampled segments.  For the
    smooth step each requested x0 row is walked outward from the fold with
    the continued caustic saddle until the real parts cross; rows that stay
    inside a relevant wedge contribute no points.
    """
    if model.family is Family.HEAVISIDE:
        L = math.sqrt(2.0 * model.V0 / model.m) * T
        seg = np.linspace(-1.5 * L, 1.5 * L, 121)
        return [(0.0, float(s)) for s in seg] + [(float(s), 0.0) for s in seg]
    points = []
    for x0 in np.atleast_1d(np.asarray(x0_values, dtype=float)):
        if x1_limit is None:
            limit = -3.0 * abs(x0) - 3.0
        else:
            limit = x1_limit
        xs = np.linspace(limit, limit * 0.2, 60)
        try:
            saddles = caustic_saddle_curve(model, float(x0), T, xs)
        except Exception:
            continue
        prev = None
        for key in sorted(saddles, reverse=True):
            sad = saddles[key]
            bvp = BoundarySpec(float(x0), float(key), T)
            direct = [s for s in solve_real_paths(model, bvp)
                      if s.kind is SaddleKind.DIRECT]
            if not direct:
                continue
            diff = sad.S.real - direct[0].S.real
            if prev is not None and np.sign(diff) != np.sign(prev[1]):
                x_lo, d_lo = prev
                x_cross = x_lo + (key - x_lo) * d_lo / (d_lo - diff)
                points.append((float(x0), float(x_cross)))
            prev = (key, diff)
    return points


def relevance_flag(model: StepModel, bvp: BoundarySpec) -> bool:
    """True when the reflected (caustic) saddle contributes at bvp.

    Classification by the Stokes criterion Re(S_reflected) >= Re(S_direct);
    ties on the line count as relevant.  Undefined inside the caustic loop.
    """
    if inside_caustic(model, bvp):
        raise InsideCausticError("relevance undefined where three real paths exist")
    if model.family is Family.HEAVISIDE:
        m, V0, T = model.m, model.V0, bvp.T
        s_refl = m * (bvp.x0 + bvp.x1) ** 2 / (2 * T)
        s_dir = m * (bvp.x1 - bvp.x0) ** 2 / (2 * T)
        return s_refl >= s_dir
    if bvp.x0 < 0 and bvp.x1 < 0:
        try:
            from .classical import find_caustic_saddle
            sad = find_caustic_saddle(model, bvp)
        except Exception:
            return False
        direct = [s for s in solve_real_paths(model, bvp)
                  if s.kind is SaddleKind.DIRECT]
        if not direct:
            return True
        return sad.S.real >= direct[0].S.real
    # away from the reflecting quadrant the Heaviside classification applies
    return (bvp.x0 > 0 and bvp.x1 > 0) or (bvp.x0 * bvp.x1 == 0.0)
