"""Real and complex solutions of the classical boundary-value problem.

For the smooth step the motion is solved implicitly.  With

    w0 = (E - V(x)) / (E - V0),   w1 = (E - V(x)) / E,

the time and reduced action along the physical orientation are

    t(x) = sqrt(m/2)/alpha [ A0 / sqrt(E - V0) - A1 / sqrt(E) ],
    s(x) = sqrt(2 m)/alpha [ sqrt(E - V0) A0 - sqrt(E) A1 ],

where A0 = arctanh(-sqrt(w0)) and A1 = arctanh(+sqrt(w1)); both vanish at the
turning point x_t = arctanh(2E/V0 - 1)/alpha (integration constants set to
zero), and dt/dx = 1/v, ds/dx = m v along the classically allowed branch.
Direct paths use differences of t and s; bounces use T = -(t(x0)+t(x1)) and
S = -ET - (s(x0)+s(x1)).

Complex saddles are analytic continuations of the bounce relation.  Each
arctanh term carries an explicit sheet label (sqrt sign, i*pi winding) that
is transported by continuity along the continuation path; this implements
the equivalence-class continuation of the action through singularity
crossings at the level of t(x) and s(x).

Van Vleck factors come from implicit differentiation of the time relation:

    d2S/dx0 dx1 = 1 / (v0 v1 dT/dE),

with signed endpoint velocities (verified against finite differences of S).
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (BranchDegenerateError, CausticDivergenceError,
                     NewtonError, NoTopologicalSaddleError, RootBracketError,
                     UnsupportedFamilyError, ValidationError)
from .potential import Family, StepModel, potential_value

__all__ = ["BoundarySpec", "SaddleKind", "ClassicalSaddle", "turning_point",
           "time_of_flight", "reduced_action", "heaviside_paths",
           "solve_real_paths", "van_vleck", "caustic_saddle",
           "find_caustic_saddle", "caustic_saddle_curve", "topological_saddle",
           "bounce_fold", "caustic_triangle_vertices",
           "heaviside_three_path_region"]


@dataclass(frozen=True)
class BoundarySpec:
    x0: float
    x1: float
    T: float

    def __post_init__(self):
        if not (self.T > 0):
            raise ValidationError("propagation time T must be positive")


class SaddleKind(enum.Enum):
    DIRECT = "direct"
    LOW_BOUNCE = "low_bounce"
    HIGH_BOUNCE = "high_bounce"
    CAUSTIC = "caustic"
    TOPOLOGICAL = "topological"


@dataclass(frozen=True)
class ClassicalSaddle:
    kind: SaddleKind
    E: complex
    S: complex
    vv: complex
    relevant: bool = True
    #: branch-resolved sqrt of vv entering the WKB sum (includes the Maslov
    #: phase for real kinds); None for degenerate saddles
    sqrt_vv: complex | None = None
    maslov: int | None = None

    def with_sqrt_vv(self, value: complex) -> "ClassicalSaddle":
        return replace(self, sqrt_vv=value)


# ---------------------------------------------------------------------------
# branch-tracked arctanh terms
# ---------------------------------------------------------------------------

def _log_sigmoid(y: float) -> float:
    """log(1/(1+e^{-y})) without under/overflow."""
    if y >= 0:
        return -math.log1p(math.exp(-y))
    return y - math.log1p(math.exp(y))


def _canon(z: complex) -> complex:
    """Collapse signed-zero imaginary parts so sqrt/log branches are stable."""
    z = complex(z)
    if z.imag == 0.0:
        return complex(z.real, 0.0)
    return z


def _pv(s: int, y: complex, log_u: complex) -> complex:
    """arctanh(s*y) up to the sheet lattice, with log(1-y^2) supplied."""
    sy = s * y
    if abs(1.0 + sy) >= 0.5:
        l1 = cmath.log(1.0 + sy)
    else:
        l1 = log_u - cmath.log(1.0 - sy)
    return l1 - 0.5 * log_u


class _ArcTerm:
    """One arctanh(sqrt(w)) term continued on its (sign, winding) lattice."""

    __slots__ = ("s", "n", "val")

    def __init__(self, w, log_u, init_sign):
        self.s = init_sign
        self.n = 0
        self.val = _pv(self.s, cmath.sqrt(_canon(w)), log_u)

    def step(self, w, log_u):
        y = cmath.sqrt(_canon(w))
        best = None
        for s in (1, -1):
            pv = _pv(s, y, log_u)
            for dn in (-1, 0, 1):
                cand = pv + 1j * math.pi * (self.n + dn)
                d = abs(cand - self.val)
                if best is None or d < best[0]:
                    best = (d, s, self.n + dn, cand)
        _, self.s, self.n, self.val = best
        return self.val

    def clone(self):
        c = _ArcTerm.__new__(_ArcTerm)
        c.s, c.n, c.val = self.s, self.n, self.val
        return c


class EndpointState:
    """Branch state of the two arctanh terms attached to one endpoint."""

    __slots__ = ("model", "x", "a0", "a1")

    def __init__(self, model: StepModel, x: float, E: complex):
        self.model = model
        self.x = float(x)
        w0, lu0, w1, lu1 = self._args(E)
        self.a0 = _ArcTerm(w0, lu0, -1)
        self.a1 = _ArcTerm(w1, lu1, +1)

    def _args(self, E: complex):
        md = self.model
        if E == 0 or E == md.V0:
            raise BranchDegenerateError("implicit solution degenerate at E in {0, V0}")
        v = float(potential_value(md, self.x))
        y2 = 2.0 * md.alpha * self.x
        emv = _canon(E - v)
        w0 = _canon(emv / _canon(E - md.V0))
        lu0 = (math.log(md.V0) + _log_sigmoid(-y2)
               + cmath.log(_canon(-1.0 / _canon(E - md.V0))))
        w1 = _canon(emv / _canon(E))
        lu1 = math.log(md.V0) + _log_sigmoid(y2) - cmath.log(_canon(E))
        return w0, lu0, w1, lu1

    def terms(self, E: complex):
        w0, lu0, w1, lu1 = self._args(E)
        return self.a0.step(w0, lu0), self.a1.step(w1, lu1)

    def clone(self):
        c = EndpointState.__new__(EndpointState)
        c.model, c.x = self.model, self.x
        c.a0, c.a1 = self.a0.clone(), self.a1.clone()
        return c


def _t_s(model: StepModel, E: complex, state: EndpointState):
    a0, a1 = state.terms(E)
    r0 = cmath.sqrt(_canon(E - model.V0))
    r1 = cmath.sqrt(_canon(E))
    c_t = math.sqrt(model.m / 2.0) / model.alpha
    c_s = math.sqrt(2.0 * model.m) / model.alpha
    return c_t * (a0 / r0 - a1 / r1), c_s * (r0 * a0 - r1 * a1)


# ---------------------------------------------------------------------------
# public closed-form operations
# ---------------------------------------------------------------------------

def turning_point(model: StepModel, E) -> complex:
    """x_t = arctanh(2E/V0 - 1)/alpha, the square-root branch point of t(x)."""
    if model.family is not Family.WOODS_SAXON:
        raise UnsupportedFamilyError("turning point defined for the smooth step")
    E = complex(E)
    if E == 0 or E == model.V0:
        raise BranchDegenerateError("turning point degenerate at E in {0, V0}")
    return complex(np.arctanh((2.0 * E - model.V0) / model.V0)) / model.alpha


def time_of_flight(model: StepModel, E, x) -> complex:
    """Implicit t(x) at energy E, principal sheet, t(x_t) = 0."""
    if model.family is not Family.WOODS_SAXON:
        raise UnsupportedFamilyError("implicit t(x) defined for the smooth step")
    st = EndpointState(model, float(np.real(x)), complex(E))
    t, _ = _t_s(model, complex(E), st)
    return t


def reduced_action(model: StepModel, E, x) -> complex:
    """Implicit s(x) at energy E, principal sheet, s(x_t) = 0."""
    if model.family is not Family.WOODS_SAXON:
        raise UnsupportedFamilyError("implicit s(x) defined for the smooth step")
    st = EndpointState(model, float(np.real(x)), complex(E))
    _, s = _t_s(model, complex(E), st)
    return s


# ---------------------------------------------------------------------------
# real-path relations (fresh principal states)
# ---------------------------------------------------------------------------

def _t_direct(model, E, x0, x1):
    t0, _ = _t_s(model, E, EndpointState(model, x0, E))
    t1, _ = _t_s(model, E, EndpointState(model, x1, E))
    return abs((t1 - t0).real)


def _t_bounce(model, E, x0, x1):
    t0, _ = _t_s(model, E, EndpointState(model, x0, E))
    t1, _ = _t_s(model, E, EndpointState(model, x1, E))
    return -(t0 + t1)


def _s_direct(model, E, x0, x1, T):
    _, s0 = _t_s(model, E, EndpointState(model, x0, E))
    _, s1 = _t_s(model, E, EndpointState(model, x1, E))
    return -E * T + abs((s1 - s0).real)


def _s_bounce(model, E, x0, x1, T):
    _, s0 = _t_s(model, E, EndpointState(model, x0, E))
    _, s1 = _t_s(model, E, EndpointState(model, x1, E))
    return -E * T - (s0 + s1)


def _speed(model, E, x):
    return cmath.sqrt(2.0 * (E - complex(potential_value(model, x))) / model.m)


def _vv_from_relation(time_fn, model, E, x0, x1, v0, v1, h=1e-7):
    """vv = 1/(v0 v1 dT/dE) with a real central-difference derivative."""
    scale = max(abs(E), 1e-3)
    dT = (time_fn(model, E + h * scale, x0, x1)
          - time_fn(model, E - h * scale, x0, x1)) / (2 * h * scale)
    dT = complex(dT).real
    if abs(dT) < 1e-12:
        raise CausticDivergenceError("dT/dE vanishes: configuration on a caustic")
    return 1.0 / (v0 * v1 * dT)


_MASLOV_PHASE = {0: -1j, 1: -1.0, 2: 1j}


def _real_saddle(model, kind, E, S, vv, maslov):
    sqrt_vv = _MASLOV_PHASE[maslov] * math.sqrt(abs(vv))
    return ClassicalSaddle(kind=kind, E=complex(E), S=complex(S),
                           vv=complex(vv), relevant=True,
                           sqrt_vv=complex(sqrt_vv), maslov=maslov)


# ---------------------------------------------------------------------------
# Heaviside closed forms
# ---------------------------------------------------------------------------

def heaviside_three_path_region(model: StepModel, bvp: BoundarySpec) -> bool:
    """True when three real paths exist: x0, x1 < 0 and
    |x0 + x1| < sqrt(2 V0 / m) T (the merger of the two bounce actions)."""
    u = abs(bvp.x0) + abs(bvp.x1)
    return (bvp.x0 < 0 and bvp.x1 < 0
            and u < math.sqrt(2.0 * model.V0 / model.m) * bvp.T)


def caustic_triangle_vertices(model: StepModel, T: float):
    """Vertices of the Heaviside caustic triangle in the (x0, x1) plane."""
    L = math.sqrt(2.0 * model.V0 / model.m) * T
    return [(0.0, 0.0), (0.0, -L), (-L, 0.0)]


def _heaviside_crossing(model, bvp):
    m, V0, T = model.m, model.V0, bvp.T
    xl, xr = (bvp.x0, bvp.x1) if bvp.x0 < 0 else (bvp.x1, bvp.x0)
    al, ar = abs(xl), abs(xr)

    def time_at(E):
        return math.sqrt(m / (2 * E)) * al + math.sqrt(m / (2 * (E - V0))) * ar

    lo, hi = V0 * (1 + 1e-13), V0 + 1.0
    while time_at(hi) > T:
        hi *= 2.0
        if hi > 1e12 * max(V0, 1.0):
            raise RootBracketError("crossing-energy bracket failed")
    from scipy.optimize import brentq
    E = brentq(lambda e: time_at(e) - T, lo, hi, xtol=1e-15, rtol=1e-15)
    S = (math.sqrt(m * E / 2) * al + math.sqrt(m * (E - V0) / 2) * ar
         - V0 * ar * math.sqrt(m / (2 * (E - V0))))
    dTdE = -0.5 * (math.sqrt(m / 2) * al * E ** -1.5
                   + math.sqrt(m / 2) * ar * (E - V0) ** -1.5)
    sgn = 1.0 if bvp.x0 < 0 else -1.0
    v0 = sgn * math.sqrt(2 * E / m)
    v1 = sgn * math.sqrt(2 * (E - V0) / m)
    if bvp.x0 > 0:
        v0, v1 = -math.sqrt(2 * (E - V0) / m), -math.sqrt(2 * E / m)
    vv = 1.0 / (v0 * v1 * dTdE)
    return _real_saddle(model, SaddleKind.DIRECT, E, S, vv, maslov=0)


def heaviside_paths(model: StepModel, bvp: BoundarySpec):
    """All real classical saddles of the Heaviside step, closed forms."""
    if model.family is not Family.HEAVISIDE:
        raise UnsupportedFamilyError("heaviside_paths requires the Heaviside family")
    m, V0, T = model.m, model.V0, bvp.T
    x0, x1 = bvp.x0, bvp.x1
    out = []
    if V0 == 0.0 or (x0 <= 0 and x1 <= 0):
        E = m * (x1 - x0) ** 2 / (2 * T * T)
        S = m * (x1 - x0) ** 2 / (2 * T)
        if V0 > 0 and x0 <= 0 and x1 <= 0:
            out.append(_real_saddle(model, SaddleKind.DIRECT, E, S,
                                    -m / T, maslov=0))
            u = abs(x0) + abs(x1)
            if T > math.sqrt(m / (2 * V0)) * u:
                El = m * u * u / (2 * T * T)
                out.append(_real_saddle(model, SaddleKind.LOW_BOUNCE, El,
                                        m * (x0 + x1) ** 2 / (2 * T),
                                        m / T, maslov=1))
                Sh = math.sqrt(2 * m * V0) * u - V0 * T
                out.append(ClassicalSaddle(kind=SaddleKind.HIGH_BOUNCE,
                                           E=complex(V0), S=complex(Sh),
                                           vv=0.0 + 0.0j, relevant=True,
                                           sqrt_vv=0.0 + 0.0j, maslov=2))
        else:
            out.append(_real_saddle(model, SaddleKind.DIRECT, E, S,
                                    -m / T, maslov=0))
    elif x0 > 0 and x1 > 0:
        E = m * (x1 - x0) ** 2 / (2 * T * T) + V0
        S = m * (x1 - x0) ** 2 / (2 * T) - V0 * T
        out.append(_real_saddle(model, SaddleKind.DIRECT, E, S, -m / T, maslov=0))
    else:
        out.append(_heaviside_crossing(model, bvp))
    return out


def heaviside_reflection_action(model: StepModel, bvp: BoundarySpec) -> complex:
    """Action of the (generally non-classical) single-reflection path.

    Continues the instantaneous bounce beyond its existence region; on the
    right of the step this is the quantum-reflection action
    m (x0 + x1)^2 / (2T) - V0 T.
    """
    m, V0, T = model.m, model.V0, bvp.T
    if bvp.x0 >= 0 and bvp.x1 >= 0:
        return m * (bvp.x0 + bvp.x1) ** 2 / (2 * T) - V0 * T
    return m * (bvp.x0 + bvp.x1) ** 2 / (2 * T)


# ---------------------------------------------------------------------------
# smooth-step real paths
# ---------------------------------------------------------------------------

def _energy_floor(model, x0, x1):
    return max(float(potential_value(model, x0)),
               float(potential_value(model, x1)))


def _solve_direct_ws(model, bvp):
    from scipy.optimize import brentq
    x0, x1, T = bvp.x0, bvp.x1, bvp.T
    floor = _energy_floor(model, x0, x1)
    lo = max(floor * (1 + 1e-12), 1e-300)
    f = lambda E: _t_direct(model, E, x0, x1) - T
    # log-spaced scan, 60 points per decade, extended until bracketed
    hi = 50.0 * max(model.V0, 1.0)
    lo_scan = max(lo, 1e-6 * max(model.V0, 1.0))
    for _ in range(40):
        grid = np.geomspace(lo_scan, hi, max(
            int(60 * math.log10(hi / lo_scan)) + 2, 8))
        vals = np.array([f(E) for E in grid])
        sign_change = np.where(np.diff(np.sign(vals)) != 0)[0]
        if sign_change.size:
            i = sign_change[0]
            E = brentq(f, grid[i], grid[i + 1], xtol=1e-16, rtol=8.9e-16)
            return E
        if vals[-1] > 0:
            hi *= 100.0
        else:
            new_lo = lo_scan * 1e-4
            if new_lo <= lo * (1 + 1e-12) or lo_scan <= lo * (1 + 1e-9):
                return None  # grazing bound exceeded: no direct path
            lo_scan = max(new_lo, lo * (1 + 1e-12))
    raise RootBracketError("direct-path energy not bracketed",
                           table=(grid, vals))


def _solve_bounces_ws(model, bvp):
    """Bounce-energy roots of T_b(E) = T on (E_floor, V0).

    The bounce branch dips to a single minimum and rises to the lingering
    divergence at E -> V0, so roots are bracketed around the minimum (a
    fixed scan would miss the arbitrarily narrow dip near a fold)."""
    from scipy.optimize import brentq
    x0, x1, T = bvp.x0, bvp.x1, bvp.T
    if model.V0 == 0.0:
        return []
    floor = _energy_floor(model, x0, x1)
    if floor >= model.V0:
        return []
    e_lo = max(floor * (1 + 1e-10), 1e-12 * model.V0)
    e_star, t_min = _bounce_minimum(model, x0, x1)
    if t_min > T:
        return []
    f = lambda E: float(_t_bounce(model, E, x0, x1).real) - T
    roots = []
    if f(e_lo) > 0 and e_lo < e_star:
        roots.append(brentq(f, e_lo, e_star, xtol=1e-16, rtol=8.9e-16))
    # rising branch toward the lingering divergence at V0
    hi = e_star
    for j in range(2, 50):
        cand = model.V0 * (1.0 - 10.0 ** (-j))
        if cand <= e_star:
            continue
        hi = cand
        if f(hi) > 0:
            break
    else:
        return sorted(roots)
    roots.append(brentq(f, e_star, hi, xtol=1e-16, rtol=8.9e-16))
    return sorted(roots)


def solve_real_paths(model: StepModel, bvp: BoundarySpec):
    """All real classical saddles (one or three) of the boundary-value problem."""
    if model.family is Family.HEAVISIDE:
        return heaviside_paths(model, bvp)
    x0, x1, T = bvp.x0, bvp.x1, bvp.T
    out = []
    E_dir = _solve_direct_ws(model, bvp)
    if E_dir is not None:
        S = float(_s_direct(model, E_dir, x0, x1, T).real)
        sgn = 1.0 if x1 >= x0 else -1.0
        v0 = sgn * abs(_speed(model, E_dir, x0))
        v1 = sgn * abs(_speed(model, E_dir, x1))
        vv = _vv_from_relation(_t_direct, model, E_dir, x0, x1, v0, v1)
        out.append(_real_saddle(model, SaddleKind.DIRECT, E_dir, S,
                                complex(vv).real, maslov=0))
    roots = _solve_bounces_ws(model, bvp)
    if roots:
        if len(roots) >= 2:
            picked = [(roots[0], SaddleKind.LOW_BOUNCE, 1),
                      (roots[-1], SaddleKind.HIGH_BOUNCE, 2)]
        else:
            # single bounce root: classify by its side of the time minimum
            e_star, _ = _bounce_minimum(model, x0, x1)
            kind, nu = ((SaddleKind.HIGH_BOUNCE, 2) if roots[0] > e_star
                        else (SaddleKind.LOW_BOUNCE, 1))
            picked = [(roots[0], kind, nu)]
        for E, kind, nu in picked:
            S = float(_s_bounce(model, E, x0, x1, T).real)
            v0 = abs(_speed(model, E, x0))
            v1 = -abs(_speed(model, E, x1))
            tb = lambda mdl, e, a, b: float(_t_bounce(mdl, e, a, b).real)
            vv = _vv_from_relation(tb, model, E, x0, x1, v0, v1)
            out.append(_real_saddle(model, kind, E, S, complex(vv).real, nu))
    if not out:
        raise RootBracketError("no real classical path found", table=None)
    return out


def van_vleck(model: StepModel, saddle: ClassicalSaddle, bvp: BoundarySpec):
    """d2S/dx0 dx1 of a saddle via implicit differentiation of its time relation."""
    if model.family is Family.HEAVISIDE or saddle.kind in (
            SaddleKind.CAUSTIC, SaddleKind.TOPOLOGICAL):
        return saddle.vv
    E = saddle.E.real
    x0, x1 = bvp.x0, bvp.x1
    if saddle.kind is SaddleKind.DIRECT:
        sgn = 1.0 if x1 >= x0 else -1.0
        v0 = sgn * abs(_speed(model, E, x0))
        v1 = sgn * abs(_speed(model, E, x1))
        return _vv_from_relation(_t_direct, model, E, x0, x1, v0, v1)
    v0 = abs(_speed(model, E, x0))
    v1 = -abs(_speed(model, E, x1))
    tb = lambda mdl, e, a, b: float(_t_bounce(mdl, e, a, b).real)
    return _vv_from_relation(tb, model, E, x0, x1, v0, v1)


# ---------------------------------------------------------------------------
# fold caustic and complex continuation
# ---------------------------------------------------------------------------

def _bounce_minimum(model, x0, x1):
    """(E*, Tmin) of the bounce branch at fixed endpoints."""
    from scipy.optimize import minimize_scalar
    floor = _energy_floor(model, x0, x1)
    V0 = model.V0
    lo = math.log10(max(1.0 - max(floor * (1 + 1e-10), 1e-10) / V0, 1e-13))

    def fn(lg):
        E = V0 * (1.0 - 10.0 ** lg)
        return float(_t_bounce(model, E, x0, x1).real)

    r = minimize_scalar(fn, bounds=(-13.0, lo), method="bounded",
                        options={"xatol": 1e-13})
    E_star = V0 * (1.0 - 10.0 ** r.x)
    return E_star, float(r.fun)


def bounce_fold(model: StepModel, x0: float, T: float,
                x1_lo: float, x1_hi: float):
    """x1 position of the fold caustic (bounce merger) at fixed x0, T.

    Solves Tmin(x1) = T by bisection on [x1_lo, x1_hi]."""
    from scipy.optimize import brentq

    def g(x1):
        return _bounce_minimum(model, x0, x1)[1] - T

    return brentq(g, x1_lo, x1_hi, xtol=1e-11)


def _tb_state(model, E, s0, s1):
    t0, _ = _t_s(model, E, s0)
    t1, _ = _t_s(model, E, s1)
    return -(t0 + t1)


def _newton_tracked(model, E, s0, s1, T, tol=1e-13, itmax=80):
    """Damped complex Newton on the branch-carried bounce relation."""
    for _ in range(itmax):
        F0 = _tb_state(model, E, s0.clone(), s1.clone()) - T
        if abs(F0) < tol * max(T, 1.0):
            _tb_state(model, E, s0, s1)  # commit branch state at the root
            return E
        h = 1e-7 * max(1.0, abs(E))
        probes = [_tb_state(model, E + h * ph, s0.clone(), s1.clone()) - T
                  for ph in (1, 1j, -1, -1j)]
        dF = ((probes[0] - probes[2]) / (2 * h)
              + (probes[1] - probes[3]) / (2j * h)) * 0.5
        if dF == 0:
            raise NewtonError("vanishing derivative in complex Newton")
        step = -F0 / dF
        lam = 1.0
        for _ in range(50):
            trial0, trial1 = s0.clone(), s1.clone()
            if abs(_tb_state(model, E + lam * step, trial0, trial1) - T) < abs(F0):
                E = E + lam * step
                s0.a0, s0.a1 = trial0.a0, trial0.a1
                s1.a0, s1.a1 = trial1.a0, trial1.a1
                break
            lam *= 0.5
        else:
            raise NewtonError("step damping failed in complex Newton")
    raise NewtonError("complex Newton did not converge")


def _saddle_from_state(model, E, s0, s1, T, branch_sign=-1.0):
    _, sa0 = _t_s(model, E, s0.clone())
    _, sa1 = _t_s(model, E, s1.clone())
    S = -E * T - (sa0 + sa1)
    h = 1e-7 * max(1.0, abs(E))
    probes = [_tb_state(model, E + h * ph, s0.clone(), s1.clone())
              for ph in (1, 1j, -1, -1j)]
    dT = ((probes[0] - probes[2]) / (2 * h)
          + (probes[1] - probes[3]) / (2j * h)) * 0.5
    if abs(dT) < 1e-12:
        raise CausticDivergenceError("dT/dE ~ 0 on the fold")
    v0 = _speed(model, E, s0.x)
    v1 = -_speed(model, E, s1.x)
    vv = 1.0 / (v0 * v1 * dT)
    relevant = S.imag >= 0
    return ClassicalSaddle(kind=SaddleKind.CAUSTIC, E=complex(E), S=complex(S),
                           vv=complex(vv), relevant=bool(relevant),
                           sqrt_vv=complex(branch_sign * cmath.sqrt(vv)))


def caustic_saddle(model: StepModel, bvp: BoundarySpec, seed: complex):
    """Complex bounce saddle from a seed energy (upper half-plane).

    The seed should come from continuation off the fold;
    :func:`find_caustic_saddle` supplies it automatically.
    """
    if seed.imag < 0:
        raise ValidationError("seed energy must lie in the upper half-plane")
    s0 = EndpointState(model, bvp.x0, complex(seed))
    s1 = EndpointState(model, bvp.x1, complex(seed))
    E = _newton_tracked(model, complex(seed), s0, s1, bvp.T)
    return _saddle_from_state(model, E, s0, s1, bvp.T)


def _find_fold_x1(model, x0, T, x1_target):
    """Fold position between x1_target (outside) and the step."""
    g = lambda xv: _bounce_minimum(model, x0, xv)[1] - T
    g_target = g(x1_target)
    if g_target <= 0:
        raise ValidationError(
            "configuration lies inside the caustic loop; no complex saddle")
    step = max(0.25, 0.05 * abs(x1_target))
    x_hi = x1_target
    for _ in range(200):
        x_next = min(x_hi + step, -1e-3)
        if g(x_next) <= 0:
            return bounce_fold(model, x0, T, x_hi, x_next)
        x_hi = x_next
        if x_hi >= -1e-3:
            break
    raise RootBracketError("fold caustic not bracketed along the x1 row")


def _continuation_walk(model, x0, T, x1_target, checkpoints, n_steps):
    """Walk the complex bounce root from the fold down to x1_target.

    Yields (x1, E, s0, s1) at every checkpoint (sorted from the fold out).
    """
    fold = _find_fold_x1(model, x0, T, x1_target)
    offset = max(2e-3, 1e-3 * abs(fold))
    x_start = fold - offset if x1_target < fold else fold + offset
    E_min, T_min = _bounce_minimum(model, x0, x_start)
    h = 1e-4 * model.V0
    curv = (float(_t_bounce(model, E_min + h, x0, x_start).real)
            - 2 * T_min
            + float(_t_bounce(model, E_min - h, x0, x_start).real)) / h ** 2
    if curv <= 0:
        raise NewtonError("fold curvature not positive; seeding failed")
    E = complex(E_min, math.sqrt(2.0 * max(T_min - T, 0.0) / curv))
    s0 = EndpointState(model, x0, E_min)
    s1 = EndpointState(model, x_start, E_min)
    _tb_state(model, E, s0, s1)
    walk = np.unique(np.concatenate([
        np.linspace(x_start, x1_target, max(n_steps, 50)),
        np.asarray(checkpoints, dtype=float)]))
    walk = walk[(walk <= x_start) & (walk >= x1_target)] if x1_target < x_start \
        else walk[(walk >= x_start) & (walk <= x1_target)]
    order = np.argsort(np.abs(walk - x_start))
    marks = {round(float(c), 12) for c in checkpoints}
    for xx in walk[order]:
        s1.x = float(xx)
        E = _newton_tracked(model, E, s0, s1, T)
        if round(float(xx), 12) in marks:
            yield float(xx), E, s0, s1


def find_caustic_saddle(model: StepModel, bvp: BoundarySpec,
                        n_steps: int = 500) -> ClassicalSaddle:
    """Caustic saddle at bvp via continuation from the fold caustic."""
    if model.family is not Family.WOODS_SAXON:
        raise UnsupportedFamilyError("caustic continuation needs the smooth step")
    for _, E, s0, s1 in _continuation_walk(model, bvp.x0, bvp.T, bvp.x1,
                                           [bvp.x1], n_steps):
        return _saddle_from_state(model, E, s0, s1, bvp.T)
    raise NewtonError("continuation did not reach the target configuration")


def caustic_saddle_curve(model: StepModel, x0: float, T: float, x1_values,
                         n_steps_per_unit: int = 200):
    """Caustic saddles along a row of x1 values sharing one continuation."""
    xs = np.asarray(x1_values, dtype=float)
    target = float(np.min(xs))
    n_steps = max(int(n_steps_per_unit * (abs(target) + 1)), 200)
    out = {}
    for xx, E, s0, s1 in _continuation_walk(model, x0, T, target, xs, n_steps):
        out[round(xx, 12)] = _saddle_from_state(model, E, s0, s1, T)
    return out


# ---------------------------------------------------------------------------
# topological saddle
# ---------------------------------------------------------------------------

def _re_time_above(model, E, x0, x1):
    """Re of the continued bounce time at real E > V0 (principal sheet)."""
    return float(_t_bounce(model, complex(E), x0, x1).real)


def topological_saddle(model: StepModel, bvp: BoundarySpec) -> ClassicalSaddle:
    """Real-energy reflecting saddle with E > V0.

    Solves Re T(E) = T on the continued bounce relation and assigns
    Im S = pi sqrt(2 m (E - V0)) / (2 alpha) from the contour prescription
    around the logarithmic singularity (half the reflection instanton action).
    The smallest admissible energy is returned (the branch that starts real
    at E = V0).
    """
    if model.family is not Family.WOODS_SAXON:
        raise UnsupportedFamilyError("topological saddle needs the smooth step")
    from scipy.optimize import brentq
    x0, x1, T = bvp.x0, bvp.x1, bvp.T
    V0 = model.V0
    grid = V0 * (1.0 + np.geomspace(1e-10, 50.0, 1200))
    vals = np.array([_re_time_above(model, E, x0, x1) for E in grid])
    crossings = np.where(np.diff(np.sign(vals - T)) != 0)[0]
    if crossings.size == 0:
        raise NoTopologicalSaddleError(
            "Re T(E) never reaches T for E > V0 (minimum-energy condition)")
    i = crossings[0]
    E = brentq(lambda e: _re_time_above(model, e, x0, x1) - T,
               grid[i], grid[i + 1], xtol=1e-15, rtol=8.9e-16)
    s_cont = complex(_s_bounce(model, complex(E), x0, x1, T))
    im_s = math.pi * math.sqrt(2.0 * model.m * (E - V0)) / (2.0 * model.alpha)
    S = complex(s_cont.real, im_s)
    h = 1e-7 * max(1.0, E)
    dT = (complex(_t_bounce(model, complex(E + h), x0, x1))
          - complex(_t_bounce(model, complex(E - h), x0, x1))) / (2 * h)
    v0 = _speed(model, complex(E), x0)
    v1 = -_speed(model, complex(E), x1)
    vv = 1.0 / (v0 * v1 * dT)
    return ClassicalSaddle(kind=SaddleKind.TOPOLOGICAL, E=complex(E), S=S,
                           vv=complex(vv), relevant=True,
                           sqrt_vv=complex(-cmath.sqrt(complex(vv))))
