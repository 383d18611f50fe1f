import math

import numpy as np
import pytest

from stepprop import caustics as ca
from stepprop import classical as cl
from stepprop.errors import InsideCausticError
from stepprop.potential import Family, StepModel, potential_value


def test_ivp_free_particle():
    md = StepModel(Family.WOODS_SAXON, 1, 0.0, 1, 1)
    x, J = ca.integrate_ivp(md, -3.0, 0.7, 10.0)
    assert x == pytest.approx(-3.0 + 7.0, rel=1e-9)
    assert J == pytest.approx(10.0, rel=1e-9)


def test_ivp_energy_conservation(ws_unit):
    from scipy.integrate import solve_ivp
    from stepprop.potential import potential_derivatives

    x0, v0 = -4.0, 1.1

    def rhs(t, y):
        _, vp, _ = potential_derivatives(ws_unit, y[0])
        return [y[1], -vp]

    sol = solve_ivp(rhs, (0, 10.0), [x0, v0], rtol=1e-11, atol=1e-13,
                    dense_output=True)
    ts = np.linspace(0, 10, 500)
    xs, vs = sol.sol(ts)
    E = 0.5 * vs ** 2 + potential_value(ws_unit, xs)
    assert np.max(np.abs(E - E[0])) < 1e-9


def test_variational_sign_change_brackets_conjugate_time(ws_unit):
    # a bouncing orbit acquires a conjugate point: J(T) changes sign in T
    x0, v0 = -4.0, 1.05   # E ~ 0.55 < V0: reflected orbit
    js = [ca.integrate_ivp(ws_unit, x0, v0, T)[1] for T in (2.0, 14.0)]
    assert np.sign(js[0]) != np.sign(js[1])


def test_caustic_curve_encloses_three_path_region(ws_unit):
    pts = ca.caustic_curve(ws_unit, 10.0, [-4.0], n_scan=200)
    assert pts, "no caustic points found on the x0 = -4 row"
    roots = sorted(p[1] for p in pts)
    # directly outside/inside classification against the path census
    fold_lo = min(roots)
    inside = cl.BoundarySpec(-4.0, fold_lo + 0.05, 10.0)
    outside = cl.BoundarySpec(-4.0, fold_lo - 0.05, 10.0)
    assert len(cl.solve_real_paths(ws_unit, inside)) == 3
    assert len(cl.solve_real_paths(ws_unit, outside)) == 1
    assert ca.inside_caustic(ws_unit, inside)
    assert not ca.inside_caustic(ws_unit, outside)


def test_caustic_curve_matches_fold_finder(ws_unit):
    pts = ca.caustic_curve(ws_unit, 10.0, [-4.0], n_scan=300)
    fold_ivp = min(p[1] for p in pts)
    fold_cl = cl.bounce_fold(ws_unit, -4.0, 10.0, -4.6, -3.2)
    assert fold_ivp == pytest.approx(fold_cl, abs=5e-4)


def test_heaviside_caustic_is_analytic_triangle(heaviside_unit):
    pts = ca.caustic_curve(heaviside_unit, 10.0, [-1.0])
    L = math.sqrt(2.0) * 10.0
    # every emitted point lies on one of the three edges
    for (a, b) in pts:
        on_edges = (abs(a) < 1e-9 or abs(b) < 1e-9
                    or abs(a + b + L) < 1e-9)
        assert on_edges


def test_cusp_detection_on_smooth_loop(ws_unit):
    x0s = np.linspace(-4.5, -0.3, 36)
    pts = ca.caustic_curve(ws_unit, 10.0, x0s, n_scan=250)
    cusps = ca.cusp_points(pts)
    assert len(cusps) >= 2


def test_stokes_lines_heaviside_axes(heaviside_unit):
    pts = ca.stokes_lines(heaviside_unit, 10.0, [0.0])
    assert all(abs(a) < 1e-12 or abs(b) < 1e-12 for a, b in pts)


def test_relevance_flag_regions(heaviside_unit):
    # reflecting quadrant outside the triangle: relevant
    assert ca.relevance_flag(heaviside_unit, cl.BoundarySpec(-5.0, -9.25, 10.0))
    # crossing region: not relevant
    assert not ca.relevance_flag(heaviside_unit, cl.BoundarySpec(-5.0, 9.25, 10.0))
    # right-side reflection region: relevant
    assert ca.relevance_flag(heaviside_unit, cl.BoundarySpec(5.0, 4.0, 10.0))
    # on the Stokes line: tie-break counts as relevant
    assert ca.relevance_flag(heaviside_unit, cl.BoundarySpec(0.0, -16.0, 10.0))
    with pytest.raises(InsideCausticError):
        ca.relevance_flag(heaviside_unit, cl.BoundarySpec(-4.0, -4.0, 10.0))


def test_relevance_flag_smooth_reflecting_side(ws_steep):
    assert ca.relevance_flag(ws_steep, cl.BoundarySpec(-5.0, -9.25, 10.0))


def test_stokes_relevant_wedge_on_smooth_row(ws_unit):
    # a row through the lower-left (relevant) wedge never crosses a Stokes
    # line: Re S_caustic stays above Re S_direct all the way out, and the
    # row-walker correctly returns no crossing points
    pts = ca.stokes_lines(ws_unit, 10.0, [-3.0], x1_limit=-9.0)
    assert pts == []
    xs = np.linspace(-9.0, -5.2, 9)
    sads = cl.caustic_saddle_curve(ws_unit, -3.0, 10.0, xs)
    for key, sad in sads.items():
        bvp = cl.BoundarySpec(-3.0, float(key), 10.0)
        (direct,) = [s for s in cl.solve_real_paths(ws_unit, bvp)
                     if s.kind is cl.SaddleKind.DIRECT]
        assert sad.S.real > direct.S.real
        assert sad.relevant
