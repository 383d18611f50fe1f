import math

import numpy as np
import pytest

from stepprop.errors import (PotentialPoleError, UnsupportedFamilyError,
                             ValidationError)
from stepprop.potential import (Family, StepModel, potential_complement,
                                potential_derivatives, potential_value,
                                rescale, singularity_locations)
from stepprop.propagator import propagate


def test_ws_symmetry_point_and_asymptotes(ws_unit):
    assert potential_value(ws_unit, 0.0) == pytest.approx(0.5)
    assert potential_value(ws_unit, -40.0) == pytest.approx(0.0, abs=1e-30)
    assert potential_value(ws_unit, 40.0) == pytest.approx(1.0)


def test_heaviside_theta_convention(heaviside_unit):
    assert potential_value(heaviside_unit, -1.0) == 0.0
    assert potential_value(heaviside_unit, 1.0) == 1.0
    assert potential_value(heaviside_unit, 0.0) == 0.5


def test_pole_guard(ws_unit):
    with pytest.raises(PotentialPoleError):
        potential_value(ws_unit, 1j * math.pi / 2 * (1 - 1e-9))
    # off the pole it evaluates
    v = potential_value(ws_unit, 0.3 + 1j * 0.6)
    assert np.isfinite(v)


def test_singularity_locations(ws_unit):
    locs = singularity_locations(ws_unit, (0, 0))
    assert locs[0] == pytest.approx(1j * math.pi / 2)
    assert singularity_locations(ws_unit, (-1, -1))[0] == pytest.approx(-1j * math.pi / 2)
    md = StepModel(Family.WOODS_SAXON, alpha=5.0)
    assert singularity_locations(md, (0, 0))[0] == pytest.approx(1j * math.pi / 10)
    with pytest.raises(UnsupportedFamilyError):
        singularity_locations(StepModel(Family.HEAVISIDE), (0, 1))


def test_analyticity_cauchy_riemann(ws_unit, rng):
    h = 1e-5
    for _ in range(20):
        z = complex(rng.uniform(-2, 2), rng.uniform(-1.2, 1.2))
        dx = (potential_value(ws_unit, z + h) - potential_value(ws_unit, z - h)) / (2 * h)
        dy = (potential_value(ws_unit, z + 1j * h) - potential_value(ws_unit, z - 1j * h)) / (2 * h)
        # complex differentiability: directional derivatives agree
        assert abs(dx - dy / 1j) < 1e-6 * max(1.0, abs(dx))


def test_ws_to_heaviside_pointwise():
    md = StepModel(Family.WOODS_SAXON, alpha=50.0)
    hv = StepModel(Family.HEAVISIDE)
    for x in (-0.5, -0.2, 0.2, 0.5, 1.5):
        if x < 0:
            gap = abs(potential_value(md, x) - potential_value(hv, x))
        else:
            # V_h = V0 there; use the cancellation-free complement
            gap = abs(potential_complement(md, x))
        assert gap <= math.exp(-2 * 50.0 * abs(x)) * md.V0 * (1 + 1e-12)


def test_potential_complement_exact_tail(ws_unit):
    # on the right the naive V - V0 cancels to zero; the complement keeps
    # the exponential tail exactly
    x = 20.0
    assert potential_value(ws_unit, x) - 1.0 == 0.0
    assert potential_complement(ws_unit, x) == pytest.approx(
        -math.exp(-2 * 20.0), rel=1e-12)


def test_derivative_closed_forms(ws_unit):
    h = 1e-6
    for x in (-1.0, 0.0, 0.7):
        v, vp, vpp = potential_derivatives(ws_unit, x)
        fd1 = (potential_value(ws_unit, x + h) - potential_value(ws_unit, x - h)) / (2 * h)
        assert vp == pytest.approx(fd1, rel=1e-8, abs=1e-10)


def test_rescale_identity_and_mapping(ws_unit):
    same, x0, x1, T = rescale(ws_unit, -4.0, -6.0, 10.0, 1.0)
    assert same == ws_unit and (x0, x1, T) == (-4.0, -6.0, 10.0)
    scaled, x0, x1, T = rescale(ws_unit, -4.0, -6.0, 10.0, 2.0)
    assert scaled.alpha == 2.0 and scaled.hbar == 0.5
    assert (x0, x1, T) == (-2.0, -3.0, 5.0)
    with pytest.raises(ValidationError):
        rescale(ws_unit, 0, 0, 1, -1.0)


def test_rescale_preserves_propagator(ws_unit):
    # the amplitude carries the delta-normalization Jacobian C under x -> x/C
    for C in (2.0, 3.0):
        scaled, x0, x1, T = rescale(ws_unit, -4.0, -6.0, 10.0, C)
        g1 = propagate(ws_unit, -4.0, -6.0, 10.0).G
        g2 = propagate(scaled, x0, x1, T).G
        assert abs(g1 - g2 / C) < 1e-6


def test_model_json_roundtrip_and_validation():
    cfg = {"family": "woods_saxon", "m": 1.0, "V0": 2.0, "alpha": 3.0, "hbar": 0.5}
    md = StepModel.from_dict(cfg)
    assert md.to_dict() == cfg
    with pytest.raises(ValidationError):
        StepModel.from_dict({**cfg, "spurious": 1})
    with pytest.raises(ValidationError):
        StepModel.from_dict({"family": "nonsense"})
    with pytest.raises(ValidationError):
        StepModel(Family.WOODS_SAXON, m=-1.0)
    # V0 = 0 is the free-particle degenerate case and is allowed
    assert StepModel(Family.WOODS_SAXON, V0=0.0).V0 == 0.0
