import cmath
import math

import numpy as np
import pytest

from wpkernel import DomainError, Region, classify, trace_curve_K, trace_szego_curve, u_map
from wpkernel.szego_geometry import (
    dist_to_polyline,
    negative_axis_crossing,
    point_in_polygon,
    u_abs,
    winding_number,
)


def test_u_map_values():
    assert u_map(1.0) == 1.0
    assert u_map(0.0) == 0.0
    assert abs(u_map(1j)) == pytest.approx(math.e, rel=1e-15)


def test_traced_curve_contracts():
    step, tol = 1e-3, 1e-9
    curve = trace_szego_curve(step=step, tol=tol)
    assert curve.closed
    assert curve.points[0] == 1.0 and curve.points[-1] == 1.0
    spacing = np.abs(np.diff(curve.points))
    assert spacing.max() <= step
    residual = np.abs(np.abs(curve.points * np.exp(1 - curve.points)) - 1.0)
    assert residual.max() <= tol
    assert np.abs(curve.points).max() <= 1.0 + tol
    assert winding_number(curve.points, 0.5) == pytest.approx(1.0, abs=1e-9)


def test_negative_axis_crossing():
    # independent oracle: bisection on t e^t = e^{-1}
    t = negative_axis_crossing()
    assert t * math.exp(t) == pytest.approx(math.exp(-1.0), abs=1e-13)
    curve = trace_szego_curve()
    assert float(np.min(curve.points.real)) == pytest.approx(-t, abs=1e-9)
    assert -t == pytest.approx(-0.27846, abs=1e-4)


def test_curve_K_contracts():
    step, tol, extent = 1e-3, 1e-9, 1.0
    curve = trace_curve_K(extent=extent, step=step, tol=tol)
    assert not curve.closed
    mid = len(curve.points) // 2
    assert curve.points[mid] == 1.0
    # vertical tangent at the saddle
    t_up = (curve.points[mid + 1] - 1.0) / abs(curve.points[mid + 1] - 1.0)
    assert abs(t_up - 1j) < 5e-3
    residual = np.abs([u_map(p).imag for p in curve.points])
    assert residual.max() <= tol
    # the branch leaves into |u| > 1
    far = curve.points[np.abs(curve.points - 1.0) > 0.45]
    assert all(u_abs(p) > 1.0 for p in far)
    # endpoints reach the requested extent
    assert abs(curve.points[0] - 1.0) >= extent - 2e-3


def test_classification_probe_set():
    expected = {
        1.8: (Region.REGION_II, True),
        0.5: (Region.REGION_I, False),
        1j: (Region.REGION_III, True),
        3.0: (Region.REGION_II, True),
        0.9j: (Region.REGION_III, True),
        -2.0: (Region.REGION_III, True),
        2 + 1j: (Region.REGION_II, True),
        1.0: (Region.AT_ONE, False),
    }
    for z, (label, in_e) in expected.items():
        got = classify(z)
        assert got.label is label, f"{z}: {got.label} != {label}"
        assert got.in_E_sz == in_e


def test_classify_conjugation_symmetry():
    rng = np.random.default_rng(17)
    for _ in range(60):
        z = complex(rng.uniform(-1.5, 2.5), rng.uniform(0.01, 2.0))
        assert classify(z).label is classify(z.conjugate()).label


def test_exterior_for_real_axis_and_outside_disc():
    for x in [1.01, 1.5, 3.0, 10.0]:
        assert classify(x).in_E_sz
    rng = np.random.default_rng(23)
    for _ in range(40):
        z = cmath.exp(1j * rng.uniform(0, 2 * math.pi)) * rng.uniform(1.0001, 3.0)
        assert classify(z).in_E_sz


def test_region_boundary_flip():
    curve = trace_szego_curve()
    # pick a few smooth curve points and nudge along the inward normal
    for idx in [len(curve.points) // 5, len(curve.points) // 3, len(curve.points) // 2]:
        p = curve.points[idx]
        tangent = curve.points[idx + 1] - curve.points[idx - 1]
        normal = 1j * tangent / abs(tangent)
        eps = 1e-4
        inside, outside = p + eps * normal, p - eps * normal
        if not point_in_polygon(curve.points, inside):
            inside, outside = outside, inside
        assert classify(inside).label is Region.REGION_I
        assert classify(outside).label is not Region.REGION_I


def test_on_curve_labels():
    curve = trace_szego_curve()
    p = curve.points[len(curve.points) // 4]
    assert classify(p, tol=1e-6).label is Region.ON_SZEGO_CURVE
    k_curve = trace_curve_K()
    q = k_curve.points[len(k_curve.points) // 2 + 200]
    assert classify(q, tol=1e-6).label is Region.ON_CURVE_K
    # distant zeros of Im u (the real axis) are not claimed by the K label
    assert classify(-2.0, tol=1e-6).label is Region.REGION_III


def test_dist_to_polyline_and_polygon_helpers():
    square = np.array([0, 1, 1 + 1j, 1j, 0], dtype=complex)
    assert point_in_polygon(square, 0.5 + 0.5j)
    assert not point_in_polygon(square, 1.5 + 0.5j)
    assert dist_to_polyline(square, 0.5 + 2j) == pytest.approx(1.0, abs=1e-14)


def test_step_precondition():
    with pytest.raises(DomainError):
        trace_szego_curve(step=0.2)
