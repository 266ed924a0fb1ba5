import numpy as np
import pytest

from annulift.annulus_maps import projected_plane_map, zoo
from annulift.config import DEFAULT
from annulift.curves import ClosedCurve, circle, rectangle
from annulift.errors import (
    BoundaryConditionViolation,
    ConfigurationViolation,
    FixedPointOnCurve,
    NotAQuadrilateral,
)
from annulift.index import (
    arc_push_family,
    homotopy_index_profile,
    index_jump_experiment,
    lefschetz_index,
    quad_configuration_index,
    saddle_rectangle_index,
)


def const_map(p):
    p = np.asarray(p, dtype=float)

    def fn(pts):
        return np.broadcast_to(p, np.shape(pts)).copy()

    return fn


def saddle(pts):
    pts = np.asarray(pts, dtype=float)
    return np.stack([2.0 * pts[..., 0], 0.5 * pts[..., 1]], axis=-1)


def crossed(pts):
    pts = np.asarray(pts, dtype=float)
    return np.stack([-2.0 * pts[..., 0], 0.5 * pts[..., 1]], axis=-1)


def brute_displacement_winding(F, fn, n=20_000):
    """Oracle: dense angle sum of the displacement along a parametrized curve."""
    t = np.arange(n + 1) / n
    pts = fn(t)
    disp = np.asarray(F(pts), dtype=float) - pts
    ang = np.arctan2(disp[:, 1], disp[:, 0])
    steps = np.mod(np.diff(ang) + np.pi, 2 * np.pi) - np.pi
    return int(round(steps.sum() / (2 * np.pi)))


# -- circle indices of the power maps -----------------------------------------------

@pytest.mark.parametrize("d", [2, 3, 5])
def test_power_map_circle_dichotomy(d):
    f = projected_plane_map(zoo("power", d=d))
    assert lefschetz_index(f, circle(0.5, 256)) == 1
    assert lefschetz_index(f, circle(2.0, 256)) == d


def test_negative_degree_inverts_the_circle_dichotomy():
    # image radius is r^d: for d < 0 large circles map inside (index 1)
    # and small circles map outside (index d)
    f = projected_plane_map(zoo("power", d=-2))
    assert lefschetz_index(f, circle(2.0, 256)) == 1
    assert lefschetz_index(f, circle(0.5, 256)) == -2


def test_constant_map_inside_and_outside():
    g = circle(1.0, 64)
    assert lefschetz_index(const_map([0.2, -0.1]), g) == 1
    assert lefschetz_index(const_map([3.0, 1.0]), g) == 0


def test_fixed_point_on_curve_detected():
    g = circle(1.0, 64)
    with pytest.raises(FixedPointOnCurve):
        lefschetz_index(const_map(g.samples[3]), g)


def test_index_invariant_under_refinement_and_start_rotation():
    f = projected_plane_map(zoo("power", d=3))
    g = circle(1.5, 64)
    assert lefschetz_index(f, g.refined(np.linspace(0.01, 0.97, 31))) == 3
    k = 17
    rolled = ClosedCurve(np.roll(g.samples, -k, axis=0))
    assert lefschetz_index(f, rolled) == 3


# -- saddle rectangles ---------------------------------------------------------------

def test_saddle_rectangle_matches_brute_force_oracle():
    def boundary(t):
        return rectangle(-1, 1, -1, 1, per_side=64).point_at(t)

    assert brute_displacement_winding(saddle, boundary) == -1
    assert saddle_rectangle_index(saddle, (-1, 1, -1, 1)) == -1


def test_crossed_rectangle_gives_plus_one():
    assert saddle_rectangle_index(crossed, (-1, 1, -1, 1)) == 1


def test_expanding_map_violates_top_condition():
    with pytest.raises(BoundaryConditionViolation) as err:
        saddle_rectangle_index(lambda p: 2.0 * np.asarray(p, float), (-1, 1, -1, 1))
    assert err.value.side == "top"


def test_saddle_on_shifted_rectangle():
    # conditions are relative to the box, not the origin
    def f(pts):
        pts = np.asarray(pts, dtype=float)
        return np.stack([10.0 + 2.0 * (pts[..., 0] - 10.0),
                         5.0 + 0.5 * (pts[..., 1] - 5.0)], axis=-1)

    assert saddle_rectangle_index(f, (9.0, 11.0, 4.0, 6.0)) == -1


# -- quadrilateral frames --------------------------------------------------------------

def frame():
    alpha = np.array([[-3.0, 1.0], [3.0, 1.0]])
    beta = np.array([[-3.0, -1.0], [3.0, -1.0]])
    gamma = np.array([[-1.0, -3.0], [-1.0, 3.0]])
    delta = np.array([[1.0, -3.0], [1.0, 3.0]])
    return alpha, beta, gamma, delta


def test_quad_straight_layout():
    assert quad_configuration_index(saddle, *frame(), expect=-1) == -1


def test_quad_swapped_layout():
    assert quad_configuration_index(crossed, *frame(), expect=1) == 1


def test_quad_polyline_frame():
    # same layout with curved (polyline) frame lines
    xs = np.linspace(-3, 3, 25)
    alpha = np.stack([xs, 1.0 + 0.05 * np.sin(xs)], axis=-1)
    beta = np.stack([xs, -1.0 + 0.05 * np.cos(xs)], axis=-1)
    ys = np.linspace(-3, 3, 25)
    gamma = np.stack([-1.0 + 0.05 * np.sin(ys), ys], axis=-1)
    delta = np.stack([1.0 + 0.05 * np.cos(ys), ys], axis=-1)
    assert quad_configuration_index(saddle, alpha, beta, gamma, delta, expect=-1) == -1


def test_quad_missing_crossing():
    alpha, beta, _, delta = frame()
    gamma_short = np.array([[-1.0, 2.0], [-1.0, 3.0]])
    with pytest.raises(NotAQuadrilateral):
        quad_configuration_index(saddle, alpha, beta, gamma_short, delta, expect=-1)


def test_quad_wrong_layout_rejected():
    with pytest.raises(ConfigurationViolation):
        quad_configuration_index(saddle, *frame(), expect=1)


# -- index jumps ------------------------------------------------------------------------

def test_jump_outward():
    g = circle(1.0, 256)
    assert index_jump_experiment(g, (0.0, 0.125), "out", inner_point=(0, 0)) == (1, 0)


def test_jump_inward():
    g = circle(1.0, 256)
    assert index_jump_experiment(g, (0.0, 0.125), "in", inner_point=(0, 0)) == (0, 1)


@pytest.mark.parametrize("width", [0.125, 0.25])
def test_jump_is_arc_width_independent(width):
    g = circle(1.0, 256)
    assert index_jump_experiment(g, (0.3, 0.3 + width), "out", inner_point=(0, 0)) == (1, 0)


def test_jump_family_midpoint_crosses_curve():
    g = circle(1.0, 128)
    family, p_in, p_out = arc_push_family(g, (0.0, 0.125), inner_point=(0, 0))
    from annulift.curves import point_in_polygon
    assert point_in_polygon(p_in, g.samples)
    assert not point_in_polygon(p_out, g.samples)
    # at the crossing time the pushed arc sits on the curve
    mid_image = family(0.5)(np.array([0.0625]))
    assert abs(np.hypot(*mid_image[0]) - 1.0) < 1e-6


# -- homotopy invariance -----------------------------------------------------------------

def test_homotopy_invariance_over_twenty_steps():
    boundary = ClosedCurve(np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]))

    def family(t):
        def f(pts):
            img = saddle(pts)
            return np.stack([img[..., 0], (1.0 - t) * img[..., 1]], axis=-1)
        return f

    profile = homotopy_index_profile(family, boundary, np.linspace(0, 1, 20))
    assert profile == [-1] * 20


def test_free_homotopy_radius_independence():
    f = projected_plane_map(zoo("power", d=2))
    assert [lefschetz_index(f, circle(r, 256)) for r in (0.3, 0.5, 0.7)] == [1, 1, 1]
    assert [lefschetz_index(f, circle(r, 256)) for r in (1.5, 2.0, 3.0)] == [2, 2, 2]


def test_local_perturbation_stability():
    # perturb the map and the curve inside small disks around a finite set of
    # curve points, images confined near the original images: index unchanged
    rng = np.random.default_rng(11)
    f = projected_plane_map(zoo("power", d=2))
    base = circle(2.0, 256)
    base_idx = lefschetz_index(f, base)
    delta = 0.04
    for _ in range(25):
        anchors_t = rng.uniform(0.0, 1.0, 3)
        anchors = base.point_at(anchors_t)

        samples = base.samples.copy()
        for a in anchors:
            near = np.hypot(*(samples - a).T) < delta
            samples[near] += rng.uniform(-0.3 * delta, 0.3 * delta, (near.sum(), 2))
        moved = ClosedCurve(samples)

        shifts = rng.uniform(-0.02, 0.02, (3, 2))

        def perturbed(pts, anchors=anchors, shifts=shifts):
            out = f(pts)
            pts = np.asarray(pts, dtype=float)
            for a, s in zip(anchors, shifts):
                w = np.clip(1.0 - np.hypot(*(pts - a).T) / delta, 0.0, 1.0)
                out = out + w[..., None] * s
            return out

        assert lefschetz_index(perturbed, moved) == base_idx
