"""Executable index-identity suites: each run re-derives one of the index
facts the fixed-point machinery rests on, with exact integer expectations.

Used by the CLI ``lemmas`` subcommand and by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .annulus_maps import projected_plane_map, zoo
from .config import DEFAULT, Tolerances
from .curves import ClosedCurve, circle
from .index import (
    homotopy_index_profile,
    index_jump_experiment,
    lefschetz_index,
    quad_configuration_index,
    saddle_rectangle_index,
)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


def _saddle(pts):
    pts = np.asarray(pts, dtype=float)
    return np.stack([2.0 * pts[..., 0], 0.5 * pts[..., 1]], axis=-1)


def _crossed(pts):
    pts = np.asarray(pts, dtype=float)
    return np.stack([-2.0 * pts[..., 0], 0.5 * pts[..., 1]], axis=-1)


def _frame_lines():
    alpha = np.array([[-3.0, 1.0], [3.0, 1.0]])
    beta = np.array([[-3.0, -1.0], [3.0, -1.0]])
    gamma = np.array([[-1.0, -3.0], [-1.0, 3.0]])
    delta = np.array([[1.0, -3.0], [1.0, 3.0]])
    return alpha, beta, gamma, delta


def suite_saddle_rectangle(cfg: Tolerances = DEFAULT) -> SuiteResult:
    idx = saddle_rectangle_index(_saddle, (-1, 1, -1, 1), cfg=cfg)
    return SuiteResult("saddle rectangle boundary", idx == -1, f"index {idx}, expected -1")


def suite_crossed_rectangle(cfg: Tolerances = DEFAULT) -> SuiteResult:
    idx = saddle_rectangle_index(_crossed, (-1, 1, -1, 1), cfg=cfg)
    return SuiteResult("crossed rectangle boundary", idx == 1, f"index {idx}, expected +1")


def suite_quad_straight(cfg: Tolerances = DEFAULT) -> SuiteResult:
    idx = quad_configuration_index(_saddle, *_frame_lines(), expect=-1, cfg=cfg)
    return SuiteResult("quadrilateral frame, straight layout", idx == -1,
                       f"index {idx}, expected -1")


def suite_quad_swapped(cfg: Tolerances = DEFAULT) -> SuiteResult:
    idx = quad_configuration_index(_crossed, *_frame_lines(), expect=1, cfg=cfg)
    return SuiteResult("quadrilateral frame, swapped layout", idx == 1,
                       f"index {idx}, expected +1")


def suite_index_jump(cfg: Tolerances = DEFAULT) -> SuiteResult:
    g = circle(1.0, n=256)
    out_pair = index_jump_experiment(g, (0.0, 0.125), "out", inner_point=(0.0, 0.0), cfg=cfg)
    in_pair = index_jump_experiment(g, (0.0, 0.125), "in", inner_point=(0.0, 0.0), cfg=cfg)
    ok = out_pair == (1, 0) and in_pair == (0, 1)
    return SuiteResult("index jump across an arc", ok,
                       f"outward {out_pair} expected (1, 0); inward {in_pair} expected (0, 1)")


def suite_homotopy_invariance(cfg: Tolerances = DEFAULT, steps: int = 20) -> SuiteResult:
    # squash the saddle image onto the horizontal axis: never a fixed point
    # on the boundary, so the index must stay -1 the whole way
    boundary = ClosedCurve(np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]))

    def family(t):
        def f(pts):
            img = _saddle(pts)
            return np.stack([img[..., 0], (1.0 - t) * img[..., 1]], axis=-1)
        return f

    times = np.linspace(0.0, 1.0, steps)
    profile = homotopy_index_profile(family, boundary, times, cfg=cfg)
    squash_ok = all(v == -1 for v in profile)

    # free homotopy of the curve: the power-map index is constant on each
    # side of the invariant circle
    plane2 = projected_plane_map(zoo("power", d=2))
    inner = [lefschetz_index(plane2, circle(r, 256), cfg=cfg) for r in (0.3, 0.5, 0.7)]
    outer = [lefschetz_index(plane2, circle(r, 256), cfg=cfg) for r in (1.5, 2.0, 3.0)]
    radii_ok = inner == [1, 1, 1] and outer == [2, 2, 2]

    return SuiteResult(
        "homotopy invariance of the index",
        squash_ok and radii_ok,
        f"squash profile {sorted(set(profile))} expected [-1]; "
        f"inner radii {inner} expected all 1; outer radii {outer} expected all 2")


ALL_SUITES = (
    suite_saddle_rectangle,
    suite_crossed_rectangle,
    suite_quad_straight,
    suite_quad_swapped,
    suite_index_jump,
    suite_homotopy_invariance,
)


def run_all(cfg: Tolerances = DEFAULT) -> list[SuiteResult]:
    return [suite(cfg) for suite in ALL_SUITES]
