"""Certified fixed-point isolation, Nielsen residues, completeness sweeps.

A box certifies a fixed point of a lift when the winding number of the
displacement field F - id around its boundary is nonzero; this needs only
continuity, no derivatives. Boxes are discarded only when a sampled
displacement lower bound (grid minimum minus a finite-difference Lipschitz
estimate times the grid reach) excludes zeros, so the certified boxes cover
every fixed point of the region up to the validity of that estimate. The
exclusion estimate is cross-checked by a dense oracle in the test suite.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .annulus_maps import (
    AnnulusPoint,
    LiftMap,
    annulus_distance,
    deck_translate,
    iterate,
    project,
)
from .config import DEFAULT, Tolerances, worker_count
from .curves import rectangle
from .errors import (
    BoundaryFixedPoint,
    BudgetExceeded,
    DistanceViolation,
    EmptyReport,
    FixedPointOnCurve,
    NotPeriodic,
    NonIntegerTranslation,
    ParamOutOfRange,
    ToolkitError,
)
from .index import lefschetz_index

CONTINUUM = "SINGLE_CLASS_CONTINUUM"


@dataclass(frozen=True)
class CertifiedFixedBox:
    """Axis-aligned box whose boundary degree certifies an interior fixed point.

    ``lift_offset`` records which deck translate F + (k, 0) was certified.
    """

    box: tuple[float, float, float, float]   # x_lo, x_hi, y_lo, y_hi
    boundary_degree: int
    lift_offset: int = 0

    @property
    def center(self) -> tuple[float, float]:
        x0, x1, y0, y1 = self.box
        return (0.5 * (x0 + x1), 0.5 * (y0 + y1))

    @property
    def size(self) -> float:
        x0, x1, y0, y1 = self.box
        return max(x1 - x0, y1 - y0)

    def contains(self, point) -> bool:
        x0, x1, y0, y1 = self.box
        return bool(x0 <= point[0] <= x1 and y0 <= point[1] <= y1)


@dataclass
class IsolationAudit:
    """Optional byproduct collector for the soundness property tests."""

    discarded: list = field(default_factory=list)   # (box, sampled_min, bound)
    unresolved: list = field(default_factory=list)  # fragments never resolved
    boxes_processed: int = 0


class _BoundaryHit(Exception):
    """Internal: a fixed point sat on a subdivision boundary; jitter and retry."""


def _displacement(F, pts):
    return np.asarray(F(pts), dtype=float) - pts


def _exclusion_margin(F, box, cfg: Tolerances) -> tuple[float, float]:
    """(margin, sampled_min): margin > 0 certifies the box has no fixed point,
    up to the finite-difference Lipschitz estimate."""
    x0, x1, y0, y1 = box
    m = cfg.exclusion_grid
    xs = np.linspace(x0, x1, m)
    ys = np.linspace(y0, y1, m)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx, gy], axis=-1)
    disp = _displacement(F, pts.reshape(-1, 2)).reshape(m, m, 2)
    norms = np.hypot(disp[..., 0], disp[..., 1])
    hx = (x1 - x0) / (m - 1)
    hy = (y1 - y0) / (m - 1)
    lip_x = np.hypot(*(np.diff(disp, axis=1).T)).max() / hx if hx > 0 else 0.0
    lip_y = np.hypot(*(np.diff(disp, axis=0).T)).max() / hy if hy > 0 else 0.0
    lip = max(lip_x, lip_y, 1.0)  # displacement of id alone has slope 1
    reach = 0.5 * float(np.hypot(hx, hy))
    sampled_min = float(norms.min())
    return sampled_min - cfg.exclusion_safety * lip * reach, sampled_min


def _boundary_degree(F, box, cfg: Tolerances) -> int:
    x0, x1, y0, y1 = box
    curve = rectangle(x0, x1, y0, y1, per_side=cfg.boundary_samples_per_side)
    return lefschetz_index(F, curve, min_disp=cfg.boundary_min_disp, cfg=cfg)


def _jittered(region, attempt: int, cfg: Tolerances):
    if attempt == 0:
        return tuple(map(float, region))
    # translate and dilate the region to break any alignment of fixed points
    # with the dyadic subdivision grid; per-attempt multipliers are drawn
    # deterministically and independently, because a pure dilation scaled up
    # linearly can keep cancelling at one relative position forever
    rng = np.random.default_rng(attempt)
    t = attempt * cfg.jitter_base
    tx, ty = t * (0.2 + 0.6 * rng.random(2))
    dx, dy = t * (1.1 + 0.5 * rng.random(2))  # dilation > translation: superset
    x0, x1, y0, y1 = map(float, region)
    return (x0 - tx - dx, x1 - tx + dx, y0 - ty - dy, y1 - ty + dy)


def _mop_up(F, box, floor: float, cfg: Tolerances, audit: IsolationAudit) -> None:
    """A leaf had boundary degree 0 but was not excluded: push exclusion
    deeper. Fragments surviving at the floor scale force a jitter retry."""
    stack = [box]
    while stack:
        b = stack.pop()
        audit.boxes_processed += 1
        if audit.boxes_processed > cfg.subdivision_budget:
            raise BudgetExceeded(f"subdivision cap {cfg.subdivision_budget} passed")
        margin, _ = _exclusion_margin(F, b, cfg)
        if margin > 0:
            continue
        x0, x1, y0, y1 = b
        if max(x1 - x0, y1 - y0) <= floor:
            audit.unresolved.append(b)
            raise _BoundaryHit
        xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        stack.extend([(x0, xm, y0, ym), (xm, x1, y0, ym),
                      (x0, xm, ym, y1), (xm, x1, ym, y1)])


def _isolate_once(F, region, resolution: float, cfg: Tolerances,
                  audit: IsolationAudit, lift_offset: int) -> list[CertifiedFixedBox]:
    x0, x1, y0, y1 = region
    boundary = rectangle(x0, x1, y0, y1, per_side=64)
    bnorm = np.hypot(*_displacement(F, boundary.samples).T)
    if bnorm.min() <= cfg.boundary_min_disp:
        raise _BoundaryHit
    certified = []
    stack = [tuple(map(float, region))]
    while stack:
        box = stack.pop()
        audit.boxes_processed += 1
        if audit.boxes_processed > cfg.subdivision_budget:
            raise BudgetExceeded(f"subdivision cap {cfg.subdivision_budget} passed")
        margin, sampled_min = _exclusion_margin(F, box, cfg)
        if margin > 0:
            audit.discarded.append((box, sampled_min, margin))
            continue
        bx0, bx1, by0, by1 = box
        if max(bx1 - bx0, by1 - by0) <= resolution:
            try:
                deg = _boundary_degree(F, box, cfg)
            except (FixedPointOnCurve, DistanceViolation) as exc:
                raise _BoundaryHit from exc
            if deg != 0:
                certified.append(CertifiedFixedBox(box, deg, lift_offset))
            else:
                _mop_up(F, box, resolution / 256.0, cfg, audit)
            continue
        xm, ym = 0.5 * (bx0 + bx1), 0.5 * (by0 + by1)
        stack.extend([(bx0, xm, by0, ym), (xm, bx1, by0, ym),
                      (bx0, xm, ym, by1), (xm, bx1, ym, by1)])
    return sorted(certified, key=lambda c: c.box)


def _merge_clusters(boxes: list[CertifiedFixedBox], radius: float, F, cfg: Tolerances
                    ) -> list[CertifiedFixedBox]:
    """Merge boxes certifying the same point (centers within the merge radius).

    The merged representative is the cluster hull, re-certified when its own
    boundary degree can be computed; otherwise the first member stands in.
    """
    if len(boxes) <= 1:
        return list(boxes)
    centers = np.array([b.center for b in boxes])
    n = len(boxes)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if np.hypot(*(centers[i] - centers[j])) <= radius:
                parent[find(i)] = find(j)

    clusters: dict[int, list[CertifiedFixedBox]] = {}
    for i, b in enumerate(boxes):
        clusters.setdefault(find(i), []).append(b)

    merged = []
    for members in clusters.values():
        if len(members) == 1:
            merged.append(members[0])
            continue
        xs0, xs1, ys0, ys1 = zip(*(m.box for m in members))
        hull = (min(xs0), max(xs1), min(ys0), max(ys1))
        try:
            deg = _boundary_degree(F, hull, cfg)
            merged.append(CertifiedFixedBox(hull, deg, members[0].lift_offset))
        except (FixedPointOnCurve, DistanceViolation):
            merged.append(members[0])
    return sorted(merged, key=lambda c: c.box)


def isolate_fixed_points(F: LiftMap, region, resolution: float,
                         cfg: Tolerances = DEFAULT, lift_offset: int = 0,
                         audit: Optional[IsolationAudit] = None
                         ) -> list[CertifiedFixedBox]:
    """Certified boxes around every fixed point of F inside the region.

    Adaptive quadtree: boxes are discarded only by the displacement lower
    bound, recursed while larger than the resolution, and certified when a
    nonzero boundary degree is found at resolution scale. A fixed point
    sitting on a subdivision line triggers a jittered retry (the region is
    dilated by distinct irrational offsets); BoundaryFixedPoint is raised
    when the retries are exhausted. Boxes certifying the same point are
    merged (radius twice the resolution).
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    last_exc = None
    for attempt in range(cfg.boundary_retries + 1):
        run_audit = audit if audit is not None else IsolationAudit()
        reg = _jittered(region, attempt, cfg)
        try:
            boxes = _isolate_once(F, reg, resolution, cfg, run_audit, lift_offset)
            return _merge_clusters(boxes, cfg.merge_radius_factor * resolution, F, cfg)
        except _BoundaryHit as exc:
            last_exc = exc
            continue
    raise BoundaryFixedPoint(
        f"fixed point kept hitting subdivision boundaries after "
        f"{cfg.boundary_retries + 1} attempts") from last_exc


def polish_fixed_point(F, box: CertifiedFixedBox, cfg: Tolerances = DEFAULT,
                       tol: float = 1e-12) -> np.ndarray:
    """Refine the certified point to high accuracy.

    Newton with finite-difference Jacobian, verified afterwards; falls back
    to greedy subdivision when Newton leaves the box neighborhood. The
    certification never relies on this step.
    """
    x0, x1, y0, y1 = box.box
    p = np.array(box.center, dtype=float)
    size = box.size
    h = max(1e-9, 1e-3 * size)
    ok = False
    for _ in range(40):
        g = _displacement(F, p)
        if np.hypot(*g) < tol:
            ok = True
            break
        e1 = np.array([h, 0.0])
        e2 = np.array([0.0, h])
        jac = np.column_stack([
            (_displacement(F, p + e1) - _displacement(F, p - e1)) / (2 * h),
            (_displacement(F, p + e2) - _displacement(F, p - e2)) / (2 * h),
        ])
        try:
            step = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError:
            break
        p = p + step
        if not (x0 - 3 * size <= p[0] <= x1 + 3 * size
                and y0 - 3 * size <= p[1] <= y1 + 3 * size):
            break
    if not ok:
        # greedy descent: follow the child with the smallest displacement
        b = list(box.box)
        for _ in range(50):
            xm, ym = 0.5 * (b[0] + b[1]), 0.5 * (b[2] + b[3])
            children = [(b[0], xm, b[2], ym), (xm, b[1], b[2], ym),
                        (b[0], xm, ym, b[3]), (xm, b[1], ym, b[3])]
            mins = []
            for c in children:
                _, sampled = _exclusion_margin(F, c, cfg)
                mins.append(sampled)
            b = list(children[int(np.argmin(mins))])
        p = np.array([0.5 * (b[0] + b[1]), 0.5 * (b[2] + b[3])])
    g = _displacement(F, p)
    if np.hypot(*g) > 1e-9:
        raise ToolkitError(f"could not polish fixed point in box {box.box}")
    return p


def nielsen_residue(F0: LiftMap, point, period: int, cfg: Tolerances = DEFAULT,
                    lift_x_offset: int = 0) -> int:
    """Deck-translation residue classifying the Nielsen class of a periodic point.

    Lifts the annulus point, applies the iterated base lift, and reads off
    the integer translation m with F0^n(p') = p' + (m, 0); the class is
    m mod |d^n - 1|, independent of the chosen lift.
    """
    p = point if isinstance(point, AnnulusPoint) else AnnulusPoint(point[0], point[1])
    period = int(period)
    if period < 1:
        raise ValueError("period must be >= 1")
    modulus = abs(F0.degree ** period - 1)
    if modulus == 0:
        raise ParamOutOfRange(
            f"degree {F0.degree} has no residue classes at period {period}")
    p_lift = p.lift(lift_x_offset)
    q = iterate(F0, period)(p_lift) if period > 1 else F0(p_lift)
    dist = annulus_distance(project(q), p)
    if dist > cfg.residue_disp_tol:
        raise NotPeriodic(
            f"point ({p.theta:.6g}, {p.y:.6g}) moves by {dist:.3e} under the "
            f"projected period-{period} map")
    m_real = float(q[0] - p_lift[0])
    m = int(round(m_real))
    if abs(m_real - m) > cfg.residue_int_tol or abs(q[1] - p_lift[1]) > cfg.residue_int_tol:
        raise NonIntegerTranslation(
            f"lift displacement ({m_real:.3e}, {float(q[1] - p_lift[1]):.3e}) "
            f"is not an integer translation")
    return m % modulus


# -- completeness sweeps --------------------------------------------------------

@dataclass(frozen=True)
class NielsenReport:
    """Per-period census of realized Nielsen residues and certified boxes."""

    period: int
    modulus: int
    realized_residues: frozenset
    fixed_boxes: tuple
    box_residues: tuple
    complete: bool
    count_lower_bound: int
    errors: dict = field(default_factory=dict)            # lift offset -> message
    continuum_offsets: tuple = ()                         # offsets with 1D fixed sets

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "modulus": self.modulus,
            "realized_residues": sorted(self.realized_residues),
            "complete": self.complete,
            "count_lower_bound": self.count_lower_bound,
            "continuum_offsets": sorted(self.continuum_offsets),
            "errors": {str(k): v for k, v in sorted(self.errors.items())},
            "boxes": [
                {"lift_offset": b.lift_offset, "box": list(b.box),
                 "boundary_degree": b.boundary_degree, "residue": r}
                for b, r in zip(self.fixed_boxes, self.box_residues)
            ],
        }


def reports_to_json(reports, indent: int = 2) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=indent, sort_keys=True)


def boxes_to_csv_rows(reports) -> list[str]:
    """CSV rows (n, k, x_lo, x_hi, y_lo, y_hi, degree, residue)."""
    rows = ["n,k,x_lo,x_hi,y_lo,y_hi,degree,residue"]
    for r in reports:
        for b, res in zip(r.fixed_boxes, r.box_residues):
            x0, x1, y0, y1 = b.box
            rows.append(f"{r.period},{b.lift_offset},{x0!r},{x1!r},{y0!r},{y1!r},"
                        f"{b.boundary_degree},{res}")
    return rows


def default_region(F: LiftMap, n_max: int) -> tuple[float, float, float, float]:
    """Sweep window: wide enough in x for every deck translate's fixed points
    of the shipped families, y clipped to the map's invariant strip."""
    span = n_max * abs(F.degree) + 2.0
    return (-span, span, F.y_window[0], F.y_window[1])


def region_margin_check(F, region, samples: int = 64) -> bool:
    """Heuristic guard that no fixed points were cut off: the displacement is
    nonvanishing on the region boundary and its x-component keeps a single
    sign on each vertical edge, with opposite signs on the two edges. Exact
    for maps whose x-displacement is monotone in x (all shipped families)."""
    x0, x1, y0, y1 = map(float, region)
    boundary = rectangle(x0, x1, y0, y1, per_side=samples)
    if np.hypot(*_displacement(F, boundary.samples).T).min() <= 0.0:
        return False
    ys = np.linspace(y0, y1, samples)
    left = _displacement(F, np.stack([np.full(samples, x0), ys], axis=-1))[:, 0]
    right = _displacement(F, np.stack([np.full(samples, x1), ys], axis=-1))[:, 0]
    left_sign = np.sign(left)
    right_sign = np.sign(right)
    return bool(np.all(left_sign == left_sign[0]) and left_sign[0] != 0
                and np.all(right_sign == right_sign[0]) and right_sign[0] != 0
                and left_sign[0] != right_sign[0])


def diagnose_continuum(F, region, resolution: float, cfg: Tolerances = DEFAULT) -> bool:
    """After isolation fails on boundary hits: does the zero set of F - id
    look one-dimensional? Probes a small circle around a polished zero; a
    1D zero set crosses the circle, an isolated point keeps it clear."""
    x0, x1, y0, y1 = map(float, region)
    m = 160
    xs = np.linspace(x0, x1, m)
    ys = np.linspace(y0, y1, m)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=-1)
    norms = np.hypot(*_displacement(F, pts).T)
    p = pts[int(np.argmin(norms))]
    # local descent to land on the zero set
    step = max((x1 - x0), (y1 - y0)) / m
    for _ in range(60):
        trial = p + step * np.array([[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1],
                                     [1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)
        vals = np.hypot(*_displacement(F, trial).T)
        i = int(np.argmin(vals))
        p = trial[i]
        if i == 0:
            step *= 0.5
        if step < 1e-12:
            break
    if np.hypot(*_displacement(F, p)) > 1e-6:
        return False
    ang = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    ring = p + 4.0 * resolution * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    vals = np.hypot(*_displacement(F, ring).T)
    return bool(vals.min() < 0.05 * np.median(vals))


def _sweep_translate(F_base: LiftMap, F_iter: LiftMap, n: int, k: int, region,
                     resolution: float, cfg: Tolerances):
    """Isolate and classify the fixed points of one deck translate."""
    Fk = deck_translate(F_iter, k)
    try:
        boxes = isolate_fixed_points(Fk, region, resolution, cfg=cfg, lift_offset=k)
    except BoundaryFixedPoint as exc:
        if diagnose_continuum(Fk, region, resolution, cfg=cfg):
            return k, CONTINUUM, None
        return k, "error", f"{type(exc).__name__}: {exc}"
    except (BudgetExceeded, ToolkitError) as exc:
        return k, "error", f"{type(exc).__name__}: {exc}"
    records = []
    for b in boxes:
        point = polish_fixed_point(Fk, b, cfg=cfg)
        residue = nielsen_residue(F_base, project(point), n, cfg=cfg)
        records.append((b, residue))
    return k, "ok", records


def completeness_check(F: LiftMap, n_max: int, region=None, resolution: float = 1e-3,
                       cfg: Tolerances = DEFAULT, workers: Optional[int] = None
                       ) -> list[NielsenReport]:
    """For each period n <= n_max, sweep every deck translate F^n + (k, 0),
    certify its fixed points, classify them by residue, and report whether
    all |d^n - 1| residue classes are realized.

    Isolation failures are recorded per translate in the report instead of
    aborting the sweep; translates whose fixed set looks one-dimensional
    are flagged as a single-class continuum and count once.
    """
    n_max = int(n_max)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if abs(F.degree) <= 1:
        raise ParamOutOfRange("completeness sweeps need |degree| > 1")
    if region is None:
        region = default_region(F, n_max)
        if not region_margin_check(F, region):
            raise ToolkitError(
                "the default sweep region failed its margin test for this map; "
                "pass an explicit region")
    nworkers = worker_count(workers)

    reports = []
    for n in range(1, n_max + 1):
        modulus = abs(F.degree ** n - 1)
        F_iter = iterate(F, n)
        tasks = list(range(modulus))

        def run(k, _n=n, _Fi=F_iter):
            return _sweep_translate(F, _Fi, _n, k, region, resolution, cfg)

        if nworkers > 1:
            with ThreadPoolExecutor(max_workers=nworkers) as pool:
                results = list(pool.map(run, tasks))
        else:
            results = [run(k) for k in tasks]
        results.sort(key=lambda item: item[0])

        realized = set()
        boxes = []
        residues = []
        errors = {}
        continuum = []
        count = 0
        for k, status, payload in results:
            if status == CONTINUUM:
                continuum.append(k)
                realized.add((-k) % modulus)  # forced by the translation identity
                count += 1
            elif status == "error":
                errors[k] = payload
            else:
                for b, res in payload:
                    boxes.append(b)
                    residues.append(res)
                    realized.add(res)
                count += sum(1 for _ in payload)
        reports.append(NielsenReport(
            period=n, modulus=modulus, realized_residues=frozenset(realized),
            fixed_boxes=tuple(boxes), box_residues=tuple(residues),
            complete=(realized == set(range(modulus))),
            count_lower_bound=count, errors=errors,
            continuum_offsets=tuple(continuum)))
    return reports


def growth_rate(reports) -> float:
    """max over n of ln(count_lower_bound)/n; compare against ln|d|."""
    if not reports:
        raise EmptyReport("no reports to take a growth rate from")
    rates = [np.log(r.count_lower_bound) / r.period
             for r in reports if r.count_lower_bound >= 1]
    return float(max(rates)) if rates else float("-inf")
