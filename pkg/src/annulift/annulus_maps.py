"""Annulus self-maps represented by lifts to the universal cover.

Convention, fixed once and used everywhere: the cover is the (x, y) plane,
the covering map sends (x, y) to the plane point of angle 2*pi*x and radius
exp(-2*pi*y). So y -> +inf is the end at the origin and y -> -inf the end at
infinity. A lift of a degree-d map satisfies F(x+1, y) = F(x, y) + (d, 0).
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .config import DEFAULT, Tolerances
from .curves import _as_point
from .errors import (
    DomainEscape,
    EquivarianceViolation,
    ParamOutOfRange,
    UnknownZooEntry,
)

TWO_PI = 2.0 * np.pi

_DATA_DIR = Path(__file__).parent / "data"


@dataclass(frozen=True)
class AnnulusPoint:
    """Point of the annulus: angle theta in [0, 1), cover height y."""

    theta: float
    y: float

    def __post_init__(self):
        th = float(np.mod(self.theta, 1.0))
        if th >= 1.0:  # np.mod(-tiny, 1.0) can round up to exactly 1.0
            th = 0.0
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "y", float(self.y))

    def lift(self, j: int = 0) -> np.ndarray:
        """The cover point (theta + j, y)."""
        return np.array([self.theta + j, self.y], dtype=float)

    @property
    def radius(self) -> float:
        return float(np.exp(-TWO_PI * self.y))


def project(p) -> AnnulusPoint:
    """Quotient a cover point by the deck translation (x, y) -> (x+1, y)."""
    arr = _as_point(p)
    return AnnulusPoint(arr[0], arr[1])


def annulus_distance(a: AnnulusPoint, b: AnnulusPoint) -> float:
    dt = abs(a.theta - b.theta)
    return float(np.hypot(min(dt, 1.0 - dt), a.y - b.y))


@dataclass(frozen=True)
class LiftMap:
    """A lift F of an annulus map, with its degree.

    ``fn`` is vectorized: it maps an (..., 2) array of cover points to their
    images. ``domain_strip``, when set, is the y-range outside which the map
    is undefined; evaluation outside raises DomainEscape.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    degree: int
    domain_strip: Optional[tuple[float, float]] = None
    name: str = ""
    params: dict = field(default_factory=dict, compare=False)
    y_window: tuple[float, float] = (-2.0, 2.0)  # default sweep window for fixed points

    def __call__(self, pts) -> np.ndarray:
        arr = np.asarray(pts, dtype=float)
        if self.domain_strip is not None:
            y = arr[..., 1]
            lo, hi = self.domain_strip
            if np.any(y < lo) or np.any(y > hi):
                raise DomainEscape(
                    f"evaluation outside domain strip [{lo}, {hi}] for {self.name or 'lift'}")
        return np.asarray(self.fn(arr), dtype=float)


def make_lift(fn, degree: int, domain_strip=None, name: str = "", params=None,
              y_window=(-2.0, 2.0), cfg: Tolerances = DEFAULT) -> LiftMap:
    """Construct a LiftMap and spot-check deck equivariance on a small grid."""
    lift = LiftMap(fn=fn, degree=int(degree), domain_strip=domain_strip, name=name,
                   params=dict(params or {}), y_window=tuple(y_window))
    ylo, yhi = lift.y_window
    if domain_strip is not None:
        ylo = max(ylo, domain_strip[0])
        yhi = min(yhi, domain_strip[1] - 1e-9)
    spec = GridSpec(nx=4, ny=4, x_range=(0.0, 1.0), y_range=(ylo, yhi))
    _equivariance_defect(lift, spec, cfg, require_degree=int(degree))
    return lift


@dataclass(frozen=True)
class GridSpec:
    """Sample grid for equivariance checks."""

    nx: int = 8
    ny: int = 8
    x_range: tuple[float, float] = (0.0, 1.0)
    y_range: tuple[float, float] = (-1.0, 1.0)

    def points(self) -> np.ndarray:
        xs = np.linspace(self.x_range[0], self.x_range[1], self.nx)
        ys = np.linspace(self.y_range[0], self.y_range[1], self.ny)
        gx, gy = np.meshgrid(xs, ys)
        return np.stack([gx.ravel(), gy.ravel()], axis=-1)


def _equivariance_defect(F: LiftMap, grid: GridSpec, cfg: Tolerances,
                         require_degree: Optional[int] = None) -> int:
    pts = grid.points()
    diff = F(pts + np.array([1.0, 0.0])) - F(pts)
    d_est = int(np.round(np.median(diff[:, 0])))
    defect = np.maximum(np.abs(diff[:, 0] - d_est), np.abs(diff[:, 1]))
    worst = int(np.argmax(defect))
    if defect[worst] > cfg.equivariance_tol:
        raise EquivarianceViolation(
            f"deck equivariance defect {defect[worst]:.3e} at grid point "
            f"({pts[worst, 0]:.4f}, {pts[worst, 1]:.4f})",
            point=tuple(pts[worst]), defect=float(defect[worst]))
    if require_degree is not None and d_est != require_degree:
        raise EquivarianceViolation(
            f"declared degree {require_degree} but observed {d_est}",
            point=tuple(pts[worst]), defect=float(d_est - require_degree))
    return d_est


def degree_check(F: LiftMap, grid: Optional[GridSpec] = None,
                 cfg: Tolerances = DEFAULT) -> int:
    """Verify F(x+1, y) = F(x, y) + (d, 0) on a grid and return d.

    Raises EquivarianceViolation (with the worst offending grid point) when
    the offset second coordinate is nonzero, the first coordinate is not a
    constant integer, or the constant disagrees with the declared degree.
    """
    if grid is None:
        ylo, yhi = -1.0, 1.0
        if F.domain_strip is not None:
            ylo = max(ylo, F.domain_strip[0])
            yhi = min(yhi, F.domain_strip[1] - 1e-9)
        grid = GridSpec(y_range=(ylo, yhi))
    return _equivariance_defect(F, grid, cfg, require_degree=F.degree)


def deck_translate(F: LiftMap, k: int) -> LiftMap:
    """The lift F + (k, 0); same degree, same projected annulus map."""
    k = int(k)
    if k == 0:
        return F
    offset = np.array([float(k), 0.0])
    return LiftMap(fn=lambda pts, _f=F.fn: np.asarray(_f(pts), dtype=float) + offset,
                   degree=F.degree, domain_strip=F.domain_strip,
                   name=f"{F.name}+({k},0)" if F.name else f"translate({k})",
                   params=F.params, y_window=F.y_window)


def iterate(F: LiftMap, n: int) -> LiftMap:
    """n-fold composition, degree F.degree**n.

    Domain containment is checked lazily: if an intermediate image leaves
    the domain strip, evaluation raises DomainEscape.
    """
    n = int(n)
    if n < 1:
        raise ValueError("iterate needs n >= 1")
    if n == 1:
        return F
    strip = F.domain_strip

    def fn(pts):
        out = np.asarray(pts, dtype=float)
        for _ in range(n):
            if strip is not None:
                y = out[..., 1]
                if np.any(y < strip[0]) or np.any(y > strip[1]):
                    raise DomainEscape("iterate left the domain strip")
            out = np.asarray(F.fn(out), dtype=float)
        return out

    return LiftMap(fn=fn, degree=F.degree ** n, domain_strip=strip,
                   name=f"{F.name}^{n}" if F.name else f"iterate({n})",
                   params=F.params, y_window=F.y_window)


def projected_plane_map(F: LiftMap) -> Callable[[np.ndarray], np.ndarray]:
    """The induced self-map of the punctured plane, for index computations.

    Well defined because any two lifts of the angle differ by an integer and
    F is equivariant.
    """

    def fn(pts):
        pts = np.asarray(pts, dtype=float)
        r = np.hypot(pts[..., 0], pts[..., 1])
        if np.any(r == 0.0):
            raise ValueError("plane map is undefined at the origin")
        x = np.arctan2(pts[..., 1], pts[..., 0]) / TWO_PI
        y = -np.log(r) / TWO_PI
        img = F(np.stack([x, y], axis=-1))
        rad = np.exp(-TWO_PI * img[..., 1])
        ang = TWO_PI * img[..., 0]
        return np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=-1)

    return fn


# -- built-in map zoo ----------------------------------------------------------

PERTURBATION_MAX = 1.0 / (4.0 * np.pi)  # keeps the angular coordinate monotone


def _int_param(value, name: str) -> int:
    iv = int(round(float(value)))
    if iv != float(value):
        raise ParamOutOfRange(f"{name} must be an integer, got {value!r}")
    return iv


def _power(d: int) -> LiftMap:
    d = _int_param(d, "d")
    if d == 0:
        raise ParamOutOfRange("power map needs d != 0")
    return make_lift(lambda pts: float(d) * np.asarray(pts, dtype=float), d,
                     name=f"power({d})", params={"d": d})


def _smooth_bump(y: np.ndarray) -> np.ndarray:
    """Odd, smooth, supported in |y| < 1, vanishing at 0; |bump| < 0.37."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    inside = np.abs(y) < 1.0
    yi = y[inside]
    out[inside] = yi * np.exp(1.0 - 1.0 / (1.0 - yi * yi))
    return out


def _perturbed_power(d: int, eps: float) -> LiftMap:
    d = _int_param(d, "d")
    if d == 0:
        raise ParamOutOfRange("perturbed power map needs d != 0")
    eps = float(eps)
    if abs(eps) >= PERTURBATION_MAX:
        raise ParamOutOfRange(
            f"|eps| must stay below 1/(4*pi) ~ {PERTURBATION_MAX:.6f}, got {eps}")

    def fn(pts):
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        return np.stack(
            [d * x + eps * np.sin(TWO_PI * x) * _smooth_bump(y), d * y], axis=-1)

    return make_lift(fn, d, name=f"perturbed_power({d},{eps})",
                     params={"d": d, "eps": eps})


def _ends_lift(d: int, lam: float, attracting: bool) -> LiftMap:
    d = _int_param(d, "d")
    if d == 0:
        raise ParamOutOfRange("ends maps need d != 0")
    lam = float(lam)
    if not (0.0 < lam <= 1.0):
        raise ParamOutOfRange(f"lambda must lie in (0, 1], got {lam}")
    sign = 1.0 if attracting else -1.0

    def fn(pts):
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        return np.stack([d * x, y + sign * lam * y / (1.0 + y * y)], axis=-1)

    kind = "ends_attracting" if attracting else "ends_repelling"
    return make_lift(fn, d, name=f"{kind}({d},{lam})", params={"d": d, "lam": lam})


def _end_swap(d: int) -> LiftMap:
    d = _int_param(d, "d")
    if d == 0:
        raise ParamOutOfRange("end swap map needs d != 0")

    def fn(pts):
        pts = np.asarray(pts, dtype=float)
        return np.stack([d * pts[..., 0], -pts[..., 1]], axis=-1)

    return make_lift(fn, d, name=f"end_swap({d})", params={"d": d})


ZOO_SCHEMAS = {
    "power": {
        "params": {"d": "nonzero integer degree"},
        "about": "linear lift (d*x, d*y); the model map with |d-1| fixed annulus points",
    },
    "perturbed_power": {
        "params": {"d": "nonzero integer degree",
                   "eps": "float, |eps| < 1/(4*pi)"},
        "about": "power map plus a compactly supported angular wobble; the circle y=0 "
                 "stays invariant with unchanged circle dynamics",
    },
    "ends_attracting": {
        "params": {"d": "nonzero integer degree", "lam": "float in (0, 1]"},
        "about": "(d*x, y + lam*y/(1+y^2)); both ends attract, y=0 invariant",
    },
    "ends_repelling": {
        "params": {"d": "nonzero integer degree", "lam": "float in (0, 1]"},
        "about": "(d*x, y - lam*y/(1+y^2)); both ends repel, y=0 invariant",
    },
    "end_swap": {
        "params": {"d": "nonzero integer degree (d < 0 intended)"},
        "about": "(d*x, -y); interchanges the two ends of the annulus",
    },
    "counterexample_deg_minus1": {
        "params": {},
        "about": "degree -1 tabulated lift that is fixed point free on its invariant "
                 "curve set; built from the shipped geometry data file",
    },
}


def zoo(name: str, **params) -> LiftMap:
    """Construct a built-in lift by name. See ZOO_SCHEMAS for parameters."""
    builders = {
        "power": _power,
        "perturbed_power": _perturbed_power,
        "ends_attracting": lambda d, lam: _ends_lift(d, lam, True),
        "ends_repelling": lambda d, lam: _ends_lift(d, lam, False),
        "end_swap": _end_swap,
        "counterexample_deg_minus1": counterexample_deg_minus1,
    }
    if name not in builders:
        raise UnknownZooEntry(f"unknown map family {name!r}; known: {sorted(builders)}")
    try:
        return builders[name](**params)
    except TypeError as exc:
        raise ParamOutOfRange(f"bad parameters for {name}: {exc}") from exc


# -- tabulated lifts (bilinear grids) ------------------------------------------

def grid_lift_from_values(values: np.ndarray, degree: int, x0: float,
                          y0: float, y1: float, name: str = "grid_lift",
                          y_window=None) -> LiftMap:
    """Lift from F-values on a regular grid over one fundamental domain.

    ``values`` has shape (ny, nx, 2): columns at x = x0 + i/nx for
    i = 0..nx-1 (the wrap column is synthesized from column 0 by
    equivariance, which makes the extension exact), rows at ny evenly spaced
    y levels on [y0, y1]. Evaluation clamps y outside [y0, y1].
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 3 or values.shape[2] != 2 or values.shape[0] < 2 or values.shape[1] < 2:
        raise ValueError("values must have shape (ny >= 2, nx >= 2, 2)")
    degree = int(degree)
    ny, nx, _ = values.shape
    ext = np.concatenate([values, values[:, :1] + np.array([float(degree), 0.0])], axis=1)
    step_x = 1.0 / nx
    step_y = (y1 - y0) / (ny - 1)

    def fn(pts):
        pts = np.asarray(pts, dtype=float)
        x = pts[..., 0]
        y = np.clip(pts[..., 1], y0, y1)
        k = np.floor(x - x0)
        gx = (x - x0 - k) / step_x
        ix = np.clip(np.floor(gx).astype(int), 0, nx - 1)
        ux = (gx - ix)[..., None]
        gy = (y - y0) / step_y
        iy = np.clip(np.floor(gy).astype(int), 0, ny - 2)
        uy = (gy - iy)[..., None]
        row0 = (1.0 - ux) * ext[iy, ix] + ux * ext[iy, ix + 1]
        row1 = (1.0 - ux) * ext[iy + 1, ix] + ux * ext[iy + 1, ix + 1]
        out = (1.0 - uy) * row0 + uy * row1
        out[..., 0] += float(degree) * k
        return out

    return make_lift(fn, degree, name=name,
                     y_window=tuple(y_window) if y_window else (y0, y1))


def load_grid_lift(path: str | Path) -> LiftMap:
    """Load a tabulated lift: JSON header plus inline, CSV, or raw binary values.

    Header keys: degree, x0, nx, y0, y1, ny and ``values`` (nested list), or
    ``values_file`` + ``format`` ("csv": nx*ny lines of "fx,fy" row-major;
    "binary": little-endian float64, C order, shape (ny, nx, 2)).
    """
    path = Path(path)
    header = json.loads(path.read_text(encoding="utf-8"))
    ny, nx = int(header["ny"]), int(header["nx"])
    if "values" in header:
        values = np.asarray(header["values"], dtype=float).reshape(ny, nx, 2)
    else:
        data_path = path.parent / header["values_file"]
        fmt = header.get("format", "csv")
        if fmt == "csv":
            values = np.loadtxt(data_path, delimiter=",", dtype=float).reshape(ny, nx, 2)
        elif fmt == "binary":
            values = np.fromfile(data_path, dtype="<f8").reshape(ny, nx, 2)
        else:
            raise ValueError(f"unknown grid format {fmt!r}")
    return grid_lift_from_values(values, header["degree"], float(header["x0"]),
                                 float(header["y0"]), float(header["y1"]),
                                 name=header.get("name", path.stem))


def write_grid_lift(path: str | Path, values: np.ndarray, degree: int, x0: float,
                    y0: float, y1: float, fmt: str = "inline", name: str = "") -> None:
    """Write the tabulated-lift interchange format (inverse of load_grid_lift)."""
    path = Path(path)
    values = np.asarray(values, dtype=float)
    ny, nx, _ = values.shape
    header = {"degree": int(degree), "x0": x0, "nx": nx, "y0": y0, "y1": y1, "ny": ny}
    if name:
        header["name"] = name
    if fmt == "inline":
        header["values"] = values.reshape(-1, 2).tolist()
    elif fmt == "csv":
        header["values_file"] = path.stem + ".csv"
        header["format"] = "csv"
        np.savetxt(path.parent / header["values_file"], values.reshape(-1, 2),
                   delimiter=",", fmt="%.17g")
    elif fmt == "binary":
        header["values_file"] = path.stem + ".bin"
        header["format"] = "binary"
        values.astype("<f8").tofile(path.parent / header["values_file"])
    else:
        raise ValueError(f"unknown grid format {fmt!r}")
    path.write_text(json.dumps(header), encoding="utf-8")


# -- the shipped degree -1 example ---------------------------------------------

@functools.lru_cache(maxsize=1)
def _counterexample_geometry() -> dict:
    with open(_DATA_DIR / "counterexample_geometry.json", "r", encoding="utf-8") as fh:
        return json.load(fh)


def _spine_interp(geo: dict):
    verts = np.asarray(geo["curve_vertices"], dtype=float)
    tv, px, py = verts[:, 0], verts[:, 1], verts[:, 2]

    def spine(t):
        """The 1-periodic-in-shape invariant curve J: parameter -> cover point."""
        t = np.asarray(t, dtype=float)
        k = np.floor(t)
        tf = t - k
        x = np.interp(tf, tv, px) + k
        y = np.interp(tf, tv, py)
        return np.stack([x, y], axis=-1)

    return spine, verts


def _param_map(geo: dict):
    pieces = geo["param_map"]["segments"]
    t1s = np.asarray([p["t1"] for p in pieces], dtype=float)
    t0s = np.asarray([p["t0"] for p in pieces], dtype=float)
    g0s = np.asarray([p["g0"] for p in pieces], dtype=float)
    g1s = np.asarray([p["g1"] for p in pieces], dtype=float)

    def gmap(t):
        """Equivariant parameter map: gmap(t + 1) = gmap(t) - 1. The jump of
        the fractional part lands exactly on the glued parameter pair."""
        t = np.asarray(t, dtype=float)
        k = np.floor(t)
        tf = t - k
        idx = np.searchsorted(t1s, tf, side="left")
        idx = np.clip(idx, 0, len(t1s) - 1)
        span = t1s[idx] - t0s[idx]
        g = g0s[idx] + (tf - t0s[idx]) * (g1s[idx] - g0s[idx]) / span
        return g - k

    return gmap


def counterexample_spine_segments(translates=(-1, 0, 1)):
    """Segments (a, b, t_a, t_b) of the invariant set for the given deck copies."""
    geo = _counterexample_geometry()
    verts = np.asarray(geo["curve_vertices"], dtype=float)
    segs = []
    for c in translates:
        for i in range(len(verts) - 1):
            t0, x0, y0 = verts[i]
            t1, x1, y1 = verts[i + 1]
            segs.append((np.array([x0 + c, y0]), np.array([x1 + c, y1]), t0 + c, t1 + c))
    return segs


def counterexample_spine(t) -> np.ndarray:
    geo = _counterexample_geometry()
    spine, _ = _spine_interp(geo)
    return spine(t)


def counterexample_restriction(t) -> np.ndarray:
    """The map's exact values on the invariant curve, as spine(gmap(t))."""
    geo = _counterexample_geometry()
    spine, _ = _spine_interp(geo)
    gmap = _param_map(geo)
    return spine(gmap(t))


def counterexample_tube_cover(rho: float = 0.015, step: float = 0.08,
                              translates=(-1, 0, 1)) -> list[tuple[float, float, float, float]]:
    """Axis-aligned boxes covering the radius-rho tube around the invariant
    set: each spine segment is cut into pieces of length <= step and each
    piece's bounding box is inflated by rho, so no cover box strays farther
    than rho plus half a piece from the set."""
    boxes = []
    for a, b, _, _ in counterexample_spine_segments(translates):
        length = float(np.hypot(*(b - a)))
        pieces = max(1, int(np.ceil(length / step)))
        for i in range(pieces):
            p = a + (b - a) * (i / pieces)
            q = a + (b - a) * ((i + 1) / pieces)
            x0, x1 = sorted((p[0], q[0]))
            y0, y1 = sorted((p[1], q[1]))
            boxes.append((x0 - rho, x1 + rho, y0 - rho, y1 + rho))
    return boxes


def counterexample_spine_distance(points) -> np.ndarray:
    """Distance from each point to the invariant set (three deck copies)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d, _ = _nearest_on_spine(pts, counterexample_spine_segments((-1, 0, 1)))
    return d


def _nearest_on_spine(points: np.ndarray, segs) -> tuple[np.ndarray, np.ndarray]:
    """Distance to the invariant set and parameter of the nearest point."""
    a = np.stack([s[0] for s in segs])
    b = np.stack([s[1] for s in segs])
    ta = np.asarray([s[2] for s in segs])
    tb = np.asarray([s[3] for s in segs])
    ab = b - a
    ab2 = np.einsum("ij,ij->i", ab, ab)
    best_d = np.full(len(points), np.inf)
    best_t = np.zeros(len(points))
    chunk = 20_000
    for lo in range(0, len(points), chunk):
        p = points[lo:lo + chunk]
        ap = p[:, None, :] - a[None, :, :]
        u = np.clip(np.einsum("nmj,mj->nm", ap, ab) / ab2, 0.0, 1.0)
        foot = a[None] + u[..., None] * ab[None]
        d = np.hypot(foot[..., 0] - p[:, None, 0], foot[..., 1] - p[:, None, 1])
        j = np.argmin(d, axis=1)
        rows = np.arange(len(p))
        best_d[lo:lo + chunk] = d[rows, j]
        best_t[lo:lo + chunk] = ta[j] + u[rows, j] * (tb[j] - ta[j])
    return best_d, best_t


@functools.lru_cache(maxsize=1)
def counterexample_deg_minus1() -> LiftMap:
    """Degree -1 lift with an invariant essential curve carrying a small loop,
    fixed point free on that curve.

    The geometry is an explicit coordinate list shipped in the package data:
    a closed loop glued to the essential circle at one point lets the
    parameter map jump across the diagonal exactly at the glued pair, so no
    point of the curve is fixed even though every continuous degree -1
    circle map would have fixed points. Off the curve the map blends into a
    fixed-point-free background; the values are tabulated on a grid and
    extended by bilinear interpolation and equivariance, so the shipped map
    is continuous regardless of the blending seams.
    """
    geo = _counterexample_geometry()
    spine, _ = _spine_interp(geo)
    gmap = _param_map(geo)
    segs = counterexample_spine_segments()
    bg = geo["background"]
    inner, outer = geo["blend"]["inner"], geo["blend"]["outer"]
    nx = int(geo["grid"]["nx"])
    y0, y1, ny = float(geo["grid"]["y0"]), float(geo["grid"]["y1"]), int(geo["grid"]["ny"])

    xs = np.arange(nx, dtype=float) / nx
    ys = np.linspace(y0, y1, ny)
    gx, gy = np.meshgrid(xs, ys)
    nodes = np.stack([gx.ravel(), gy.ravel()], axis=-1)

    dist, t_near = _nearest_on_spine(nodes, segs)
    on_curve = spine(gmap(t_near))
    background = np.stack([bg["cx"] - nodes[:, 0], nodes[:, 1] + bg["dy"]], axis=-1)
    w = np.clip((outer - dist) / (outer - inner), 0.0, 1.0)[:, None]
    values = (w * on_curve + (1.0 - w) * background).reshape(ny, nx, 2)

    return grid_lift_from_values(values, degree=-1, x0=0.0, y0=y0, y1=y1,
                                 name="counterexample_deg_minus1",
                                 y_window=(y0, y1))
