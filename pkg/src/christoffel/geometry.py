"""Domain catalogue: membership, boxes, volumes, sections, special maps.

Catalogue shapes are immutable value objects with exact closed-form
membership tests.  Composite domains (products, affine images, unions of
simplices) propagate the predicates.  The JSON schema used by the CLI is
implemented by ``domain_from_dict`` / ``Domain.to_dict``; row-major matrix
order is normative.
"""
import json
from dataclasses import dataclass, field
from math import comb, cos, gamma, inf, pi, sin, sqrt

import numpy as np
from scipy.stats import qmc

from .errors import DimensionMismatch, DomainFormatError, SingularMapError

_MEMBERSHIP_TOL = 1e-12


# ---------------------------------------------------------------------------
# affine maps


@dataclass(frozen=True)
class AffineMap:
    """Non-degenerate map x -> offset + matrix @ x."""

    matrix: np.ndarray = field(repr=False)
    offset: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        b = np.asarray(self.offset, dtype=float).ravel()
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] != b.size:
            raise DimensionMismatch("matrix must be d x d and offset length d")
        det = float(np.linalg.det(a))
        if det == 0.0 or not np.isfinite(det):
            raise SingularMapError("affine map must be non-degenerate")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "offset", b)
        object.__setattr__(self, "_det", det)

    @property
    def dim(self):
        return self.offset.size

    @property
    def determinant(self):
        return self._det

    def __call__(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = pts @ self.matrix.T + self.offset
        return out[0] if np.asarray(points).ndim == 1 else out

    def compose(self, other):
        """self after other: x -> self(other(x))."""
        return AffineMap(self.matrix @ other.matrix, self.offset + self.matrix @ other.offset)

    def inverse(self):
        inv = np.linalg.inv(self.matrix)
        return AffineMap(inv, -inv @ self.offset)

    @staticmethod
    def identity(dim):
        return AffineMap(np.eye(dim), np.zeros(dim))

    @staticmethod
    def scaling(factors, offset=None):
        factors = np.atleast_1d(np.asarray(factors, dtype=float))
        off = np.zeros(factors.size) if offset is None else np.asarray(offset, float)
        return AffineMap(np.diag(factors), off)

    def to_dict(self):
        return {"A": [list(map(float, row)) for row in self.matrix],
                "b": [float(v) for v in self.offset]}


# ---------------------------------------------------------------------------
# boundary charts


@dataclass(frozen=True)
class Chart:
    """Parametrized boundary patch: fn maps (M, k) params into R^d."""

    bounds: np.ndarray  # (k, 2)
    fn: callable

    @property
    def ndim(self):
        return self.bounds.shape[0]


def _chart(bounds, fn):
    return Chart(np.asarray(bounds, dtype=float).reshape(-1, 2), fn)


# ---------------------------------------------------------------------------
# domain base


class Domain:
    kind = "abstract"
    convex = True

    @property
    def dim(self):
        raise NotImplementedError

    def contains(self, points, tol=_MEMBERSHIP_TOL):
        """Vectorized closed-set membership; exact inequalities per shape."""
        raise NotImplementedError

    def membership(self, x, tol=_MEMBERSHIP_TOL):
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.dim:
            raise DimensionMismatch(f"point has dim {x.size}, domain has dim {self.dim}")
        return bool(self.contains(x[None, :], tol=tol)[0])

    def bounding_box(self):
        raise NotImplementedError

    def volume(self):
        raise NotImplementedError

    def sharp_candidates(self):
        """Catalogue-specific extreme/sharp boundary points."""
        raise NotImplementedError

    def boundary_samples(self, resolution):
        raise NotImplementedError

    def charts(self):
        return []

    def support_min(self, v):
        """min over the domain of x . v (v need not be unit)."""
        raise NotImplementedError

    def key(self):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def _as_points(arr, dim):
    out = np.atleast_2d(np.asarray(arr, dtype=float))
    if out.shape[1] != dim:
        raise DimensionMismatch(f"points have dim {out.shape[1]}, domain has dim {dim}")
    return out


class Cube(Domain):
    """The cube [-1, 1]^d (p = infinity ball)."""

    kind = "cube"

    def __init__(self, dim):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self._dim = int(dim)

    @property
    def dim(self):
        return self._dim

    def contains(self, points, tol=_MEMBERSHIP_TOL):
        pts = _as_points(points, self._dim)
        return np.max(np.abs(pts), axis=1) <= 1.0 + tol

    def bounding_box(self):
        return np.tile([-1.0, 1.0], (self._dim, 1))

    def volume(self):
        return 2.0**self._dim

    def sharp_candidates(self):
        d = self._dim
        out = np.array([[1.0 if (i >> a) & 1 else -1.0 for a in range(d)] for i in range(2**d)])
        return out

    def boundary_samples(self, resolution):
        d = self._dim
        if d == 1:
            return np.array([[-1.0], [1.0]])
        if d == 2:
            t = np.linspace(-1.0, 1.0, max(resolution // 4, 2))
            sides = [np.column_stack([t, np.full_like(t, s)]) for s in (-1.0, 1.0)]
            sides += [np.column_stack([np.full_like(t, s), t]) for s in (-1.0, 1.0)]
            return np.vstack(sides)
        per_face = max(resolution // (2 * d), 4)
        m = int(np.ceil(per_face ** (1.0 / (d - 1))))
        grid_1d = np.linspace(-1.0, 1.0, m)
        mesh = np.meshgrid(*([grid_1d] * (d - 1)), indexing="ij")
        flat = np.column_stack([g.ravel() for g in mesh])
        faces = []
        for axis in range(d):
            for s in (-1.0, 1.0):
                pts = np.insert(flat, axis, s, axis=1)
                faces.append(pts)
        return np.vstack(faces)

    def charts(self):
        d = self._dim
        charts = []
        if d == 2:
            for axis in range(2):
                for s in (-1.0, 1.0):
                    def fn(t, axis=axis, s=s):
                        t = np.atleast_2d(t)
                        return np.insert(t, axis, s, axis=1)
                    charts.append(_chart([[-1.0, 1.0]], fn))
        elif d == 3:
            for axis in range(3):
                for s in (-1.0, 1.0):
                    def fn(uv, axis=axis, s=s):
                        uv = np.atleast_2d(uv)
                        return np.insert(uv, axis, s, axis=1)
                    charts.append(_chart([[-1.0, 1.0], [-1.0, 1.0]], fn))
        return charts

    def support_min(self, v):
        return -float(np.sum(np.abs(v)))

    def key(self):
        return ("cube", self._dim)

    def to_dict(self):
        return {"type": "cube", "dim": self._dim}


def ball_volume(dim, p):
    """Volume of the unit l_p ball in R^dim (Gamma closed form)."""
    if p == inf:
        return 2.0**dim
    return 2.0**dim * gamma(1.0 + 1.0 / p) ** dim / gamma(1.0 + dim / p)


class BallP(Domain):
    """Unit l_p ball {sum |x_i|^p <= 1}; p = inf aliases the cube test."""

    kind = "ball_p"

    def __init__(self, dim, p):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        p = float(p)
        if not (p > 0):
            raise ValueError("p must be positive (or inf)")
        self._dim = int(dim)
        self.p = p

    @property
    def dim(self):
        return self._dim

    @property
    def convex(self):
        return self.p >= 1.0

    def contains(self, points, tol=_MEMBERSHIP_TOL):
        pts = _as_points(points, self._dim)
        if self.p == inf:
            return np.max(np.abs(pts), axis=1) <= 1.0 + tol
        return np.sum(np.abs(pts) ** self.p, axis=1) <= 1.0 + tol

    def bounding_box(self):
        return np.tile([-1.0, 1.0], (self._dim, 1))

    def volume(self):
        return ball_volume(self._dim, self.p)

    def sharp_candidates(self):
        d = self._dim
        eye = np.eye(d)
        return np.vstack([eye, -eye])

    def _radial(self, dirs):
        if self.p == inf:
            norms = np.max(np.abs(dirs), axis=1)
        else:
            norms = np.sum(np.abs(dirs) ** self.p, axis=1) ** (1.0 / self.p)
        return dirs / norms[:, None]

    def boundary_samples(self, resolution):
        return self._radial(unit_directions(self._dim, resolution))

    def charts(self):
        d = self._dim
        if d == 2:
            def fn(t):
                t = np.atleast_2d(t)[:, 0]
                return self._radial(np.column_stack([np.cos(t), np.sin(t)]))
            return [_chart([[0.0, 2.0 * pi]], fn)]
        if d == 3:
            def fn(ab):
                ab = np.atleast_2d(ab)
                th, ph = ab[:, 0], ab[:, 1]
                dirs = np.column_stack(
                    [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)]
                )
                return self._radial(dirs)
            return [_chart([[1e-9, pi - 1e-9], [0.0, 2.0 * pi]], fn)]
        return []

    def support_min(self, v):
        v = np.asarray(v, dtype=float)
        if self.p == inf:
            return -float(np.sum(np.abs(v)))
        if self.p <= 1.0:
            # for p <= 1 the extreme points are the vertices +-e_i
            return -float(np.max(np.abs(v)))
        q = self.p / (self.p - 1.0)
        return -float(np.sum(np.abs(v) ** q) ** (1.0 / q))

    def key(self):
        return ("ball_p", self._dim, self.p)

    def to_dict(self):
        return {"type": "ball_p", "dim": self._dim, "p": "inf" if self.p == inf else self.p}


class Simplex(Domain):
    """Simplex given by d+1 affinely independent vertices."""

    kind = "simplex"

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] + 1:
            raise ValueError("need d+1 vertices in R^d")
        self.vertices = v
        self.vertices.setflags(write=False)
        self._edge = (v[1:] - v[0]).T  # columns v_i - v_0
        det = float(np.linalg.det(self._edge))
        if det == 0.0:
            raise ValueError("degenerate simplex")
        self._inv_edge = np.linalg.inv(self._edge)
        self._absdet = abs(det)

    @property
    def dim(self):
        return self.vertices.shape[1]

    def barycentric(self, points):
        """Coordinates (lam_1..lam_d) w.r.t. v_0; lam_0 = 1 - sum."""
        pts = _as_points(points, self.dim)
        return (pts - self.vertices[0]) @ self._inv_edge.T

    def contains(self, points, tol=_MEMBERSHIP_TOL):
        lam = self.barycentric(points)
        return (np.min(lam, axis=1) >= -tol) & (np.sum(lam, axis=1) <= 1.0 + tol)

    def bounding_box(self):
        return np.column_stack([self.vertices.min(axis=0), self.vertices.max(axis=0)])

    def volume(self):
        d = self.dim
        return self._absdet / np.prod(range(1, d + 1))

    def sharp_candidates(self):
        return self.vertices.copy()

    def boundary_samples(self, resolution):
        d = self.dim
        out = [self.vertices]
        if d == 2:
            m = max(resolution // 3, 2)
            t = np.linspace(0.0, 1.0, m)[:, None]
            for i in range(3):
                a, b = self.vertices[i], self.vertices[(i + 1) % 3]
                out.append(a + t * (b - a))
        elif d == 3:
            m = max(int(np.sqrt(resolution / 4.0)), 2)
            u = np.linspace(0.0, 1.0, m)
            uu, vv = np.meshgrid(u, u, indexing="ij")
            lam = np.column_stack([(1 - uu.ravel()), (uu * (1 - vv)).ravel(), (uu * vv).ravel()])
            combos = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
            for c in combos:
                tri = self.vertices[list(c)]
                out.append(lam @ tri)
        return np.vstack(out)

    def charts(self):
        d = self.dim
        charts = []
        if d == 2:
            for i in range(3):
                a, b = self.vertices[i], self.vertices[(i + 1) % 3]
                def fn(t, a=a, b=b):
                    t = np.atleast_2d(t)[:, :1]
                    return a + t * (b - a)
                charts.append(_chart([[0.0, 1.0]], fn))
        elif d == 3:
            for c in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]:
                tri = self.vertices[list(c)]
                def fn(uv, tri=tri):
                    uv = np.atleast_2d(uv)
                    u, v = uv[:, 0], uv[:, 1]
                    lam = np.column_stack([1 - u, u * (1 - v), u * v])
                    return lam @ tri
                charts.append(_chart([[0.0, 1.0], [0.0, 1.0]], fn))
        return charts

    def support_min(self, v):
        return float(np.min(self.vertices @ np.asarray(v, dtype=float)))

    def key(self):
        return ("simplex", tuple(map(tuple, self.vertices)))

    def to_dict(self):
        return {"type": "simplex", "vertices": [list(map(float, v)) for v in self.vertices]}


class SimplexUnion(Domain):
    """Union of simplices (assumed to have disjoint interiors)."""

    kind = "simplex_union"

    def __init__(self, simplices, convex=False):
        self.simplices = tuple(
            s if isinstance(s, Simplex) else Simplex(s) for s in simplices
        )
        if not self.simplices:
            raise ValueError("need at least one simplex")
        d = self.simplices[0].dim
        if any(s.dim != d for s in self.simplices):
            raise DimensionMismatch("all simplices must share the ambient dimension")
        self.convex = bool(convex)

    @property
    def dim(self):
        return self.simplices[0].dim

    def contains(self, points, tol=_MEMBERSHIP_TOL):
        pts = _as_points(points, self.dim)
        out = np.zeros(pts.shape[0], dtype=bool)
        for s in self.simplices:
            out |= s.contains(pts, tol=tol)
        return out

    def bounding_box(self):
        boxes = [s.bounding_box() for s in self.simplices]
        lo = np.min([b[:, 0] for b in boxes], axis=0)
        hi = np.max([b[:, 1] for b in boxes], axis=0)
        return np.column_stack([lo, hi])

    def volume(self):
        return float(sum(s.volume() for s in self.simplices))

    def sharp_candidates(self):
        return np.vstack([s.sharp_candidates() for s in self.simplices])

    def boundary_samples(self, resolution):
        per = max(resolution // len(self.simplices), 8)
        return np.vstack([s.boundary_samples(per) for s in self.simplices])

    def charts(self):
        return [c for s in self.simplices for c in s.charts()]

    def support_min(self, v):
        return min(s.support_min(v) for s in self.simplices)

    def key(self):
        return ("simplex_union", tuple(s.key() for s in self.simplices), self.convex)

    def to_dict(self):
        return {
            "type": "simplex_union",
            "simplices": [[list(map(float, v)) for v in s.vertices] for s in self.simplices],
            "convex": self.convex,
        }


class HalfBall(Domain):
    """Half the Euclidean unit ball: ||x||_2 <= 1 and x_d >= 0."""

    kind = "half_ball"

    def __init__(self, dim):
        if dim < 2:
            raise ValueError("half ball needs dim >= 2")
        self._dim = int(dim)

    @property
    def dim(self):
        return self._dim

    def contains(self, points, tol=_MEMBERSHIP_TOL):
        pts = _as_points(points, self._dim)
        return (np.sum(pts * pts, axis=1) <= 1.0 + tol) & (pts[:, -1] >= -tol)

    def bounding_box(self):
        box = np.tile([-1.0, 1.0], (self._dim, 1))
        box[-1, 0] = 0.0
        return box

    def volume(self):
        return 0.5 * ball_volume(self._dim, 2.0)

    def sharp_candidates(self):
        d = self._dim
        rim = []
        for i in range(d - 1):
            for s in (1.0, -1.0):
                p = np.zeros(d)
                p[i] = s
                rim.append(p)
        pole = np.zeros(d)
        pole[-1] = 1.0
        return np.vstack(rim + [pole])

    def boundary_samples(self, resolution):
        d = self._dim
        dirs = unit_directions(d, resolution)
        dome = dirs.copy()
        dome[:, -1] = np.abs(dome[:, -1])
        face = unit_directions(d - 1, max(resolution // 2, 4))
        radii = np.sqrt((np.arange(len(face)) + 0.5) / len(face))
        disk = np.column_stack([face * radii[:, None], np.zeros(len(face))])
        rim = np.column_stack([unit_directions(d - 1, max(resolution // 2, 4)),
                               np.zeros(max(resolution // 2, 4))])
        return np.vstack([dome, disk, rim, self.sharp_candidates()])

    def charts(self):
        d = self._dim
        if d == 2:
            def arc(t):
                t = np.atleast_2d(t)[:, 0]
                return np.column_stack([np.cos(t), np.sin(t)])
            def base(t):
                t = np.atleast_2d(t)[:, 0]
                return np.column_stack([t, np.zeros_like(t)])
            return [_chart([[0.0, pi]], arc), _chart([[-1.0, 1.0]], base)]
        if d == 3:
            def dome(ab):
                ab = np.atleast_2d(ab)
                th, ph = ab[:, 0], ab[:, 1]
                return np.column_stack(
                    [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)]
                )
            def face(ab):
                ab = np.atleast_2d(ab)
                r, ph = ab[:, 0], ab[:, 1]
                return np.column_stack([r * np.cos(ph), r * np.sin(ph), np.zeros_like(r)])
            return [
                _chart([[0.0, pi / 2], [0.0, 2.0 * pi]], dome),
                _chart([[0.0, 1.0], [0.0, 2.0 * pi]], face),
            ]
        return []

    def support_min(self, v):
        v = np.asarray(v, dtype=float)
        if v[-1] <= 0:
            return -float(np.linalg.norm(v))
        return -float(np.linalg.norm(v[:-1]))

    def key(self):
        return ("half_ball", self._dim)

    def to_dict(self):
        return {"type": "half_ball", "dim": self._dim}


class ConeDisk(Domain):
    """Convex hull of (0,0,1) and the unit disk B_2^2 x {0}."""

    kind = "cone_disk"

    def __init__(self):
        pass

    @property
    def dim(self):
        return 3

    def contains(self, points, tol=_MEMBERSHIP_TOL):
        pts = _as_points(points, 3)
        z = pts[:, 2]
        r = np.hypot(pts[:, 0], pts[:, 1])
        return (z >= -tol) & (z <= 1.0 + tol) & (r <= 1.0 - z + tol)

    def bounding_box(self):
        return np.array([[-1.0, 1.0], [-1.0, 1.0], [0.0, 1.0]])

    def volume(self):
        return pi / 3.0

    def sharp_candidates(self):
        rim = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]]
        return np.asarray(rim + [[0, 0, 1]], dtype=float)

    def boundary_samples(self, resolution):
        m = max(resolution // 3, 8)
        phi = np.linspace(0.0, 2.0 * pi, m, endpoint=False)
        rim = np.column_stack([np.cos(phi), np.sin(phi), np.zeros(m)])
        zs = np.linspace(0.0, 1.0, max(m // 4, 3))
        lateral = np.vstack(
            [np.column_stack([(1 - z) * np.cos(phi), (1 - z) * np.sin(phi), np.full(m, z)])
             for z in zs]
        )
        r = np.sqrt((np.arange(m) + 0.5) / m)
        disk = np.column_stack([r * np.cos(phi), r * np.sin(phi), np.zeros(m)])
        return np.vstack([rim, lateral, disk, self.sharp_candidates()])

    def charts(self):
        def lateral(ab):
            ab = np.atleast_2d(ab)
            z, ph = ab[:, 0], ab[:, 1]
            return np.column_stack([(1 - z) * np.cos(ph), (1 - z) * np.sin(ph), z])
        def base(ab):
            ab = np.atleast_2d(ab)
            r, ph = ab[:, 0], ab[:, 1]
            return np.column_stack([r * np.cos(ph), r * np.sin(ph), np.zeros_like(r)])
        return [
            _chart([[0.0, 1.0], [0.0, 2.0 * pi]], lateral),
            _chart([[0.0, 1.0], [0.0, 2.0 * pi]], base),
        ]

    def support_min(self, v):
        v = np.asarray(v, dtype=float)
        return min(float(v[2]), -float(np.hypot(v[0], v[1])))

    def key(self):
        return ("cone_disk",)

    def to_dict(self):
        return {"type": "cone_disk"}


class Product(Domain):
    """Cartesian product of factor domains."""

    kind = "product"

    def __init__(self, factors):
        self.factors = tuple(factors)
        if not self.factors:
            raise ValueError("need at least one factor")
        self.convex = all(f.convex for f in self.factors)

    @property
    def dim(self):
        return sum(f.dim for f in self.factors)

    def _split(self, pts):
        out, start = [], 0
        for f in self.factors:
            out.append(pts[:, start:start + f.dim])
            start += f.dim
        return out

    def contains(self, points, tol=_MEMBERSHIP_TOL):
        pts = _as_points(points, self.dim)
        out = np.ones(pts.shape[0], dtype=bool)
        for f, block in zip(self.factors, self._split(pts)):
            out &= f.contains(block, tol=tol)
        return out

    def bounding_box(self):
        return np.vstack([f.bounding_box() for f in self.factors])

    def volume(self):
        return float(np.prod([f.volume() for f in self.factors]))

    def sharp_candidates(self):
        grids = [f.sharp_candidates() for f in self.factors]
        out = grids[0]
        for g in grids[1:]:
            out = np.hstack([np.repeat(out, len(g), axis=0), np.tile(g, (len(out), 1))])
        return out

    def boundary_samples(self, resolution):
        per = max(int(resolution ** (1.0 / len(self.factors))), 4)
        grids = [np.vstack([f.boundary_samples(per), f.sharp_candidates()])
                 for f in self.factors]
        out = grids[0]
        for g in grids[1:]:
            out = np.hstack([np.repeat(out, len(g), axis=0), np.tile(g, (len(out), 1))])
        return out

    def charts(self):
        charts = []
        offsets = np.cumsum([0] + [f.dim for f in self.factors])
        total = self.dim
        for i, f in enumerate(self.factors):
            others = [(j, g) for j, g in enumerate(self.factors) if j != i]
            anchor_sets = [g.sharp_candidates() for _, g in others]
            for ch in f.charts():
                for anchors in _cartesian(anchor_sets):
                    def fn(params, ch=ch, i=i, anchors=anchors, offsets=offsets,
                           others=others, total=total):
                        base = np.atleast_2d(ch.fn(params))
                        out = np.empty((base.shape[0], total))
                        out[:, offsets[i]:offsets[i] + base.shape[1]] = base
                        for (j, _), anchor in zip(others, anchors):
                            out[:, offsets[j]:offsets[j] + len(anchor)] = anchor
                        return out
                    charts.append(_chart(ch.bounds, fn))
        return charts

    def support_min(self, v):
        v = np.asarray(v, dtype=float)
        total, start = 0.0, 0
        for f in self.factors:
            total += f.support_min(v[start:start + f.dim])
            start += f.dim
        return total

    def key(self):
        return ("product", tuple(f.key() for f in self.factors))

    def to_dict(self):
        return {"type": "product", "factors": [f.to_dict() for f in self.factors]}


class AffineImage(Domain):
    """Image T(D) of a base domain under a non-degenerate affine map."""

    kind = "affine"

    def __init__(self, map_, base):
        if map_.dim != base.dim:
            raise DimensionMismatch("map and base dimensions differ")
        self.map = map_
        self.base = base
        self._inv = map_.inverse()
        self.convex = base.convex

    @property
    def dim(self):
        return self.base.dim

    def contains(self, points, tol=_MEMBERSHIP_TOL):
        pts = _as_points(points, self.dim)
        return self.base.contains(self._inv(pts), tol=tol)

    def bounding_box(self):
        base_box = self.base.bounding_box()
        d = self.dim
        corners = np.array(
            [[base_box[a, (i >> a) & 1] for a in range(d)] for i in range(2**d)]
        )
        img = self.map(corners)
        return np.column_stack([img.min(axis=0), img.max(axis=0)])

    def volume(self):
        return abs(self.map.determinant) * self.base.volume()

    def sharp_candidates(self):
        return self.map(self.base.sharp_candidates())

    def boundary_samples(self, resolution):
        return self.map(self.base.boundary_samples(resolution))

    def charts(self):
        out = []
        for ch in self.base.charts():
            def fn(params, ch=ch):
                return self.map(np.atleast_2d(ch.fn(params)))
            out.append(_chart(ch.bounds, fn))
        return out

    def support_min(self, v):
        v = np.asarray(v, dtype=float)
        return float(v @ self.map.offset) + self.base.support_min(self.map.matrix.T @ v)

    def key(self):
        return ("affine", tuple(map(tuple, self.map.matrix)), tuple(self.map.offset),
                self.base.key())

    def to_dict(self):
        return {"type": "affine", "map": self.map.to_dict(), "base": self.base.to_dict()}


def interval(lo=-1.0, hi=1.0):
    """Interval [lo, hi] as a (possibly affine image of the) 1-d cube."""
    if (lo, hi) == (-1.0, 1.0):
        return Cube(1)
    return AffineImage(AffineMap([[0.5 * (hi - lo)]], [0.5 * (hi + lo)]), Cube(1))


def apply_affine(map_, domain):
    """Affine image wrapper with composed membership and transformed box."""
    return AffineImage(map_, domain)


# ---------------------------------------------------------------------------
# quasi-uniform point utilities


def sobol_points(count, dim, seed=0):
    """Scrambled Sobol points in [0,1)^dim; deterministic for a given seed.

    Draws the next power of two and truncates (balance properties of the
    sequence hold for power-of-two blocks).
    """
    eng = qmc.Sobol(d=dim, scramble=True, seed=seed)
    full = 1 << max(int(count - 1).bit_length(), 0)
    return eng.random(max(full, 1))[:count]


def unit_directions(dim, count):
    """Deterministic quasi-uniform directions on the Euclidean unit sphere."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])[np.arange(count) % 2]
    if dim == 2:
        t = np.arange(count) * (2.0 * pi / count)
        return np.column_stack([np.cos(t), np.sin(t)])
    if dim == 3:
        i = np.arange(count) + 0.5
        phi = pi * (3.0 - sqrt(5.0)) * i
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    pts = sobol_points(count, dim, seed=dim) * 2.0 - 1.0
    norms = np.linalg.norm(pts, axis=1)
    norms[norms == 0] = 1.0
    return pts / norms[:, None]


def sample_domain(domain, count, seed=0):
    """Quasi-uniform interior sample via Sobol rejection from the bounding box."""
    box = domain.bounding_box()
    widths = box[:, 1] - box[:, 0]
    frac = max(domain.volume() / float(np.prod(widths)), 1e-6)
    out = []
    have, batch_seed = 0, seed
    while have < count:
        m = int((count - have) / frac * 1.5) + 64
        raw = sobol_points(m, domain.dim, seed=batch_seed)
        pts = box[:, 0] + raw * widths
        keep = pts[domain.contains(pts)]
        out.append(keep)
        have += len(keep)
        batch_seed += 1
    return np.vstack(out)[:count]


def ball_cover_points(dim, count, seed=0):
    """Surface plus interior points of the unit Euclidean ball.

    Half the budget goes to exact unit-sphere points (where containment
    violations show up first), the rest to interior shells.
    """
    n_surf = count // 2
    surf = unit_directions(dim, n_surf)
    n_int = count - n_surf
    shells = unit_directions(dim, n_int)
    radii = ((np.arange(n_int) % 16 + 1) / 16.0) ** (1.0 / dim)
    inner = shells * radii[:, None]
    return np.vstack([surf, inner])


def _cartesian(sets):
    if not sets:
        yield ()
        return
    for head in sets[0]:
        for rest in _cartesian(sets[1:]):
            yield (head,) + rest


# ---------------------------------------------------------------------------
# catalogue operations


def membership(domain, x, tol=_MEMBERSHIP_TOL):
    """True iff x lies in the (closed) domain."""
    return domain.membership(x, tol=tol)


def volume(domain):
    return domain.volume()


def boundary_candidates(domain, resolution=64):
    """Sharp/extreme candidates plus a quasi-uniform boundary sample."""
    if resolution < 8:
        raise ValueError("resolution must be >= 8")
    pts = np.vstack([domain.sharp_candidates(), domain.boundary_samples(resolution)])
    # dedupe while preserving order
    _, idx = np.unique(np.round(pts, 12), axis=0, return_index=True)
    return pts[np.sort(idx)]


@dataclass(frozen=True)
class SectionValue:
    """Parallel-section area with its sampling error (0 for closed forms)."""

    value: float
    stderr: float = 0.0
    method: str = "exact"

    def __float__(self):
        return float(self.value)


def support_min(domain, v):
    return domain.support_min(v)


def section_width(domain, xi):
    """Width of the domain along xi: max x.xi - min x.xi."""
    xi = np.asarray(xi, dtype=float)
    return -domain.support_min(xi) - domain.support_min(-xi)


def parallel_section(domain, xi, t, samples=20000, seed=0):
    """(d-1)-volume of the slice {x . xi = t + h}, h = min_D x . xi.

    Closed form for l_p balls sliced along a coordinate axis, exact
    polytope slicing for cubes/simplices in d <= 3, otherwise hit-or-miss
    estimation in the slice hyperplane with a reported standard error.
    """
    xi = np.asarray(xi, dtype=float)
    xi = xi / np.linalg.norm(xi)
    if t < 0:
        return SectionValue(0.0)
    width = section_width(domain, xi)
    if t > width + 1e-12:
        return SectionValue(0.0)
    d = domain.dim

    if isinstance(domain, BallP) and domain.p != inf and d >= 2:
        axis = np.argmax(np.abs(xi))
        if abs(abs(xi[axis]) - 1.0) < 1e-13:
            p = domain.p
            if t >= 2.0:
                return SectionValue(0.0)
            body = max(1.0 - abs(1.0 - t) ** p, 0.0)
            return SectionValue(body ** ((d - 1) / p) * ball_volume(d - 1, p))

    if isinstance(domain, (Cube, Simplex)) and d in (2, 3):
        return SectionValue(_polytope_section(domain, xi, t), 0.0, "slice")

    return _sampled_section(domain, xi, t, samples, seed)


def _halfspaces(domain):
    """Rows (a, c) with a . x <= c describing a polytope."""
    d = domain.dim
    if isinstance(domain, Cube):
        rows = []
        for i in range(d):
            e = np.zeros(d)
            e[i] = 1.0
            rows.append((e, 1.0))
            rows.append((-e, 1.0))
        return rows
    if isinstance(domain, Simplex):
        rows = []
        v = domain.vertices
        centroid = v.mean(axis=0)
        for i in range(d + 1):
            face = np.delete(v, i, axis=0)
            base = face[0]
            span = face[1:] - base
            normal = _null_direction(span)
            if np.dot(normal, centroid - base) > 0:
                normal = -normal
            rows.append((normal, float(np.dot(normal, base))))
        return rows
    raise ValueError("half-space form available only for cube/simplex")


def _null_direction(span):
    d = span.shape[1]
    if span.shape[0] == d - 1:
        if d == 2:
            t = span[0]
            return np.array([-t[1], t[0]])
        if d == 3:
            return np.cross(span[0], span[1])
    _, _, vt = np.linalg.svd(span)
    return vt[-1]


def _orthonormal_complement(xi):
    d = xi.size
    basis = np.linalg.qr(np.column_stack([xi, np.eye(d)[:, : d - 1]]))[0]
    w = basis[:, 1:]
    return w


def _polytope_section(domain, xi, t):
    d = domain.dim
    h = domain.support_min(xi)
    p0 = (t + h) * xi
    w = _orthonormal_complement(xi)
    rows = _halfspaces(domain)
    if d == 2:
        lo, hi = -np.inf, np.inf
        wvec = w[:, 0]
        for a, c in rows:
            coef = float(a @ wvec)
            rhs = c - float(a @ p0)
            if abs(coef) < 1e-14:
                if rhs < -1e-12:
                    return 0.0
                continue
            if coef > 0:
                hi = min(hi, rhs / coef)
            else:
                lo = max(lo, rhs / coef)
        return max(hi - lo, 0.0)
    # d == 3: clip a large square polygon by each half-plane
    big = 10.0 * max(np.abs(domain.bounding_box()).max(), 1.0)
    poly = [np.array([-big, -big]), np.array([big, -big]),
            np.array([big, big]), np.array([-big, big])]
    for a, c in rows:
        coef = np.array([float(a @ w[:, 0]), float(a @ w[:, 1])])
        rhs = c - float(a @ p0)
        poly = _clip(poly, coef, rhs)
        if not poly:
            return 0.0
    area = 0.0
    for i in range(len(poly)):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % len(poly)]
        area += x0 * y1 - x1 * y0
    return abs(area) / 2.0


def _clip(poly, coef, rhs):
    out = []
    n = len(poly)
    for i in range(n):
        cur, nxt = poly[i], poly[(i + 1) % n]
        c_in = coef @ cur <= rhs + 1e-12
        n_in = coef @ nxt <= rhs + 1e-12
        if c_in:
            out.append(cur)
        if c_in != n_in:
            denom = coef @ (nxt - cur)
            s = (rhs - coef @ cur) / denom
            out.append(cur + s * (nxt - cur))
    return out


def _sampled_section(domain, xi, t, samples, seed):
    d = domain.dim
    h = domain.support_min(xi)
    p0 = (t + h) * xi
    w = _orthonormal_complement(xi)
    box = domain.bounding_box()
    radius = float(np.linalg.norm(box[:, 1] - box[:, 0]))
    raw = sobol_points(samples, d - 1, seed=seed) * 2.0 - 1.0
    pts = p0 + (raw * radius) @ w.T
    inside = domain.contains(pts)
    frac = float(np.mean(inside))
    cell = (2.0 * radius) ** (d - 1)
    stderr = cell * sqrt(max(frac * (1 - frac), 1e-12) / samples)
    return SectionValue(cell * frac, stderr, "hit-or-miss")


# ---------------------------------------------------------------------------
# special maps from the upper-bound machinery


def extension_point(n, d):
    """The point (1 + n^-2/3, 0, ..., 0), slightly outside the unit ball."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = np.zeros(d)
    out[0] = 1.0 + 1.0 / (3.0 * n * n)
    return out


def _rotation_from_minus_e1(u):
    """Rotation (det +1) taking (-1, 0, ..., 0) to u, via two Householders."""
    d = u.size
    e1 = np.zeros(d)
    e1[0] = -1.0
    if np.allclose(u, e1, atol=1e-15):
        return np.eye(d)
    w = u - e1
    h1 = np.eye(d) - 2.0 * np.outer(w, w) / (w @ w)
    # second reflection fixes u, flips a direction orthogonal to u
    for j in range(d):
        trial = np.zeros(d)
        trial[j] = 1.0
        v = trial - (trial @ u) * u
        if np.linalg.norm(v) > 1e-8:
            v = v / np.linalg.norm(v)
            break
    h2 = np.eye(d) - 2.0 * np.outer(v, v)
    return h2 @ h1


def cone_inscription_map(x, u, alpha, beta, s, n):
    """Squeezed-ball inscription T(.) = x + A2 A1 (. - v_n^d).

    A1 = diag(alpha/3, mu, ..., mu) with mu = beta/sqrt(6) * n^(1-2s); A2 is
    a rotation taking (-1,0,...,0) to u (the axis direction pointing into
    the domain).  T maps the extension point to x and |det T| =
    (alpha/3) mu^(d-1).
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    d = x.size
    if d < 2:
        raise DimensionMismatch("cone inscription needs d >= 2")
    if not (0.5 <= s <= 1.0):
        raise ValueError("s must lie in [1/2, 1]")
    if alpha <= 0 or beta <= 0 or n < 1:
        raise ValueError("alpha, beta must be positive and n >= 1")
    u = u / np.linalg.norm(u)
    mu = beta / sqrt(6.0) * float(n) ** (-2.0 * s + 1.0)
    a1 = np.diag([alpha / 3.0] + [mu] * (d - 1))
    a2 = _rotation_from_minus_e1(u)
    a = a2 @ a1
    vnd = extension_point(n, d)
    return AffineMap(a, x - a @ vnd)


def lp_cone_constants(d, p):
    """Constants (alpha, beta) making the l_p cone premise hold for 1 < p <= 2."""
    if not (1.0 < p <= 2.0):
        raise ValueError("p must satisfy 1 < p <= 2")
    if d < 2:
        raise ValueError("d must be >= 2")
    gamma1 = float(d) ** (p - 1.0)
    beta = 2.0 / sqrt(13.0 * d * gamma1)
    alpha = (beta / gamma1 / 2.0) ** (p / (p - 1.0))
    return alpha, beta


def lp_outward_normal(p, x):
    """Unit outward normal of the l_p sphere at a boundary point x."""
    x = np.asarray(x, dtype=float)
    g = np.sign(x) * np.abs(x) ** (p - 1.0)
    return g / np.linalg.norm(g)


def half_ball_map(n):
    """Inscribed squeezed ball for the 3-d half ball, |det T| = 1/(160 n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    c = 1.0 + 1.0 / (3.0 * n * n)
    a = np.array(
        [
            [0.5, 0.0, 0.0],
            [0.0, 0.125, 0.0],
            [-0.125, 0.0, 1.0 / (10.0 * n)],
        ]
    )
    b = np.array([1.0 - c / 2.0, 0.0, c / 8.0])
    return AffineMap(a, b)


def cone_premise_points(x, u, alpha, beta, s, n_delta=50, n_lambda=50, n_dirs=16):
    """Grid over the inscribed cone set {x + delta u + lam delta^s v}."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    d = x.size
    w = _orthonormal_complement(u)
    if d == 2:
        dirs = np.array([[1.0], [-1.0]])
    else:
        t = np.arange(n_dirs) * (2.0 * pi / n_dirs)
        dirs = np.column_stack([np.cos(t), np.sin(t)] + [np.zeros(n_dirs)] * (d - 3))
    deltas = np.linspace(0.0, alpha, n_delta)
    lams = np.linspace(0.0, beta, n_lambda)
    pts = []
    for delta in deltas:
        for lam in lams:
            vs = dirs @ w.T
            pts.append(x + delta * u + lam * delta**s * vs)
    return np.vstack(pts)


# ---------------------------------------------------------------------------
# JSON schema


def _parse_real(v):
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "infinity"):
            return inf
        return float(v)
    return float(v)


def domain_from_dict(data):
    """Build a Domain from its JSON dictionary form."""
    if not isinstance(data, dict) or "type" not in data:
        raise DomainFormatError("domain JSON must be an object with a 'type' field")
    kind = data["type"]
    try:
        if kind == "cube":
            return Cube(int(data["dim"]))
        if kind == "ball_p":
            return BallP(int(data["dim"]), _parse_real(data["p"]))
        if kind == "simplex":
            return Simplex([[_parse_real(v) for v in row] for row in data["vertices"]])
        if kind == "simplex_union":
            simplices = [
                Simplex([[_parse_real(v) for v in row] for row in s])
                for s in data["simplices"]
            ]
            return SimplexUnion(simplices, convex=bool(data.get("convex", False)))
        if kind == "half_ball":
            return HalfBall(int(data["dim"]))
        if kind == "cone_disk":
            return ConeDisk()
        if kind == "product":
            return Product([domain_from_dict(f) for f in data["factors"]])
        if kind == "affine":
            m = data["map"]
            amap = AffineMap(
                [[_parse_real(v) for v in row] for row in m["A"]],
                [_parse_real(v) for v in m["b"]],
            )
            return AffineImage(amap, domain_from_dict(data["base"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainFormatError):
            raise
        raise DomainFormatError(f"bad domain JSON for type {kind!r}: {exc}") from exc
    raise DomainFormatError(f"unknown domain type {kind!r}")


def domain_from_json(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainFormatError(f"malformed JSON: {exc}") from exc
    return domain_from_dict(data)


def load_domain(path):
    with open(path, "r", encoding="utf-8") as fh:
        return domain_from_json(fh.read())
