"""Graded multi-index sets and evaluation of the polynomial bases.

Two basis kinds are supported on a total-degree space of dimension
N = binomial(n+d, d): raw monomials, and tensor products of univariate
Legendre polynomials rescaled to be L2-orthonormal on an axis-aligned
box (the default; it keeps Gram matrices well scaled far beyond where
monomials give up).

Multi-indices are ordered graded-lexicographically: total degree first,
plain lexicographic within a grade.  Every module in the package relies
on this order, so coefficient vectors and Gram matrices serialize
interchangeably.
"""
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import _kernels
from .errors import CapacityError

#: hard cap on the dimension of the polynomial space
INDEX_CAP = 20_000


def _compositions(total, d):
    if d == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, d - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class MultiIndexSet:
    """Exponent vectors of total degree <= degree in dim variables, graded-lex."""

    dim: int
    degree: int
    indices: np.ndarray = field(repr=False)  # (N, dim) int64

    def __len__(self):
        return self.indices.shape[0]

    def __iter__(self):
        return (tuple(row) for row in self.indices)

    def position(self, alpha):
        """Index of an exponent vector within the graded-lex order."""
        alpha = tuple(int(a) for a in alpha)
        key = (sum(alpha), alpha)
        for i, row in enumerate(self.indices):
            t = tuple(row)
            if (sum(t), t) == key:
                return i
        raise KeyError(alpha)


def enumerate_indices(dim, degree, cap=INDEX_CAP):
    """Enumerate all alpha in N^dim with |alpha| <= degree, graded-lex order."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if degree < 0:
        raise ValueError("degree must be >= 0")
    n_total = comb(degree + dim, dim)
    if n_total > cap:
        raise CapacityError(
            f"index set of size {n_total} exceeds the cap {cap} (d={dim}, n={degree})"
        )
    rows = []
    for k in range(degree + 1):
        rows.extend(_compositions(k, dim))
    arr = np.asarray(rows, dtype=np.int64).reshape(n_total, dim)
    arr.setflags(write=False)
    return MultiIndexSet(dim=dim, degree=degree, indices=arr)


@dataclass(frozen=True)
class BasisSpec:
    """Evaluation basis: kind, bounding box, and index set.

    box has shape (d, 2); it is only used by the tensor-legendre kind,
    which maps each coordinate interval [a_i, b_i] affinely onto [-1, 1].
    """

    kind: str
    box: np.ndarray = field(repr=False)
    index_set: MultiIndexSet

    def __post_init__(self):
        if self.kind not in ("monomial", "tensor-legendre"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        box = np.asarray(self.box, dtype=float).reshape(self.index_set.dim, 2)
        if not np.all(box[:, 1] > box[:, 0]):
            raise ValueError("box must have strictly positive side lengths")
        box.setflags(write=False)
        object.__setattr__(self, "box", box)

    @property
    def dim(self):
        return self.index_set.dim

    @property
    def size(self):
        return len(self.index_set)


def monomial_spec(dim, degree, box=None):
    if box is None:
        box = np.tile([-1.0, 1.0], (dim, 1))
    return BasisSpec("monomial", np.asarray(box, float), enumerate_indices(dim, degree))


def legendre_spec(dim, degree, box):
    return BasisSpec("tensor-legendre", np.asarray(box, float), enumerate_indices(dim, degree))


def eval_basis(spec, points):
    """Evaluate every basis function at every point.

    points: (M, d) or a single point of length d.  Returns (M, N); entry
    (i, k) is basis function k at point i.  Points outside the box are
    legal (the recurrences extend polynomially).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != spec.dim:
        raise ValueError(f"points have dim {pts.shape[1]}, basis has dim {spec.dim}")
    n = spec.index_set.degree
    d = spec.dim
    tables = np.empty((d, pts.shape[0], n + 1))
    if spec.kind == "monomial":
        for a in range(d):
            tables[a] = _kernels.power_table(pts[:, a], n)
    else:
        scale = np.sqrt((2.0 * np.arange(n + 1) + 1.0))
        for a in range(d):
            lo, hi = spec.box[a]
            u = (2.0 * pts[:, a] - lo - hi) / (hi - lo)
            tables[a] = _kernels.legendre_table(u, n) * (scale / np.sqrt(hi - lo))
    return _kernels.tensor_gather(tables, spec.index_set.indices)
