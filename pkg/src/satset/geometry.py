"""Projective spaces PG(N, q): point tables, elimination, hyperplanes.

Points carry dense integer ids in lexicographic order of their canonical
coordinates (leftmost nonzero coordinate equal to 1).  A lookup table maps
every nonzero vector of F_q^{N+1}, encoded as a base-q integer, straight to
the id of the point it represents, so canonicalisation of many vectors is a
single gather.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from satset.field import FieldSpec, make_field

# bound on q^(N+1), the size of the vector-to-point table
MAX_VECTORS = 1 << 25


class SpaceTooLargeError(ValueError):
    pass


class NoSkewHyperplaneError(RuntimeError):
    pass


def theta(N: int, q: int) -> int:
    """Number of points of PG(N, q)."""
    if N < 0:
        return 0
    return (q ** (N + 1) - 1) // (q - 1)


class ProjPoint(NamedTuple):
    id: int
    coords: tuple[int, ...]


@dataclass(frozen=True)
class Hyperplane:
    """Zero set of the linear form with coefficient vector ``dual``."""

    dual: tuple[int, ...]
    id: int


@dataclass(frozen=True)
class SubspaceBasis:
    rows: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.rows) - 1


# ---------- small dense elimination (pure Python, copies its input) ----------

def row_reduce(vectors: Sequence[Sequence[int]], F: FieldSpec) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    add, mul, neg, inv = F._add, F._mul, F._neg, F._inv
    rows = [list(v) for v in vectors]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        s = inv[rows[r][c]]
        rows[r] = [mul[s][x] for x in rows[r]]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = neg[rows[i][c]]
                rows[i] = [add[x][mul[f][y]] for x, y in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(vectors: Sequence[Sequence[int]], F: FieldSpec) -> int:
    return len(row_reduce(vectors, F)[1])


def nullspace(vectors: Sequence[Sequence[int]], F: FieldSpec, ncols: int | None = None) -> list[list[int]]:
    """Basis of {x : v . x = 0 for every v}, i.e. the annihilator of the span."""
    if ncols is None:
        ncols = len(vectors[0])
    rows, pivots = row_reduce(vectors, F) if vectors else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        x = [0] * ncols
        x[fc] = 1
        for row, pc in zip(rows, pivots):
            x[pc] = F._neg[row[fc]]
        basis.append(x)
    return basis


def normalize(v: Sequence[int], F: FieldSpec) -> tuple[int, ...]:
    """Scale so the leftmost nonzero coordinate is 1."""
    lead = next((x for x in v if x), None)
    if lead is None:
        raise ValueError("the zero vector is not a projective point")
    s = F._inv[lead]
    return tuple(F._mul[s][x] for x in v)


def in_general_position(points: Sequence[Sequence[int]], F: FieldSpec) -> bool:
    return rank(points, F) == len(points)


def span_contains(basis: SubspaceBasis | Sequence[Sequence[int]], P: Sequence[int], F: FieldSpec) -> bool:
    rows = basis.rows if isinstance(basis, SubspaceBasis) else basis
    return rank(list(rows) + [P], F) == rank(rows, F)


class ProjectiveSpace:
    """All points of PG(N, q) with id <-> coordinate tables."""

    def __init__(self, N: int, F: FieldSpec | int):
        if isinstance(F, int):
            F = make_field(F)
        q = F.q
        nvec = q ** (N + 1)
        if N < 0:
            raise ValueError("N must be >= 0")
        if nvec > MAX_VECTORS:
            raise SpaceTooLargeError(
                f"PG({N},{q}) needs a table of {nvec} vectors ({theta(N, q)} points); limit is {MAX_VECTORS}"
            )
        self.N = N
        self.F = F
        self.q = q
        codes = np.arange(nvec, dtype=np.int64)
        place = q ** np.arange(N, -1, -1, dtype=np.int64)
        vecs = (codes[:, None] // place[None, :]) % q
        lead_pos = np.argmax(vecs != 0, axis=1)
        lead = vecs[np.arange(nvec), lead_pos]
        canonical = lead == 1
        self.coords = np.ascontiguousarray(vecs[canonical], dtype=np.intp)
        self.coords.setflags(write=False)
        self.size = len(self.coords)
        assert self.size == theta(N, q)
        self._place = place.astype(np.intp)
        # map every nonzero vector to the id of its canonical representative
        canon_id = np.full(nvec, -1, dtype=np.int32)
        canon_id[np.flatnonzero(canonical)] = np.arange(self.size, dtype=np.int32)
        scale = F.inv_table[lead[1:]]
        normed = F.mul_table[scale[:, None], vecs[1:]]
        lookup = np.full(nvec, -1, dtype=np.int32)
        lookup[1:] = canon_id[normed @ self._place]
        self._lookup = lookup

    def __repr__(self) -> str:
        return f"PG({self.N},{self.q})"

    @property
    def dim(self) -> int:
        return self.N + 1

    def point(self, pid: int) -> ProjPoint:
        return ProjPoint(int(pid), tuple(int(x) for x in self.coords[pid]))

    def points(self) -> list[ProjPoint]:
        return [self.point(i) for i in range(self.size)]

    def ids_of(self, vectors) -> np.ndarray:
        """Point ids of the given vectors (rows); -1 for zero rows."""
        v = np.asarray(vectors, dtype=np.intp)
        return self._lookup[v @ self._place]

    def id_of(self, vector: Sequence[int]) -> int:
        pid = int(self._lookup[int(np.dot(np.asarray(vector, dtype=np.int64), self._place))])
        if pid < 0:
            raise ValueError("the zero vector is not a projective point")
        return pid

    def vecs(self, ids) -> list[list[int]]:
        return self.coords[np.asarray(ids, dtype=np.intp)].tolist()

    def evaluate(self, forms, ids=None) -> np.ndarray:
        """Values of linear forms (rows) at points: shape (#forms, #points)."""
        forms = np.atleast_2d(np.asarray(forms, dtype=np.intp))
        pts = self.coords if ids is None else self.coords[np.asarray(ids, dtype=np.intp)]
        return self.F.matmul(forms, pts.T)

    def span_mask(self, vectors: Sequence[Sequence[int]]) -> np.ndarray:
        """Boolean mask of the points in the span of ``vectors``."""
        ann = nullspace(vectors, self.F, self.dim) if len(vectors) else [list(r) for r in np.eye(self.dim, dtype=int)]
        if not ann:
            return np.ones(self.size, dtype=bool)
        return ~self.evaluate(ann).any(axis=0)

    def span_ids(self, vectors: Sequence[Sequence[int]]) -> np.ndarray:
        return np.flatnonzero(self.span_mask(vectors))

    # hyperplanes share the point enumeration through their dual coordinates
    def hyperplane(self, hid: int) -> Hyperplane:
        return Hyperplane(self.point(hid).coords, int(hid))

    def hyperplane_from_dual(self, dual: Sequence[int]) -> Hyperplane:
        return self.hyperplane(self.id_of(dual))

    def hyperplane_mask(self, h: Hyperplane) -> np.ndarray:
        return self.evaluate([h.dual])[0] == 0


def enumerate_points(N: int, q: int) -> list[ProjPoint]:
    return ProjectiveSpace(N, q).points()


def hyperplane_points(space: ProjectiveSpace, h: Hyperplane) -> np.ndarray:
    return np.flatnonzero(space.hyperplane_mask(h))


def skew_hyperplanes(space: ProjectiveSpace, K: Sequence[int]) -> np.ndarray:
    """Ids (in dual lexicographic order) of hyperplanes missing every point of K."""
    if len(K) == 0:
        return np.arange(space.size)
    vals = space.F.matmul(space.coords, space.coords[np.asarray(K, dtype=np.intp)].T)
    return np.flatnonzero((vals != 0).all(axis=1))


def find_skew_hyperplane(space: ProjectiveSpace, K: Sequence[int], rng: random.Random | None = None) -> Hyperplane:
    """First skew hyperplane in dual order, or a uniformly random one if ``rng`` is given."""
    cands = skew_hyperplanes(space, K)
    if len(cands) == 0:
        raise NoSkewHyperplaneError(f"every hyperplane of {space!r} meets the given {len(K)}-set")
    hid = int(cands[0]) if rng is None else int(cands[rng.randrange(len(cands))])
    return space.hyperplane(hid)
