"""Brute-force verification of saturating sets and their codes.

A point set S of PG(N, q) and the parity-check matrix whose columns are its
coordinate vectors are two views of one object: S is rho-saturating exactly
when the code has covering radius rho + 1.  Both are checked here
independently of how S was built.

The workhorse is a layered enumeration: layer m lists every combination
c_1 h_1 + ... + c_m h_m of m distinct columns with all c_i nonzero (c_1 = 1,
since only projective classes matter) and maps it to a point id.  Covered
points, dependent column sets and distance witnesses all fall out of it.
Chunks of a layer may run on worker threads; results are merged in chunk
order, so the outcome never depends on the thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations, product
from math import comb

import numpy as np

from satset.field import FieldSpec, make_field
from satset.geometry import ProjectiveSpace, rank, theta

# bound on the number of combination vectors materialised per chunk
_CHUNK_VECTORS = 1 << 20

CRITERION = "B is rho-covered iff B is in the span of at most rho+1 points of S"


class NotSpanningError(ValueError):
    pass


class NotFullRankError(ValueError):
    pass


class DistanceUndefinedError(ValueError):
    pass


class InstanceTooLargeError(ValueError):
    pass


def default_threads() -> int:
    env = os.environ.get("SATSET_THREADS", "")
    return max(1, int(env)) if env.isdigit() else 1


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """r x n matrix of field element indices; column u is the point A_u."""

    F: FieldSpec
    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=np.intp, ndmin=2)
        if a.ndim != 2 or a.size == 0:
            raise ValueError("a parity-check matrix needs r >= 1 rows and n >= 1 columns")
        if a.min() < 0 or a.max() >= self.F.q:
            raise ValueError(f"entries must lie in [0, {self.F.q})")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def from_points(cls, space: ProjectiveSpace, ids) -> "ParityCheckMatrix":
        return cls(space.F, space.coords[np.asarray(ids, dtype=np.intp)].T)

    @property
    def q(self) -> int:
        return self.F.q

    @property
    def r(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    def columns(self) -> np.ndarray:
        return self.entries.T

    def rank(self) -> int:
        return rank(self.columns().tolist(), self.F)

    def space(self) -> ProjectiveSpace:
        return ProjectiveSpace(self.r - 1, self.F)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ParityCheckMatrix)
            and self.F == other.F
            and np.array_equal(self.entries, other.entries)
        )

    __hash__ = None


@dataclass
class VerificationCertificate:
    is_saturating_at: int
    covering_radius: int
    min_distance: int | None
    is_AMDS: bool | None
    n: int
    r: int
    q: int
    criterion: str = CRITERION
    witnesses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


# ---------- combination engine ----------

class _Layers:
    """Enumerates layer m of the column combinations of ``cols`` in ``space``."""

    def __init__(self, space: ProjectiveSpace, cols: np.ndarray, threads: int = 1):
        self.space = space
        self.F = space.F
        self.cols = np.asarray(cols, dtype=np.intp)
        self.n = len(self.cols)
        self.threads = max(1, threads)
        q = self.F.q
        # scaled[l, j] = l * h_j
        self.scaled = self.F.mul_table[np.arange(q)[:, None, None], self.cols[None, :, :]]

    def _add(self, a, b):
        if self.F.is_prime_field:
            return (a + b) % self.F.p
        return self.F.add_table[a, b]

    def _chunk(self, subsets: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
        acc = np.broadcast_to(self.scaled[1, subsets[:, 0]][:, None, :], (len(subsets), len(coeffs), self.space.dim))
        for i in range(1, subsets.shape[1]):
            term = self.scaled[coeffs[None, :, i], subsets[:, i][:, None]]
            acc = self._add(acc, term)
        return self.space._lookup[acc @ self.space._place]

    def layer(self, m: int):
        """Yield (subsets, coeffs, ids) chunks in a fixed order; ids are -1 for zero sums."""
        if m > self.n:
            return
        q = self.F.q
        coeffs = np.array([(1,) + c for c in product(range(1, q), repeat=m - 1)], dtype=np.intp)
        subsets = np.array(list(combinations(range(self.n), m)), dtype=np.intp).reshape(-1, m)
        step = max(1, _CHUNK_VECTORS // len(coeffs))
        starts = range(0, len(subsets), step)
        if self.threads == 1 or len(starts) == 1:
            for s in starts:
                sub = subsets[s : s + step]
                yield sub, coeffs, self._chunk(sub, coeffs)
            return
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            # map preserves order, so merges are deterministic
            window = self.threads * 2
            starts = list(starts)
            for w0 in range(0, len(starts), window):
                batch = starts[w0 : w0 + window]
                results = pool.map(lambda s: self._chunk(subsets[s : s + step], coeffs), batch)
                for s, ids in zip(batch, results):
                    yield subsets[s : s + step], coeffs, ids


def _check_spanning(space: ProjectiveSpace, S) -> list[list[int]]:
    vecs = space.vecs(list(S))
    rk = rank(vecs, space.F) if vecs else 0
    if rk != space.dim:
        raise NotSpanningError(f"the set spans a subspace of rank {rk} < {space.dim} in {space!r}")
    return vecs


def is_rho_covered(space: ProjectiveSpace, S, rho: int, B: int) -> bool:
    """Direct rank test: is B in the span of some <= rho+1 points of S?"""
    S = sorted(set(int(x) for x in S))
    if B in S:
        return True
    F = space.F
    b = space.vecs([B])[0]
    k = min(rho + 1, len(S))
    for sub in combinations(S, k):
        vecs = space.vecs(list(sub))
        if rank(vecs + [b], F) == rank(vecs, F):
            return True
    return False


@dataclass
class SaturationProfile:
    level: int
    # a point not covered by combinations of `level` points (proves minimality)
    uncovered_below: int | None
    covered_by_layer: list[int]


def saturation_profile(space: ProjectiveSpace, S, max_rho: int | None = None, threads: int = 1) -> SaturationProfile:
    vecs = _check_spanning(space, S)
    max_rho = space.N if max_rho is None else max_rho
    eng = _Layers(space, vecs, threads)
    covered = np.zeros(space.size, dtype=bool)
    counts = []
    prev_witness = None
    for m in range(1, max_rho + 2):
        for _, _, ids in eng.layer(m):
            covered[ids[ids >= 0]] = True
        counts.append(int(covered.sum()))
        if covered.all():
            return SaturationProfile(m - 1, prev_witness, counts)
        prev_witness = int(np.flatnonzero(~covered)[0])
    raise NotSpanningError(
        f"point {prev_witness} is not covered by combinations of {max_rho + 1} points; level exceeds {max_rho}"
    )


def saturation_level(space: ProjectiveSpace, S, max_rho: int | None = None, threads: int = 1) -> int:
    return saturation_profile(space, S, max_rho, threads).level


def is_saturating(space: ProjectiveSpace, S, rho: int, threads: int = 1) -> bool:
    """True iff every point is rho-covered (the level may be lower)."""
    try:
        _check_spanning(space, S)
    except NotSpanningError:
        return False
    eng = _Layers(space, space.vecs(list(S)), threads)
    covered = np.zeros(space.size, dtype=bool)
    for m in range(1, rho + 2):
        for _, _, ids in eng.layer(m):
            covered[ids[ids >= 0]] = True
        if covered.all():
            return True
    return False


def _encode(digits: np.ndarray, q: int) -> np.ndarray:
    return digits @ (q ** np.arange(digits.shape[-1] - 1, -1, -1, dtype=np.intp))


@dataclass
class RadiusResult:
    radius: int
    layer_sizes: list[int]
    farthest_syndrome: list[int]


def covering_radius_detail(H: ParityCheckMatrix, threads: int = 1) -> RadiusResult:
    """Breadth-first expansion of reachable syndromes, one column at a time."""
    if H.rank() != H.r:
        raise NotFullRankError(f"H has rank {H.rank()} < r = {H.r}; some syndromes are unreachable")
    F, q, r = H.F, H.q, H.r
    cols = H.columns()
    gens = F.mul_table[np.arange(1, q)[:, None, None], cols[None, :, :]].reshape(-1, r)
    gens = np.unique(gens, axis=0)
    total = q**r
    place = q ** np.arange(r - 1, -1, -1, dtype=np.intp)
    all_digits = (np.arange(total, dtype=np.intp)[:, None] // place[None, :]) % q
    seen = np.zeros(total, dtype=bool)
    seen[0] = True
    frontier = np.array([0], dtype=np.intp)
    sizes = [1]
    radius = 0
    step = max(1, _CHUNK_VECTORS // len(gens))
    while not seen.all():
        if len(frontier) == 0:
            raise NotFullRankError("syndrome expansion stalled")
        nxt = np.zeros(total, dtype=bool)
        for s in range(0, len(frontier), step):
            fd = all_digits[frontier[s : s + step]]
            if F.is_prime_field:
                sums = (fd[:, None, :] + gens[None, :, :]) % q
            else:
                sums = F.add_table[fd[:, None, :], gens[None, :, :]]
            nxt[(sums @ place).ravel()] = True
        nxt &= ~seen
        seen |= nxt
        frontier = np.flatnonzero(nxt)
        sizes.append(len(frontier))
        radius += 1
    far = all_digits[frontier[0]].tolist() if radius else [0] * r
    return RadiusResult(radius, sizes, far)


def covering_radius(H: ParityCheckMatrix, threads: int = 1) -> int:
    return covering_radius_detail(H, threads).radius


@dataclass
class DistanceResult:
    d: int
    # columns c_1..c_d and coefficients with sum c_i h_i = 0
    dependent_columns: list[int]
    coefficients: list[int]


def min_distance_detail(H: ParityCheckMatrix, threads: int = 1) -> DistanceResult:
    F, n, r = H.F, H.n, H.r
    if H.rank() != r:
        raise NotFullRankError(f"H has rank {H.rank()} < r = {r}")
    if n == r:
        raise DistanceUndefinedError(f"n = r = {n} with independent columns: the code has dimension 0")
    space = H.space()
    cols = H.columns()
    col_ids = space.ids_of(cols)
    zero = np.flatnonzero(col_ids < 0)
    if len(zero):
        return DistanceResult(1, [int(zero[0])], [1])
    first: dict[int, int] = {}
    for j, pid in enumerate(col_ids.tolist()):
        if pid in first:
            # h_j = lam * h_i for the earlier column i on the same point
            i = first[pid]
            lead = int(np.flatnonzero(cols[i])[0])
            lam = F.div(int(cols[j][lead]), int(cols[i][lead]))
            return DistanceResult(2, [i, j], [lam, F.neg(1)])
        first[pid] = j
    is_col = np.zeros(space.size, dtype=bool)
    is_col[col_ids] = True
    eng = _Layers(space, cols, threads)
    # a hit at layer m = 1 is the column itself; duplicates were handled above
    for m in range(2, n + 1):
        zero_w, hit_w = None, None
        for sub, coeffs, ids in eng.layer(m):
            if zero_w is None and (ids < 0).any():
                a, c = np.argwhere(ids < 0)[0]
                zero_w = (sub[a].tolist(), coeffs[c].tolist())
            if hit_w is None and zero_w is None:
                hits = (ids >= 0) & is_col[np.maximum(ids, 0)]
                if hits.any():
                    a, c = np.argwhere(hits)[0]
                    hit_w = (sub[a].tolist(), coeffs[c].tolist(), int(ids[a, c]))
        if zero_w is not None:
            return DistanceResult(m, *zero_w)
        if hit_w is not None:
            sub, cf, pid = hit_w
            j = int(np.flatnonzero(col_ids == pid)[0])
            # sum c_i h_i = lam * h_j, so (c, -lam) is a dependency
            v = [0] * r
            for i, c in zip(sub, cf):
                v = [F.add(x, F.mul(c, int(y))) for x, y in zip(v, cols[i])]
            lead = next(k for k in range(r) if cols[j][k])
            lam = F.div(v[lead], int(cols[j][lead]))
            return DistanceResult(m + 1, sub + [j], cf + [F.neg(lam)])
    raise AssertionError("no dependency found among all columns")


def min_distance(H: ParityCheckMatrix, threads: int = 1) -> int:
    return min_distance_detail(H, threads).d


def is_AMDS(H: ParityCheckMatrix, threads: int = 1) -> bool:
    return min_distance(H, threads) == H.r


def certify(H: ParityCheckMatrix, threads: int = 1, distance: bool = True) -> VerificationCertificate:
    space = H.space()
    cols = H.columns()
    ids = space.ids_of(cols)
    witnesses: dict = {}
    prof = saturation_profile(space, sorted(set(int(i) for i in ids if i >= 0)), threads=threads)
    if prof.uncovered_below is not None:
        witnesses["uncovered_below_level"] = space.vecs([prof.uncovered_below])[0]
    rad = covering_radius_detail(H, threads)
    witnesses["farthest_syndrome"] = rad.farthest_syndrome
    d = amds = None
    if distance:
        dist = min_distance_detail(H, threads)
        d, amds = dist.d, dist.d == H.r
        witnesses["dependent_columns"] = dist.dependent_columns
        witnesses["dependency_coefficients"] = dist.coefficients
    return VerificationCertificate(
        is_saturating_at=prof.level,
        covering_radius=rad.radius,
        min_distance=d,
        is_AMDS=amds,
        n=H.n,
        r=H.r,
        q=H.q,
        witnesses=witnesses,
    )


# ---------- tiny exhaustive oracle ----------

def exhaustive_min_saturating_set(N: int, q: int, rho: int, max_work: int = 50_000_000) -> list[int]:
    """A smallest set of PG(N, q) in which every point is rho-covered."""
    size = theta(N, q)
    if size > 40:
        raise InstanceTooLargeError(f"PG({N},{q}) has {size} points; exhaustive search needs <= 40")
    space = ProjectiveSpace(N, make_field(q))
    full = (1 << size) - 1
    span_cache: dict[tuple[int, ...], int] = {}

    def span_bits(sub: tuple[int, ...]) -> int:
        b = span_cache.get(sub)
        if b is None:
            mask = space.span_mask(space.vecs(list(sub)))
            b = int(sum(1 << int(i) for i in np.flatnonzero(mask)))
            span_cache[sub] = b
        return b

    for k in range(1, size + 1):
        width = min(rho + 1, k)
        work = comb(size, k) * comb(k, width)
        if work > max_work:
            raise InstanceTooLargeError(f"size-{k} search needs ~{work} span unions; limit is {max_work}")
        for X in combinations(range(size), k):
            cov = 0
            for sub in combinations(X, width):
                cov |= span_bits(sub)
                if cov == full:
                    return list(X)
    raise AssertionError("the whole space is always saturating")


def exhaustive_min_saturating(N: int, q: int, rho: int) -> int:
    return len(exhaustive_min_saturating_set(N, q, rho))
