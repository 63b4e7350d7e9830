"""Construction B: step-by-step (R-1)-saturating sets in PG(R, q).

Every step picks a hyperplane skew to the current set and adds R points of
it, each avoiding the spans of all (R-1)-subsets of what is already there.
The first of them (the leading point) is chosen by exact coverage counts.

Working representation
----------------------
For each (R-1)-subset D of the current set we keep a *pencil label* for
every point X of the space.  The hyperplanes through <D> form a pencil of
q + 1 members; the label names the member containing X, or is -1 when
X lies in <D>.  Two points share a hyperplane through D exactly when their
labels agree, so coverage updates, the excluded sets and the per-candidate
counts all reduce to vectorised label comparisons.  Subsets are stored in
colex order, so the subsets of the first n points always form a prefix.
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import asdict, dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from satset import bounds
from satset.field import make_field
from satset.geometry import (
    Hyperplane,
    NoSkewHyperplaneError,
    ProjPoint,
    ProjectiveSpace,
    find_skew_hyperplane,
    nullspace,
    rank,
    theta,
)

log = logging.getLogger(__name__)

LEADING_STRATEGIES = ("argmax", "first_above_average")
TAIL_STRATEGIES = ("first_valid", "greedy")
HYPERPLANE_STRATEGIES = ("lexicographic", "seeded_random")

# cap on elements of one boolean (rows x candidates x targets) block
_BLOCK = 1 << 22


class EmptyCandidateSet(RuntimeError):
    def __init__(self, w: int, i: int):
        super().__init__(f"no admissible point left in step w={w}, sub-step i={i}")
        self.w = w
        self.i = i


class MaxStepsExceeded(RuntimeError):
    def __init__(self, max_steps: int, trace: list):
        super().__init__(f"construction did not finish within {max_steps} steps")
        self.trace = trace


class GeneralPositionError(RuntimeError):
    pass


@dataclass
class ConstructionConfig:
    R: int
    q: int
    leading_strategy: str = "argmax"
    tail_strategy: str = "first_valid"
    hyperplane_strategy: str = "lexicographic"
    seed: int | None = None
    max_steps: int = 10_000
    check_invariants: bool = False

    def __post_init__(self) -> None:
        if self.R < 3:
            raise ValueError(f"R >= 3 required (got R={self.R})")
        make_field(self.q)  # raises NotPrimePowerError
        if self.leading_strategy not in LEADING_STRATEGIES:
            raise ValueError(f"leading_strategy must be one of {LEADING_STRATEGIES}")
        if self.tail_strategy not in TAIL_STRATEGIES:
            raise ValueError(f"tail_strategy must be one of {TAIL_STRATEGIES}")
        if self.hyperplane_strategy not in HYPERPLANE_STRATEGIES:
            raise ValueError(f"hyperplane_strategy must be one of {HYPERPLANE_STRATEGIES}")
        if self.hyperplane_strategy == "seeded_random" and self.seed is None:
            raise ValueError("seeded_random hyperplanes need a seed")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")


@dataclass
class StepTrace:
    w: int
    pi_dual: list[int]
    frak_T_sizes: list[int]
    pi_wi_sizes: list[int]
    chosen: list[int]
    delta_leading: int
    S_w: int
    pi_w1_size: int
    Delta_w: int
    U_before: int
    U_before_on_pi: int
    U_after: int
    # min over uncovered B off the hyperplane of #(union of Gamma-hat sets)
    G_min: int | None
    G_min_lower: float | None
    trajectory_bound: float | None


@dataclass
class SaturatingSetResult:
    points: list[int]
    n: int
    R: int
    q: int
    phase_completed: str
    trace: list[StepTrace]
    final_additions: list[int]
    fallback_reason: str | None = None
    checks_run: int = 0
    violations: list[str] = field(default_factory=list)
    wall_time: float = 0.0
    space: ProjectiveSpace | None = field(default=None, repr=False, compare=False)

    def coords(self) -> list[list[int]]:
        return self.space.vecs(self.points)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("space")
        d["coords"] = self.coords()
        return d


@dataclass
class DeltaCounts:
    counts: dict[int, int]
    union_sizes: dict[int, int]
    S_w: int


def starting_set(R: int, q: int) -> list[ProjPoint]:
    """The R unit points e_1..e_R of PG(R, q)."""
    space = ProjectiveSpace(R, q)
    return [space.point(space.id_of([int(k == u) for k in range(R + 1)])) for u in range(R)]


def frak_B(w: int, i: int, R: int) -> int:
    """Number of (R-1)-subsets of the current set at sub-step i of step w."""
    return comb(w * R + i - 1, R - 1)


class ConstructionState:
    """Current set K, uncovered registry U and the label cache."""

    def __init__(self, space: ProjectiveSpace, R: int):
        if space.N != R:
            raise ValueError(f"Construction B for R={R} lives in PG({R},q), not {space!r}")
        self.space = space
        self.R = R
        self.K: list[int] = []
        self.U = np.ones(space.size, dtype=bool)
        self.w = 0
        self.trace: list[StepTrace] = []
        self._labels = np.empty((0, space.size), dtype=np.int16)
        self._nlabels = 0
        self._keys: list[tuple[int, ...]] = []
        self._dependent: set[int] = set()

    @classmethod
    def start(cls, space: ProjectiveSpace, R: int, points: list[int]) -> "ConstructionState":
        st = cls(space, R)
        for P in points:
            st._append(P)
        st.U = ~covered_mask(space, points, R)
        return st

    @property
    def labels(self) -> np.ndarray:
        return self._labels[: self._nlabels]

    def uncovered_count(self) -> int:
        return int(self.U.sum())

    def _pencil(self, D: list[int]) -> np.ndarray | None:
        sp = self.space
        ann = nullspace(sp.vecs(D), sp.F, sp.dim)
        if len(ann) != 2:
            return None
        v = sp.evaluate(ann)
        F = sp.F
        ratio = F.mul_table[v[1], F.inv_table[v[0]]]
        lab = np.where(v[0] != 0, ratio, np.where(v[1] != 0, sp.q, -1))
        return lab.astype(np.int16)

    def _append(self, P: int) -> None:
        pos = len(self.K)
        self.K.append(int(P))
        self.U[P] = False
        new_rows = []
        for sub in combinations(range(pos), self.R - 2):
            key = sub + (pos,)
            lab = self._pencil([self.K[t] for t in key])
            if lab is None:
                self._dependent.add(self._nlabels + len(new_rows))
                lab = np.full(self.space.size, -2, dtype=np.int16)
            new_rows.append(lab)
            self._keys.append(key)
        if not new_rows:
            return
        need = self._nlabels + len(new_rows)
        if need > len(self._labels):
            grown = np.empty((max(need, 2 * len(self._labels)), self.space.size), dtype=np.int16)
            grown[: self._nlabels] = self._labels[: self._nlabels]
            self._labels = grown
        self._labels[self._nlabels : need] = np.stack(new_rows)
        self._nlabels = need

    def dependent_subsets(self, upto: int | None = None) -> list[tuple[int, ...]]:
        upto = self._nlabels if upto is None else upto
        return [self._keys[j] for j in sorted(self._dependent) if j < upto]


def covered_mask(space: ProjectiveSpace, K: list[int], R: int) -> np.ndarray:
    """Points lying in the span of at most R points of K (direct union of spans)."""
    if len(K) <= R:
        return space.span_mask(space.vecs(K)) if K else np.zeros(space.size, dtype=bool)
    out = np.zeros(space.size, dtype=bool)
    for sub in combinations(K, R):
        out |= space.span_mask(space.vecs(sub))
    return out


def _cover_matrix(L: np.ndarray, cand: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """M[a, b]: some row j puts cand[a] (off <D_j>) and targets[b] on one hyperplane."""
    M = np.zeros((len(cand), len(targets)), dtype=bool)
    if len(cand) == 0 or len(targets) == 0 or len(L) == 0:
        return M
    Lc = L[:, cand]
    Lt = L[:, targets]
    rows = max(1, _BLOCK // (len(cand) * len(targets)))
    for j0 in range(0, len(L), rows):
        c = Lc[j0 : j0 + rows]
        t = Lt[j0 : j0 + rows]
        M |= ((c[:, :, None] == t[:, None, :]) & (c[:, :, None] >= 0)).any(axis=0)
    return M


def update_uncovered(state: ConstructionState, new_points) -> None:
    """Append points one at a time, removing everything they newly cover."""
    sp = state.space
    for P in new_points:
        P = int(P)
        if len(state.K) >= state.R - 1:
            L = state.labels
            lp = L[:, P]
            valid = lp >= 0
            if valid.any():
                hit = (L[valid] == lp[valid, None]).any(axis=0)
                state.U &= ~hit
            for key in state.dependent_subsets():
                D = [state.K[t] for t in key]
                state.U &= ~sp.span_mask(sp.vecs(D + [P]))
        else:
            state.U &= ~sp.span_mask(sp.vecs(state.K + [P]))
        state._append(P)


def build_exclusion(state: ConstructionState, pi_mask: np.ndarray, w: int = 0, i: int = 0):
    """Union of <D> cap Pi over all (R-1)-subsets D, and its complement in Pi."""
    if state.dependent_subsets():
        bad = state.dependent_subsets()[0]
        raise GeneralPositionError(f"points at positions {bad} are not in general position")
    L = state.labels
    frak_T = pi_mask & (L == -1).any(axis=0) if len(L) else np.zeros_like(pi_mask)
    pi_wi = pi_mask & ~frak_T
    if not pi_wi.any():
        raise EmptyCandidateSet(w, i)
    return frak_T, pi_wi


def delta_counts(state: ConstructionState, pi_mask: np.ndarray, pi_w1_mask: np.ndarray) -> DeltaCounts:
    """Exact new-coverage counts for every candidate leading point.

    For uncovered B off Pi and each (R-1)-subset D_j, Sigma = <D_j, B> meets
    Pi in Gamma; Gamma-hat removes <D_j> cap Pi.  A point P of Pi covers B
    exactly when P lies in some Gamma-hat, i.e. when P and B carry the same
    label for some j with P off <D_j>.
    """
    cand = np.flatnonzero(pi_mask)
    targets = np.flatnonzero(state.U & ~pi_mask)
    M = _cover_matrix(state.labels, cand, targets)
    union = M.sum(axis=0)
    in_w1 = pi_w1_mask[cand]
    per_p = M[in_w1].sum(axis=1)
    counts = {int(p): int(c) for p, c in zip(cand[in_w1], per_p)}
    return DeltaCounts(counts, {int(b): int(u) for b, u in zip(targets, union)}, int(per_p.sum()))


def select_leading(counts: dict[int, int], pi_w1, strategy: str = "argmax") -> int:
    if isinstance(pi_w1, np.ndarray) and pi_w1.dtype == bool:
        ids = np.flatnonzero(pi_w1).tolist()
    else:
        ids = sorted(int(p) for p in pi_w1)
    if not ids:
        raise EmptyCandidateSet(0, 1)
    if strategy == "argmax":
        best = max(counts[p] for p in ids)
        return next(p for p in ids if counts[p] == best)
    if strategy == "first_above_average":
        total = sum(counts[p] for p in ids)
        return next(p for p in ids if counts[p] * len(ids) >= total)
    raise ValueError(f"unknown leading strategy {strategy!r}")


def select_tail(state: ConstructionState, pi_wi: np.ndarray, strategy: str = "first_valid") -> int:
    cand = np.flatnonzero(pi_wi)
    if len(cand) == 0:
        raise EmptyCandidateSet(state.w, 0)
    if strategy == "first_valid":
        return int(cand[0])
    if strategy == "greedy":
        gains = _cover_matrix(state.labels, cand, np.flatnonzero(state.U)).sum(axis=1)
        return int(cand[int(np.argmax(gains))])
    raise ValueError(f"unknown tail strategy {strategy!r}")


class _Checker:
    """Per-step invariant suite; violations are collected, not raised."""

    def __init__(self, state: ConstructionState):
        self.state = state
        self.checks = 0
        self.violations: list[str] = []

    def expect(self, ok: bool, what: str) -> None:
        self.checks += 1
        if not ok:
            self.violations.append(what)
            log.warning("invariant violated: %s", what)

    def general_position(self, w: int, i: int) -> None:
        st = self.state
        sp, R = st.space, st.R
        P = st.K[-1]
        bad = next(
            (D for D in combinations(st.K[:-1], R - 1) if rank(sp.vecs(list(D) + [P]), sp.F) != R),
            None,
        )
        self.expect(bad is None, f"w={w} i={i}: point {P} dependent on {bad}")

    def windows(self, w: int, i: int, frak_T: np.ndarray, pi_wi: np.ndarray) -> None:
        R, q = self.state.R, self.state.space.q
        B = frak_B(w, i, R)
        t3, t2 = theta(R - 3, q), theta(R - 2, q)
        big = (q**R - 1) / (q ** (R - 2) - 1)
        nT, nP = int(frak_T.sum()), int(pi_wi.sum())
        if i < R:
            self.expect(t3 <= nT <= B * t3, f"w={w} i={i}: #frak_T={nT} outside [{t3}, {B * t3}]")
            lo = t3 * (big - B)
            self.expect(lo <= nP <= q ** (R - 2) * (q + 1), f"w={w} i={i}: #Pi_wi={nP} outside window")
        else:
            self.expect(t2 <= nT <= B * t3 + q ** (R - 2), f"w={w} i={i}: #frak_T={nT} outside last window")
            lo = t3 * (big - B) - q ** (R - 2)
            self.expect(lo <= nP <= q ** (R - 1), f"w={w} i={i}: #Pi_wR={nP} outside window")

    def nested(self, w: int, i: int, prev_T, frak_T, prev_pi, pi_wi) -> None:
        if prev_T is not None:
            self.expect(not (prev_T & ~frak_T).any(), f"w={w} i={i}: frak_T not nested")
        self.expect(not (pi_wi & ~prev_pi).any(), f"w={w} i={i}: Pi_wi not nested")


def _step(state: ConstructionState, cfg: ConstructionConfig, rng, checker: _Checker | None) -> StepTrace:
    sp, R, q = state.space, state.R, state.space.q
    w = state.w + 1
    U_before = state.uncovered_count()
    K_prev = len(state.K)
    pi: Hyperplane = find_skew_hyperplane(sp, state.K, rng)
    pi_mask = sp.hyperplane_mask(pi)
    U_on_pi = int((state.U & pi_mask).sum())
    frak_T_sizes, pi_wi_sizes, chosen = [], [], []
    prev_T, prev_pi = None, pi_mask
    dc = None
    for i in range(1, R + 1):
        frak_T, pi_wi = build_exclusion(state, pi_mask, w, i)
        frak_T_sizes.append(int(frak_T.sum()))
        pi_wi_sizes.append(int(pi_wi.sum()))
        if checker:
            checker.expect(len(state.labels) == frak_B(w, i, R), f"w={w} i={i}: subset count mismatch")
            checker.windows(w, i, frak_T, pi_wi)
            checker.nested(w, i, prev_T, frak_T, prev_pi, pi_wi)
        if i == 1:
            pi_w1 = pi_wi
            dc = delta_counts(state, pi_mask, pi_w1)
            P = select_leading(dc.counts, pi_w1, cfg.leading_strategy)
        else:
            P = select_tail(state, pi_wi, cfg.tail_strategy)
        update_uncovered(state, [P])
        chosen.append(P)
        if checker:
            checker.general_position(w, i)
        prev_T, prev_pi = frak_T, pi_wi
    state.w = w
    U_after = state.uncovered_count()
    n_w1 = pi_wi_sizes[0]
    G_min = min(dc.union_sizes.values()) if dc.union_sizes else None
    B1 = frak_B(w, 1, R)
    g_low = float(bounds.G_min_lower(w, q, R)) if B1 <= q + 1 else None
    prior = state.trace[-1].trajectory_bound if state.trace else float(q**R)
    traj = None
    if g_low is not None and prior is not None:
        traj = prior * (1 - g_low / (q ** (R - 2) * (q + 1)))
    tr = StepTrace(
        w=w,
        pi_dual=list(pi.dual),
        frak_T_sizes=frak_T_sizes,
        pi_wi_sizes=pi_wi_sizes,
        chosen=chosen,
        delta_leading=dc.counts[chosen[0]],
        S_w=dc.S_w,
        pi_w1_size=n_w1,
        Delta_w=U_before - U_after,
        U_before=U_before,
        U_before_on_pi=U_on_pi,
        U_after=U_after,
        G_min=G_min,
        G_min_lower=g_low,
        trajectory_bound=traj,
    )
    if checker:
        checker.expect(len(state.K) == (w + 1) * R, f"w={w}: #K={len(state.K)} != (w+1)R")
        checker.expect(not (state.U & pi_mask).any(), f"w={w}: hyperplane not fully covered")
        checker.expect(tr.delta_leading * n_w1 >= tr.S_w, f"w={w}: leading point below average")
        checker.expect(tr.Delta_w >= tr.delta_leading + U_on_pi, f"w={w}: Delta_w below delta + #(U cap Pi)")
        checker.expect(K_prev == w * R, f"w={w}: #K_(w-1)={K_prev} != wR")
        if g_low is not None and G_min is not None:
            checker.expect(G_min >= g_low - 1e-9, f"w={w}: G_min={G_min} < lower bound {g_low}")
        if traj is not None:
            checker.expect(U_after <= traj + 1e-9, f"w={w}: #U={U_after} above trajectory {traj:.3f}")
    state.trace.append(tr)
    log.info("step %d: chose %s, #U %d -> %d", w, chosen, U_before, U_after)
    return tr


def run(cfg: ConstructionConfig, verify: bool = True) -> SaturatingSetResult:
    t0 = time.perf_counter()
    R, q = cfg.R, cfg.q
    space = ProjectiveSpace(R, q)
    start = [p.id for p in starting_set(R, q)]
    state = ConstructionState.start(space, R, start)
    checker = _Checker(state) if cfg.check_invariants else None
    rng = random.Random(cfg.seed) if cfg.hyperplane_strategy == "seeded_random" else None
    phase, reason = "full_process", None
    try:
        while state.uncovered_count() > R:
            if state.w >= cfg.max_steps:
                raise MaxStepsExceeded(cfg.max_steps, state.trace)
            _step(state, cfg, rng, checker)
    except (EmptyCandidateSet, NoSkewHyperplaneError) as exc:
        phase, reason = "early_fallback", str(exc)
        log.info("falling back to greedy completion: %s", exc)
    final = []
    while state.U.any():
        P = int(np.flatnonzero(state.U)[0])
        update_uncovered(state, [P])
        final.append(P)
    res = SaturatingSetResult(
        points=list(state.K),
        n=len(state.K),
        R=R,
        q=q,
        phase_completed=phase,
        trace=state.trace,
        final_additions=final,
        fallback_reason=reason,
        checks_run=checker.checks if checker else 0,
        violations=checker.violations if checker else [],
        space=space,
    )
    if verify:
        from satset.verify import is_saturating

        if not is_saturating(space, res.points, R - 1):
            raise AssertionError("constructed set failed the independent saturation check")
    res.wall_time = time.perf_counter() - t0
    return res
