"""Parameters of the q^m-concatenating lift.

Starting from an [n0, n0 - r0]_q code of covering radius R with n0 <= q + 1,
the lift yields codes with n = n0 q^m + R theta_{m,q} and r = r0 + R m for
every m >= 1.  Only the parameter arithmetic lives here; no lifted matrix is
built.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from satset import bounds
from satset.field import prime_power
from satset.geometry import theta


class LiftPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class LiftedParams:
    n0: int
    r0: int
    q: int
    R: int
    m: int
    n: int
    r: int
    t: int | None  # set when r0 = R + 1, so that r = tR + 1

    def to_dict(self) -> dict:
        return asdict(self)


def lift_params(n0: int, r0: int, q: int, R: int, m: int) -> LiftedParams:
    prime_power(q)
    if m < 1:
        raise LiftPreconditionError(f"lift exponent m must be >= 1 (got {m})")
    if n0 > q + 1:
        raise LiftPreconditionError(f"the lift needs n0 <= q+1, but n0 = {n0} > q+1 = {q + 1}")
    if n0 < 1 or r0 < 1 or R < 1:
        raise LiftPreconditionError("n0, r0 and R must be positive")
    t = m + 1 if r0 == R + 1 else None
    return LiftedParams(n0, r0, q, R, m, n0 * q**m + R * theta(m, q), r0 + R * m, t)


@dataclass
class FamilyEntry:
    params: LiftedParams
    # value of the length bound for r = tR + 1 (monitoring, not asserted)
    length_bound: float | None
    within_bound: bool | None

    def to_dict(self) -> dict:
        d = self.params.to_dict()
        d.update(length_bound=self.length_bound, within_bound=self.within_bound)
        return d


@dataclass
class Family:
    entries: list[FamilyEntry] = field(default_factory=list)
    diagnostic: str | None = None

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries], "diagnostic": self.diagnostic}


def family(n0: int, r0: int, q: int, R: int, t_max: int) -> Family:
    """Lifts for m = 1 .. t_max - 1; empty with a diagnostic if n0 > q + 1."""
    if n0 > q + 1:
        return Family([], f"base length n0 = {n0} exceeds q+1 = {q + 1}; the lift does not apply")
    out = Family()
    for m in range(1, t_max):
        p = lift_params(n0, r0, q, R, m)
        lb = float(bounds.length_bound(q, R, p.t)) if p.t is not None and R >= 3 else None
        out.entries.append(FamilyEntry(p, lb, None if lb is None else p.n <= lb))
    return out


def family_from_result(result, t_max: int) -> Family:
    """Family for a construction result (r0 = R + 1)."""
    return family(result.n, result.R + 1, result.q, result.R, t_max)
