"""Exact arithmetic in GF(q), q = p^e.

Elements are plain integers in ``[0, q)``.  For a prime field the integer is
the residue; for an extension field it is the base-p digit vector of the
polynomial representative, ``idx = sum(c_k * p**k)``, reduced modulo a fixed
monic irreducible polynomial.

All arithmetic goes through precomputed tables, kept both as numpy arrays
(for vectorised work over many points) and as nested lists (for the small
scalar eliminations that dominate rank queries).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

FieldElement = int

MAX_TABLE_Q = 1024


class NotPrimePowerError(ValueError):
    pass


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorisation (n is always small here)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e`` or raise NotPrimePowerError."""
    if not isinstance(q, int) or q < 2:
        raise NotPrimePowerError(f"{q!r} is not a prime power (need an integer q >= 2)")
    f = factorize(q)
    if len(f) != 1:
        evidence = " * ".join(f"{p}^{k}" if k > 1 else str(p) for p, k in sorted(f.items()))
        raise NotPrimePowerError(f"{q} is not a prime power: {q} = {evidence}")
    ((p, e),) = f.items()
    return p, e


# ---------- polynomials over GF(p), coefficient lists low-to-high ----------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        for k, mk in enumerate(m):
            a[shift + k] = (a[shift + k] - c * mk) % p
        _trim(a)
    return a


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    poly = _trim(list(poly))
    deg = len(poly) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if not _poly_mod(poly, list(low) + [1], p):
                return False
    return True


def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree e over GF(p).

    Candidates are ordered by the integer ``sum(c_k * p**k)`` of their lower
    coefficients, i.e. highest non-leading coefficient compared first.
    """
    for v in range(p**e):
        low = [(v // p**k) % p for k in range(e)]
        cand = low + [1]
        if is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError(f"no irreducible polynomial of degree {e} over GF({p})")


def _to_poly(idx: int, p: int, e: int) -> list[int]:
    return [(idx // p**k) % p for k in range(e)]


def _from_poly(c: list[int], p: int) -> int:
    return sum(ck * p**k for k, ck in enumerate(c))


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """GF(p^e) with full operation tables.

    ``modulus`` lists the coefficients of the monic modulus low-to-high,
    including the leading 1; it is empty for prime fields.
    """

    p: int
    e: int
    modulus: tuple[int, ...] = ()
    add_table: np.ndarray = field(init=False, repr=False)
    mul_table: np.ndarray = field(init=False, repr=False)
    neg_table: np.ndarray = field(init=False, repr=False)
    inv_table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        q = self.q
        if q > MAX_TABLE_Q:
            raise ValueError(f"GF({q}) exceeds the table limit q <= {MAX_TABLE_Q}")
        x = np.arange(q)
        if self.e == 1:
            add = (x[:, None] + x[None, :]) % q
            mul = (x[:, None] * x[None, :]) % q
        else:
            digits = np.array([_to_poly(i, self.p, self.e) for i in range(q)])
            weights = self.p ** np.arange(self.e)
            add = ((digits[:, None, :] + digits[None, :, :]) % self.p) @ weights
            mul = self._extension_mul_table()
        neg = np.empty(q, dtype=np.intp)
        inv = np.zeros(q, dtype=np.intp)
        for a in range(q):
            neg[a] = int(np.flatnonzero(add[a] == 0)[0])
            if a:
                inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
        for name, arr in (("add_table", add), ("mul_table", mul), ("neg_table", neg), ("inv_table", inv)):
            arr = np.ascontiguousarray(arr, dtype=np.intp)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "_add", add.tolist())
        object.__setattr__(self, "_mul", mul.tolist())
        object.__setattr__(self, "_neg", neg.tolist())
        object.__setattr__(self, "_inv", inv.tolist())

    def _extension_mul_table(self) -> np.ndarray:
        # exp/log tables from the smallest primitive element
        p, e, q, m = self.p, self.e, self.q, list(self.modulus)

        def mulmod(a: int, b: int) -> int:
            c = _poly_mod(_poly_mul(_to_poly(a, p, e), _to_poly(b, p, e), p), m, p)
            return _from_poly(c, p)

        for g in range(2, q):
            exp = [1]
            x = g
            while x != 1:
                exp.append(x)
                x = mulmod(x, g)
            if len(exp) == q - 1:
                break
        else:
            raise AssertionError("multiplicative group is not cyclic; modulus not irreducible?")
        exp_arr = np.array(exp + exp, dtype=np.intp)
        log = np.zeros(q, dtype=np.intp)
        log[np.array(exp)] = np.arange(q - 1)
        mul = np.zeros((q, q), dtype=np.intp)
        nz = np.arange(1, q)
        mul[1:, 1:] = exp_arr[log[nz][:, None] + log[nz][None, :]]
        return mul

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def is_prime_field(self) -> bool:
        return self.e == 1

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldSpec) and (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))

    def _check(self, *xs: int) -> None:
        for x in xs:
            if not 0 <= x < self.q:
                raise ValueError(f"{x} is not an element of GF({self.q})")

    # scalar operations
    def add(self, a: FieldElement, b: FieldElement) -> FieldElement:
        self._check(a, b)
        return self._add[a][b]

    def sub(self, a: FieldElement, b: FieldElement) -> FieldElement:
        self._check(a, b)
        return self._add[a][self._neg[b]]

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        self._check(a, b)
        return self._mul[a][b]

    def neg(self, a: FieldElement) -> FieldElement:
        self._check(a)
        return self._neg[a]

    def inv(self, a: FieldElement) -> FieldElement:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.q})")
        return self._inv[a]

    def div(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self.mul(a, self.inv(b))

    def pow(self, a: FieldElement, n: int) -> FieldElement:
        self._check(a)
        if n < 0:
            a, n = self.inv(a), -n
        result, base = 1, a
        while n:
            if n & 1:
                result = self._mul[result][base]
            base = self._mul[base][base]
            n >>= 1
        return result

    def elements(self) -> range:
        return range(self.q)

    # vectorised helpers over integer arrays of element indices
    def vadd(self, a, b):
        return self.add_table[a, b]

    def vmul(self, a, b):
        return self.mul_table[a, b]

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Field matrix product of (m x k) and (k x n) index arrays."""
        A = np.asarray(A, dtype=np.intp)
        B = np.asarray(B, dtype=np.intp)
        if self.is_prime_field:
            return (A @ B) % self.p
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.intp)
        for k in range(A.shape[1]):
            out = self.add_table[out, self.mul_table[A[:, k][:, None], B[k][None, :]]]
        return out

    def __repr__(self) -> str:
        if self.e == 1:
            return f"GF({self.q})"
        return f"GF({self.p}^{self.e}, modulus={list(self.modulus)})"


_FIELD_CACHE: dict[tuple[int, tuple[int, ...] | None], FieldSpec] = {}


def make_field(q: int, modulus: tuple[int, ...] | list[int] | None = None) -> FieldSpec:
    """Build GF(q); the default modulus is :func:`smallest_irreducible`."""
    p, e = prime_power(q)
    key = (q, tuple(modulus) if modulus is not None else None)
    if key in _FIELD_CACHE:
        return _FIELD_CACHE[key]
    if e == 1:
        if modulus:
            raise ValueError(f"GF({q}) is a prime field and takes no modulus")
        mod: tuple[int, ...] = ()
    elif modulus is None:
        mod = smallest_irreducible(p, e)
    else:
        mod = tuple(int(c) for c in modulus)
        if len(mod) != e + 1 or mod[-1] != 1 or any(not 0 <= c < p for c in mod):
            raise ValueError(f"modulus {list(mod)} is not a monic degree-{e} polynomial over GF({p})")
        if not is_irreducible(list(mod), p):
            raise ValueError(f"modulus {list(mod)} is reducible over GF({p})")
    f = FieldSpec(p, e, mod)
    _FIELD_CACHE[key] = f
    return f
