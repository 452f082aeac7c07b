"""Exact arithmetic in Z[zeta_e] and in the finite quotient Z[zeta_e]/(M).

Elements are dense coefficient vectors on the power basis 1, zeta, ...,
zeta^(d-1) with d = phi(e).  Products are reduced by the e-th cyclotomic
polynomial and then coefficientwise mod M when M > 0.  M = 0 means no
quotient: plain Z[zeta_e] with unreduced integer coefficients.
"""

from __future__ import annotations

import re
import threading
from functools import lru_cache
from itertools import product
from math import gcd
from typing import Any, Iterable, Iterator


class RingError(Exception):
    """Base class for ring arithmetic failures."""


class RingMismatchError(RingError):
    """Operands belong to different ring descriptors."""


class NotInvertibleError(RingError):
    """Inversion was requested for a non-unit."""


class UnsupportedRingError(RingError):
    """The operation needs a finite quotient ring (M > 0)."""


class InvalidAutomorphismError(RingError):
    """Automorphism exponent is not coprime to e."""


def euler_phi(n: int) -> int:
    """Euler's totient of a positive integer."""
    if n < 1:
        raise ValueError("euler_phi needs n >= 1")
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1 if p == 2 else 2
    if m > 1:
        result -= result // m
    return result


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    # den must be monic; the division must leave no remainder.
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    rem = list(num)
    dq = len(num) - len(den)
    if dq < 0:
        raise ValueError("degree of dividend below divisor")
    quot = [0] * (dq + 1)
    for k in range(dq, -1, -1):
        c = rem[k + len(den) - 1]
        quot[k] = c
        if c:
            for i, y in enumerate(den):
                rem[k + i] -= c * y
    if any(rem):
        raise ValueError("division left a remainder")
    return quot


@lru_cache(maxsize=None)
def _cyclotomic(e: int) -> tuple[int, ...]:
    if e == 1:
        return (-1, 1)
    poly = [0] * (e + 1)
    poly[0] = -1
    poly[e] = 1
    for f in range(1, e):
        if e % f == 0:
            poly = _poly_div_exact(poly, list(_cyclotomic(f)))
    return tuple(poly)


def cyclotomic_polynomial(e: int) -> list[int]:
    """Monic coefficient list (ascending) of the e-th cyclotomic polynomial."""
    if e < 1:
        raise ValueError("e must be >= 1")
    return list(_cyclotomic(e))


@lru_cache(maxsize=None)
def _power_table(e: int) -> tuple[tuple[int, ...], ...]:
    # x^k reduced by Phi_e, for every k needed by products (degree 2d-2)
    # and by zeta_power / galois_apply (degree e-1).
    phi = _cyclotomic(e)
    d = len(phi) - 1
    limit = max(e, 2 * d - 1)
    rows: list[tuple[int, ...]] = []
    cur = [1] + [0] * (d - 1)
    for _ in range(limit):
        rows.append(tuple(cur))
        nxt = [0] + cur[:-1]
        lead = cur[-1]
        if lead:
            for t in range(d):
                nxt[t] -= lead * phi[t]
        cur = nxt
    return tuple(rows)


def _det_bareiss(m: list[list[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


class CycloElement:
    """One element of Z[zeta_e] or Z[zeta_e]/(M), in canonical form.

    Immutable.  Two elements are equal iff their rings agree and their
    canonical coefficient tuples agree.
    """

    __slots__ = ("ring", "coeffs", "_hash")

    def __init__(self, ring: "RingDescriptor", coeffs: tuple[int, ...]):
        # Callers go through RingDescriptor.element, which canonicalizes.
        self.ring = ring
        self.coeffs = coeffs
        self._hash = hash((ring.e, ring.M, coeffs))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CycloElement):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return self._hash

    def __add__(self, other: "CycloElement") -> "CycloElement":
        return self.ring.add(self, other)

    def __sub__(self, other: "CycloElement") -> "CycloElement":
        return self.ring.sub(self, other)

    def __neg__(self) -> "CycloElement":
        return self.ring.neg(self)

    def __mul__(self, other: "CycloElement") -> "CycloElement":
        return self.ring.mul(self, other)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_json(self) -> dict[str, list[int]]:
        return {"coeffs": list(self.coeffs)}

    def __repr__(self) -> str:
        return f"<{format_element(self)} in {self.ring!r}>"


class RingDescriptor:
    """Z[zeta_e]/(M) together with the tables element arithmetic needs.

    M = 0 selects the infinite ring Z[zeta_e]; unit tests and inversion
    then refuse to run.  Descriptors compare by value (e, M), so elements
    built by independently constructed but identical descriptors mix freely.
    """

    __slots__ = (
        "e",
        "d",
        "M",
        "min_poly",
        "_pow",
        "_zero",
        "_one",
        "_unit_memo",
        "_inv_memo",
        "_memo_lock",
    )

    def __init__(self, e: int, M: int = 0):
        if e < 1:
            raise ValueError("e must be >= 1")
        if M < 0:
            raise ValueError("M must be >= 0")
        self.e = e
        self.M = M
        self.min_poly = _cyclotomic(e)
        self.d = len(self.min_poly) - 1
        self._pow = _power_table(e)
        self._zero = CycloElement(self, self._canon([0] * self.d))
        self._one = CycloElement(self, self._canon([1] + [0] * (self.d - 1)))
        # Caches are an optimization only; results never depend on hits.
        self._unit_memo: dict[tuple[int, ...], bool] = {}
        self._inv_memo: dict[tuple[int, ...], tuple[int, ...]] = {}
        self._memo_lock = threading.Lock()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RingDescriptor):
            return NotImplemented
        return self.e == other.e and self.M == other.M

    def __hash__(self) -> int:
        return hash((self.e, self.M))

    def __repr__(self) -> str:
        return f"RingDescriptor(e={self.e}, M={self.M})"

    # -- element construction -------------------------------------------

    def _canon(self, coeffs: Iterable[int]) -> tuple[int, ...]:
        cs = list(coeffs)
        if len(cs) != self.d:
            raise ValueError(f"need exactly {self.d} coefficients, got {len(cs)}")
        if self.M > 0:
            return tuple(c % self.M for c in cs)
        return tuple(int(c) for c in cs)

    def element(self, coeffs: Iterable[int]) -> CycloElement:
        return CycloElement(self, self._canon(coeffs))

    @property
    def zero(self) -> CycloElement:
        return self._zero

    @property
    def one(self) -> CycloElement:
        return self._one

    def embed_integer(self, n: int) -> CycloElement:
        return self.element([n] + [0] * (self.d - 1))

    def zeta_power(self, k: int) -> CycloElement:
        return self.element(self._pow[k % self.e])

    def coerce(self, value: Any) -> CycloElement:
        """Accept an element, an integer, a coefficient list, an element
        JSON object, or polynomial text in z."""
        if isinstance(value, CycloElement):
            self._check(value)
            return value
        if isinstance(value, bool):
            raise ValueError("boolean is not a ring element")
        if isinstance(value, int):
            return self.embed_integer(value)
        if isinstance(value, str):
            return parse_element(self, value)
        if isinstance(value, dict):
            if set(value) != {"coeffs"}:
                raise ValueError("element object must have exactly the key 'coeffs'")
            return self.element([int(c) for c in value["coeffs"]])
        if isinstance(value, (list, tuple)):
            return self.element([int(c) for c in value])
        raise ValueError(f"cannot interpret {value!r} as a ring element")

    def _check(self, a: CycloElement) -> None:
        if a.ring != self:
            raise RingMismatchError(f"element of {a.ring!r} used in {self!r}")

    # -- arithmetic ------------------------------------------------------

    def add(self, a: CycloElement, b: CycloElement) -> CycloElement:
        self._check(a)
        self._check(b)
        return self.element([x + y for x, y in zip(a.coeffs, b.coeffs)])

    def sub(self, a: CycloElement, b: CycloElement) -> CycloElement:
        self._check(a)
        self._check(b)
        return self.element([x - y for x, y in zip(a.coeffs, b.coeffs)])

    def neg(self, a: CycloElement) -> CycloElement:
        self._check(a)
        return self.element([-x for x in a.coeffs])

    def mul(self, a: CycloElement, b: CycloElement) -> CycloElement:
        self._check(a)
        self._check(b)
        if a.coeffs == self._one.coeffs:
            return b
        if b.coeffs == self._one.coeffs:
            return a
        d = self.d
        ca, cb = a.coeffs, b.coeffs
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] += x * y
        out = prod[:d]
        for k in range(d, 2 * d - 1):
            c = prod[k]
            if c:
                row = self._pow[k]
                for t in range(d):
                    out[t] += c * row[t]
        return self.element(out)

    def multiplication_matrix(self, a: CycloElement) -> tuple[tuple[int, ...], ...]:
        """The d x d integer matrix of b -> a*b on the power basis.

        Column k holds the coefficients of a * zeta^k; entries are reduced
        mod M when M > 0 (any representative works for determinants mod M).
        """
        self._check(a)
        d = self.d
        cols: list[tuple[int, ...]] = []
        for k in range(d):
            acc = [0] * d
            for i, x in enumerate(a.coeffs):
                if x:
                    row = self._pow[i + k]
                    for t in range(d):
                        acc[t] += x * row[t]
            if self.M > 0:
                acc = [c % self.M for c in acc]
            cols.append(tuple(acc))
        return tuple(tuple(cols[k][t] for k in range(d)) for t in range(d))

    def is_unit(self, a: CycloElement) -> bool:
        """Whether a is invertible: gcd of det(multiplication matrix) and M is 1."""
        if self.M <= 0:
            raise UnsupportedRingError("unit testing needs a finite quotient (M > 0)")
        self._check(a)
        key = a.coeffs
        with self._memo_lock:
            cached = self._unit_memo.get(key)
        if cached is not None:
            return cached
        rows = [list(r) for r in self.multiplication_matrix(a)]
        det = _det_bareiss(rows)
        result = gcd(det, self.M) == 1
        with self._memo_lock:
            self._unit_memo[key] = result
        return result

    def invert(self, a: CycloElement) -> CycloElement:
        """Multiplicative inverse via the adjugate of the multiplication matrix."""
        if self.M <= 0:
            raise UnsupportedRingError("inversion needs a finite quotient (M > 0)")
        self._check(a)
        key = a.coeffs
        with self._memo_lock:
            cached = self._inv_memo.get(key)
        if cached is not None:
            return CycloElement(self, cached)
        mat = self.multiplication_matrix(a)
        det = _det_bareiss([list(r) for r in mat])
        if gcd(det, self.M) != 1:
            raise NotInvertibleError(f"{format_element(a)} is not a unit mod {self.M}")
        det_inv = pow(det % self.M, -1, self.M)
        d = self.d
        out = []
        for i in range(d):
            # b_i = (-1)^i * minor(0, i) * det^-1: first column of the adjugate.
            minor = [
                [mat[r][c] for c in range(d) if c != i] for r in range(1, d)
            ]
            cof = _det_bareiss(minor)
            if i % 2:
                cof = -cof
            out.append(cof * det_inv)
        b = self.element(out)
        with self._memo_lock:
            self._inv_memo[key] = b.coeffs
        return b

    def element_iterator(self) -> Iterator[CycloElement]:
        """All M^d elements in lexicographic coefficient order, c0 varying fastest."""
        if self.M <= 0:
            raise UnsupportedRingError("enumeration needs a finite quotient (M > 0)")
        for rev in product(range(self.M), repeat=self.d):
            yield CycloElement(self, rev[::-1])

    def galois_apply(self, s: int, a: CycloElement) -> CycloElement:
        """The ring automorphism zeta -> zeta^s, for gcd(s, e) = 1."""
        if gcd(s, self.e) != 1:
            raise InvalidAutomorphismError(f"zeta -> zeta^{s} is not an automorphism for e={self.e}")
        self._check(a)
        d = self.d
        out = [0] * d
        for k, x in enumerate(a.coeffs):
            if x:
                row = self._pow[(s * k) % self.e]
                for t in range(d):
                    out[t] += x * row[t]
        return self.element(out)


# -- text and JSON forms --------------------------------------------------

_TERM_SPLIT = re.compile(r"[+-]?[^+-]+")
_TERM = re.compile(r"([+-]?)(\d+)?(?:\*?(z)(?:(?:\^|\*\*)(\d+))?)?\Z")


def parse_element(ring: RingDescriptor, text: str) -> CycloElement:
    """Parse polynomial text in the symbol z, e.g. "4*z - 4"."""
    compact = text.replace(" ", "").replace("\t", "")
    if not compact:
        raise ValueError("empty element text")
    terms = _TERM_SPLIT.findall(compact)
    if "".join(terms) != compact:
        raise ValueError(f"cannot parse element text {text!r}")
    out = [0] * ring.d
    for term in terms:
        m = _TERM.match(term)
        if not m or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"cannot parse term {term!r} in {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = sign * int(m.group(2)) if m.group(2) is not None else sign
        if m.group(3) is None:
            exp = 0
        else:
            exp = int(m.group(4)) if m.group(4) is not None else 1
        row = ring._pow[exp % ring.e]
        for t in range(ring.d):
            out[t] += coeff * row[t]
    return ring.element(out)


def format_element(a: CycloElement, balanced: bool = False) -> str:
    """Polynomial text for an element, highest power first.

    balanced=True shows coefficients in (-M/2, M/2] instead of [0, M).
    """
    ring = a.ring
    parts: list[str] = []
    for k in range(ring.d - 1, -1, -1):
        c = a.coeffs[k]
        if balanced and ring.M > 0 and 2 * c > ring.M:
            c -= ring.M
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        elif k == 1:
            body = "z" if mag == 1 else f"{mag}*z"
        else:
            body = f"z^{k}" if mag == 1 else f"{mag}*z^{k}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    if not parts:
        return "0"
    return " ".join(parts)


def element_from_json(ring: RingDescriptor, obj: Any) -> CycloElement:
    if not isinstance(obj, dict) or set(obj) != {"coeffs"}:
        raise ValueError("element JSON must be an object with exactly the key 'coeffs'")
    return ring.element([int(c) for c in obj["coeffs"]])
