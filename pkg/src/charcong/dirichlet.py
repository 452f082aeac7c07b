"""Dirichlet characters mod N, their value matrix, and congruence checking.

The unit group (Z/NZ)^* is decomposed into cyclic factors with fixed,
deterministic generators; a character is the tuple of exponents it assigns
to those generators.  All values live in Z[zeta_e] where e is the group
exponent, so the whole pipeline stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import gcd, lcm
from typing import Any, Iterable, Sequence

from .cyclo_ring import CycloElement, RingDescriptor, euler_phi


def _factorize(n: int) -> list[tuple[int, int]]:
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out


def _order_mod(g: int, modulus: int, group_size: int) -> int:
    order = group_size
    for q, _ in _factorize(group_size):
        while order % q == 0 and pow(g, order // q, modulus) == 1:
            order //= q
    return order


def _smallest_primitive_root(p: int, k: int) -> int:
    """Generator of (Z/p^k)^* for an odd prime p: the smallest primitive
    root mod p, bumped by p if it fails to generate mod p^2."""
    phi_p = p - 1
    g = 2
    while _order_mod(g, p, phi_p) != phi_p:
        g += 1
    if k == 1:
        return g
    if pow(g, phi_p, p * p) == 1:
        g += p
    return g


def _crt_lift(residue: int, factor: int, N: int) -> int:
    """x with x = residue mod factor and x = 1 mod N/factor."""
    rest = N // factor
    if rest == 1:
        return residue % N
    inv = pow(rest % factor, -1, factor)
    x = (1 + rest * ((residue - 1) * inv % factor)) % N
    return x


@dataclass(frozen=True)
class UnitGroupStructure:
    """Fixed generator system of (Z/NZ)^* and its discrete-log table."""

    N: int
    generators: tuple[int, ...]
    orders: tuple[int, ...]
    exponent: int

    def dlog(self, x: int) -> tuple[int, ...]:
        """Exponent tuple of a unit x against the generator system."""
        return _dlog_table(self.N, self.generators, self.orders)[x % self.N]

    def is_unit(self, x: int) -> bool:
        return gcd(x, self.N) == 1


_DLOG_CACHE: dict[int, dict[int, tuple[int, ...]]] = {}


def _dlog_table(
    N: int, generators: tuple[int, ...], orders: tuple[int, ...]
) -> dict[int, tuple[int, ...]]:
    table = _DLOG_CACHE.get(N)
    if table is None:
        table = {}
        for exps in product(*(range(o) for o in orders)):
            val = 1
            for g, t in zip(generators, exps):
                val = val * pow(g, t, N) % N
            table[val] = exps
        assert len(table) == euler_phi(N), "generator system must cover the unit group"
        _DLOG_CACHE[N] = table
    return table


_STRUCTURE_CACHE: dict[int, UnitGroupStructure] = {}


def unit_group_structure(N: int) -> UnitGroupStructure:
    """CRT decomposition of (Z/NZ)^* into cyclic factors.

    Odd prime powers contribute their smallest primitive root; the factor 4
    contributes 3; a factor 2^k with k >= 3 contributes -1 and 5 with orders
    2 and 2^(k-2); a bare factor 2 contributes nothing.  Deterministic.
    """
    if N < 2:
        raise ValueError("modulus must be at least 2")
    cached = _STRUCTURE_CACHE.get(N)
    if cached is not None:
        return cached
    generators: list[int] = []
    orders: list[int] = []
    for p, k in _factorize(N):
        q = p**k
        if p == 2:
            if k == 1:
                continue
            if k == 2:
                generators.append(_crt_lift(3, 4, N))
                orders.append(2)
            else:
                generators.append(_crt_lift(q - 1, q, N))
                orders.append(2)
                generators.append(_crt_lift(5, q, N))
                orders.append(2 ** (k - 2))
        else:
            g = _smallest_primitive_root(p, k)
            generators.append(_crt_lift(g, q, N))
            orders.append(euler_phi(q))
    structure = UnitGroupStructure(
        N=N,
        generators=tuple(generators),
        orders=tuple(orders),
        exponent=lcm(*orders) if orders else 1,
    )
    _dlog_table(N, structure.generators, structure.orders)
    _STRUCTURE_CACHE[N] = structure
    return structure


@dataclass(frozen=True)
class DirichletCharacter:
    """A character mod N, encoded by its exponents on the fixed generators.

    chi(g_i) = zeta_e ^ ((e / orders[i]) * exponents[i]).
    """

    N: int
    exponents: tuple[int, ...]
    group: UnitGroupStructure

    def to_json(self) -> dict[str, Any]:
        return {"modulus": self.N, "exponents": list(self.exponents)}


def characters(N: int) -> list[DirichletCharacter]:
    """All phi(N) characters, ordered lexicographically by exponent tuple.

    The trivial character comes first; for a cyclic unit group the list is
    the powers of the character sending the chosen generator to zeta_e.
    """
    group = unit_group_structure(N)
    return [
        DirichletCharacter(N=N, exponents=exps, group=group)
        for exps in product(*(range(o) for o in group.orders))
    ]


def character_power(chi: DirichletCharacter, s: int) -> DirichletCharacter:
    exps = tuple(s * t % o for t, o in zip(chi.exponents, chi.group.orders))
    return DirichletCharacter(N=chi.N, exponents=exps, group=chi.group)


def value_ring(N: int, M: int = 0) -> RingDescriptor:
    """The ring Z[zeta_e]/(M) that character values mod N live in."""
    return RingDescriptor(unit_group_structure(N).exponent, M)


def evaluate(
    chi: DirichletCharacter, x: int, ring: RingDescriptor | None = None
) -> CycloElement:
    """chi(x) as a ring element; zero when gcd(x, N) > 1."""
    group = chi.group
    if ring is None:
        ring = RingDescriptor(group.exponent, 0)
    elif ring.e != group.exponent:
        raise ValueError(
            f"ring has e={ring.e} but characters mod {chi.N} need e={group.exponent}"
        )
    if gcd(x, chi.N) > 1:
        return ring.zero
    t = group.dlog(x)
    e = group.exponent
    k = sum((e // o) * ce * te for o, ce, te in zip(group.orders, chi.exponents, t))
    return ring.zeta_power(k % e)


@dataclass(frozen=True)
class CharacterMatrix:
    """The (N-1) x phi(N) grid with entry(i, j) = chi_j(i - 1), 1-based.

    Row x = 1 is all ones; rows at non-units (including x = 0) are zero.
    """

    N: int
    ring: RingDescriptor
    m: int
    n: int
    entries: tuple[tuple[CycloElement, ...], ...]
    chars: tuple[DirichletCharacter, ...]

    def entry(self, i: int, j: int) -> CycloElement:
        """1-based accessor."""
        return self.entries[i - 1][j - 1]

    def mod(self, M: int) -> "CharacterMatrix":
        """The same matrix with entries reduced into Z[zeta_e]/(M)."""
        ring = RingDescriptor(self.ring.e, M)
        rows = tuple(
            tuple(ring.element(a.coeffs) for a in row) for row in self.entries
        )
        return CharacterMatrix(
            N=self.N, ring=ring, m=self.m, n=self.n, entries=rows, chars=self.chars
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "N": self.N,
            "e": self.ring.e,
            "M": self.ring.M,
            "rows": self.m,
            "cols": self.n,
            "entries": [[a.to_json() for a in row] for row in self.entries],
        }


def character_matrix(N: int) -> CharacterMatrix:
    """Build the character value matrix over Z[zeta_e] (no quotient yet)."""
    chars = characters(N)
    ring = value_ring(N, 0)
    rows = tuple(
        tuple(evaluate(chi, x, ring) for chi in chars) for x in range(N - 1)
    )
    return CharacterMatrix(
        N=N, ring=ring, m=N - 1, n=len(chars), entries=rows, chars=tuple(chars)
    )


def character_matrix_from_json(obj: dict[str, Any]) -> CharacterMatrix:
    mat = character_matrix(int(obj["N"]))
    if int(obj["M"]) != 0:
        mat = mat.mod(int(obj["M"]))
    got = [[tuple(int(c) for c in cell["coeffs"]) for cell in row] for row in obj["entries"]]
    want = [[a.coeffs for a in row] for row in mat.entries]
    if got != want or int(obj["e"]) != mat.ring.e:
        raise ValueError("matrix JSON does not match a character matrix")
    return mat


@dataclass(frozen=True)
class CongruenceVerdict:
    """Outcome of checking sum(alpha_j * chi_j(x)) = 0 mod M.

    matrix_rows covers x in [0, N-2] (the matrix rows); full_period adds
    x = N-1.  failing_x lists every failing residue in [0, N-1].
    """

    full_period: bool
    matrix_rows: bool
    failing_x: tuple[int, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "full_period": self.full_period,
            "matrix_rows": self.matrix_rows,
            "failing_x": list(self.failing_x),
        }


def verify_congruence(
    N: int, M: int, alpha: Sequence[CycloElement | int | str | list | dict]
) -> CongruenceVerdict:
    """Check a candidate congruence vector against every residue mod N."""
    if M < 2:
        raise ValueError("modulus M must be at least 2")
    chars = characters(N)
    if len(alpha) != len(chars):
        raise ValueError(f"need {len(chars)} coefficients, got {len(alpha)}")
    ring = value_ring(N, M)
    coeffs = [ring.coerce(a) for a in alpha]
    failing = []
    for x in range(N):
        total = ring.zero
        for a, chi in zip(coeffs, chars):
            total = total + a * evaluate(chi, x, ring)
        if not total.is_zero():
            failing.append(x)
    return CongruenceVerdict(
        full_period=not failing,
        matrix_rows=all(x > N - 2 for x in failing),
        failing_x=tuple(failing),
    )
