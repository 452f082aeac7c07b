"""Ground-truth kernel computations, independent of the reduction engine.

Two routes with no shared machinery: exhaustive enumeration over the finite
quotient (exponential, budget-guarded) and an exact scalar-lift kernel that
rewrites each ring entry as its d x d multiplication block over Z/M and
reads generators off a Howell form.  Agreement between the two on every
tractable instance is what certifies guided results elsewhere.
"""

from __future__ import annotations

from itertools import product
from math import gcd
from typing import Iterable, Sequence

from .cyclo_ring import CycloElement, RingDescriptor

Matrix = Sequence[Sequence[CycloElement]]
Vector = list[CycloElement]


class BudgetExceededError(Exception):
    """Enumeration refused; .required carries the exact vector count."""

    def __init__(self, required: int, budget: int):
        super().__init__(
            f"enumeration needs {required} vectors, over the budget of {budget}"
        )
        self.required = required
        self.budget = budget


def search_space_size(M: int, d: int, n: int) -> int:
    """Number of candidate vectors a full enumeration must visit: M**(d*n)."""
    if M < 2 or d < 1 or n < 1:
        raise ValueError("need M >= 2, d >= 1, n >= 1")
    return M ** (d * n)


def _ring_of(B: Matrix) -> RingDescriptor:
    if not B or not B[0]:
        raise ValueError("matrix must be nonempty")
    return B[0][0].ring


def mat_vec(B: Matrix, v: Sequence[CycloElement]) -> Vector:
    ring = _ring_of(B)
    out = []
    for row in B:
        acc = ring.zero
        for x, y in zip(row, v):
            if any(x.coeffs) and any(y.coeffs):
                acc = acc + x * y
        out.append(acc)
    return out


def kernel_membership(B: Matrix, v: Sequence[CycloElement]) -> bool:
    """Whether B*v = 0 exactly, row by row with early exit."""
    ring = _ring_of(B)
    if len(v) != len(B[0]):
        raise ValueError(f"need {len(B[0])} coordinates, got {len(v)}")
    for row in B:
        acc = ring.zero
        for x, y in zip(row, v):
            if any(x.coeffs) and any(y.coeffs):
                acc = acc + x * y
        if any(acc.coeffs):
            return False
    return True


def brute_force_kernel(B: Matrix, budget: int) -> list[Vector]:
    """Every kernel vector, by exhausting all M**(d*n) candidates.

    Vectors come out in enumeration order (first coordinate slowest, the
    all-zero vector first); refuses upfront when the count exceeds budget.
    """
    ring = _ring_of(B)
    if ring.M < 2:
        raise ValueError("enumeration needs a finite quotient (M >= 2)")
    n = len(B[0])
    required = search_space_size(ring.M, ring.d, n)
    if required > budget:
        raise BudgetExceededError(required, budget)
    elements = list(ring.element_iterator())
    hits: list[Vector] = []
    for candidate in product(elements, repeat=n):
        if kernel_membership(B, candidate):
            hits.append(list(candidate))
    return hits


# ---------------------------------------------------------------------------
# Scalar lift: Z[zeta_e]/(M) linear algebra as Z/M linear algebra.


def gcdex(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        return -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def unit_for(a: int, M: int) -> int:
    """A unit u mod M with u*a = gcd(a, M) mod M."""
    a %= M
    g = gcd(a, M)
    if g == M:
        return 1
    reduced = M // g
    u = pow((a // g) % reduced, -1, reduced)
    while gcd(u, M) != 1:
        u += reduced
    return u % M


def howell_form(rows: Iterable[Sequence[int]], M: int) -> list[list[int]]:
    """Canonical row form over Z/M with the span-reading property:

    any span member whose first k entries vanish lies in the span of the
    returned rows whose first k entries vanish.  Pivots divide M, entries
    above a pivot are reduced below it, zero rows are dropped.
    """
    if M < 2:
        raise ValueError("Howell form needs a modulus M >= 2")
    work = [[x % M for x in row] for row in rows]
    work = [row for row in work if any(row)]
    if not work:
        return []
    width = len(work[0])
    if any(len(row) != width for row in work):
        raise ValueError("ragged rows")
    done: list[list[int]] = []
    col = 0
    while col < width and work:
        # fold every nonzero entry in this column into one gcd row
        carry: list[list[int]] = []
        lead = None
        for row in work:
            if row[col] == 0:
                carry.append(row)
                continue
            if lead is None:
                lead = row
                continue
            g, x, y = gcdex(lead[col], row[col])
            a_g, b_g = lead[col] // g, row[col] // g
            merged = [(x * p + y * q) % M for p, q in zip(lead, row)]
            cleared = [(-b_g * p + a_g * q) % M for p, q in zip(lead, row)]
            lead = merged
            if any(cleared):
                carry.append(cleared)
        if lead is not None:
            u = unit_for(lead[col], M)
            lead = [(u * x) % M for x in lead]
            pivot = lead[col]
            # the annihilator multiple stays in the span; keep it in play
            ann = M // gcd(pivot, M)
            extra = [(ann * x) % M for x in lead]
            if any(extra):
                carry.append(extra)
            for row in done:
                q = row[col] // pivot
                if q:
                    row[:] = [(p - q * s) % M for p, s in zip(row, lead)]
            done.append(lead)
        work = [row for row in carry if any(row)]
        col += 1
    return done


def _scalar_matrix(B: Matrix) -> list[list[int]]:
    """The (m*d) x (n*d) matrix over Z/M acting on stacked coefficients."""
    ring = _ring_of(B)
    d = ring.d
    m, n = len(B), len(B[0])
    out = [[0] * (n * d) for _ in range(m * d)]
    for i in range(m):
        for j in range(n):
            block = ring.multiplication_matrix(B[i][j])
            for r in range(d):
                row = out[i * d + r]
                for c in range(d):
                    row[j * d + c] = block[r][c] % ring.M
    return out


def scalar_kernel(A: Sequence[Sequence[int]], M: int, width: int) -> list[list[int]]:
    """Generators of {x : A*x = 0 over Z/M} for an len(A) x width matrix A.

    Row-reduces [A^T | I] to Howell form; rows whose left part vanished
    carry kernel members on the right, and the Howell property makes them
    a generating set.
    """
    rows = len(A)
    stacked = []
    for i in range(width):
        left = [A[r][i] % M for r in range(rows)]
        right = [1 if k == i else 0 for k in range(width)]
        stacked.append(left + right)
    kernel = []
    for row in howell_form(stacked, M):
        if any(row[:rows]):
            continue
        gen = row[rows:]
        if any(gen):
            kernel.append(gen)
    return kernel


def scalar_lift_kernel(B: Matrix) -> list[Vector]:
    """A generating set for {v : B*v = 0} over the quotient ring.

    Exact and polynomial-time: the kernel of B equals the kernel of its
    scalar lift, computed over Z/M and folded back d coefficients at a
    time.  Generators are deduplicated, nonzero, and deterministically
    ordered; the zero kernel comes back as an empty list.
    """
    ring = _ring_of(B)
    if ring.M < 2:
        raise ValueError("scalar lift needs a finite quotient (M >= 2)")
    d = ring.d
    n = len(B[0])
    lifted = _scalar_matrix(B)
    gens = scalar_kernel(lifted, ring.M, n * d)
    folded = set()
    for gen in gens:
        vec = tuple(ring.element(gen[j * d : (j + 1) * d]).coeffs for j in range(n))
        if any(any(c) for c in vec):
            folded.add(vec)
    return [[ring.element(c) for c in vec] for vec in sorted(folded)]


def _stack(vec: Sequence[CycloElement]) -> list[int]:
    out: list[int] = []
    for x in vec:
        out.extend(x.coeffs)
    return out


def in_span(
    ring: RingDescriptor,
    generators: Sequence[Sequence[CycloElement]],
    v: Sequence[CycloElement],
) -> bool:
    """Whether v lies in the module the generators span.

    Works over Z/M: the ring span of a vector equals the Z/M span of its
    zeta-multiples, so reducing v's stacked coefficients against a Howell
    form decides membership exactly (leftover nonzero residue means no).
    """
    target = [c % ring.M for c in _stack(v)]
    if not any(target):
        return True
    if not generators:
        return False
    rows = []
    for gen in generators:
        for k in range(ring.d):
            z = ring.zeta_power(k)
            rows.append(_stack([z * x for x in gen]))
    for row in howell_form(rows, ring.M):
        col = next(i for i, x in enumerate(row) if x)
        q = target[col] // row[col]
        if q:
            target = [(t - q * r) % ring.M for t, r in zip(target, row)]
    return not any(target)


def span_of(ring: RingDescriptor, generators: Sequence[Sequence[CycloElement]]) -> set:
    """The full module generated: closure of zeta-multiples under addition.

    Exponential in general; meant for cross-checking small cases only.
    Elements are returned as tuples of coefficient tuples.
    """
    if not generators:
        return {()}
    n = len(generators[0])
    steps = []
    for gen in generators:
        for k in range(ring.e):
            z = ring.zeta_power(k)
            steps.append(tuple((z * x).coeffs for x in gen))
    zero = tuple(ring.zero.coeffs for _ in range(n))
    seen = {zero}
    frontier = [zero]
    while frontier:
        base = frontier.pop()
        base_elems = [ring.element(c) for c in base]
        for step in steps:
            total = tuple(
                (x + ring.element(c)).coeffs for x, c in zip(base_elems, step)
            )
            if total not in seen:
                seen.add(total)
                frontier.append(total)
    return seen
