"""Finite pseudocomplemented semilattices as index tables.

A p-semilattice is a meet-semilattice with least element 0 carrying a unary
operation * such that x ^ a = 0 iff x <= a*.  Carriers here are the integer
ranges 0..n-1 with precomputed meet and star tables, so every query inside a
quantifier sweep is a table lookup.  The order and the incomparability
relation are derived from the meet table, never stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

SIZE_CAP = 4096


class CapError(ValueError):
    """Raised when a constructor would exceed the configured carrier cap."""


@dataclass(frozen=True)
class Violation:
    """One broken law together with a witness tuple of element indices."""

    law: str
    witness: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.law} at {self.witness}"


class InvalidAlgebraError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


@dataclass(frozen=True)
class ElementSet:
    """Subset of a fixed carrier 0..universe-1, stored as a bitmask."""

    mask: int
    universe: int

    @classmethod
    def of(cls, universe: int, elements) -> "ElementSet":
        mask = 0
        for x in elements:
            if not 0 <= x < universe:
                raise ValueError(f"element {x} outside carrier 0..{universe - 1}")
            mask |= 1 << x
        return cls(mask, universe)

    @classmethod
    def full(cls, universe: int) -> "ElementSet":
        return cls((1 << universe) - 1, universe)

    @classmethod
    def empty(cls, universe: int) -> "ElementSet":
        return cls(0, universe)

    def __contains__(self, x: int) -> bool:
        return bool(self.mask >> x & 1)

    def __iter__(self):
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m &= m - 1

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __le__(self, other: "ElementSet") -> bool:
        return self.mask & ~other.mask == 0

    def __or__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.mask | other.mask, self.universe)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.mask & other.mask, self.universe)

    def __sub__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.mask & ~other.mask, self.universe)

    @cached_property
    def indices(self) -> tuple[int, ...]:
        return tuple(self)

    def to_list(self) -> list[int]:
        return list(self)


@dataclass(frozen=True)
class ProductCoding:
    """Bijection between product indices and coordinate tuples.

    The last factor varies fastest, matching itertools.product order.
    """

    sizes: tuple[int, ...]

    @cached_property
    def strides(self) -> tuple[int, ...]:
        strides = [1] * len(self.sizes)
        for k in range(len(self.sizes) - 2, -1, -1):
            strides[k] = strides[k + 1] * self.sizes[k + 1]
        return tuple(strides)

    def index_to_tuple(self, i: int) -> tuple[int, ...]:
        out = []
        for stride, size in zip(self.strides, self.sizes):
            out.append((i // stride) % size)
        return tuple(out)

    def tuple_to_index(self, coords) -> int:
        if len(coords) != len(self.sizes):
            raise ValueError("coordinate arity mismatch")
        i = 0
        for c, stride, size in zip(coords, self.strides, self.sizes):
            if not 0 <= c < size:
                raise ValueError(f"coordinate {c} outside factor of size {size}")
            i += c * stride
        return i


@dataclass(frozen=True)
class FinPSL:
    """A finite p-semilattice: carrier 0..n-1, meet table, star table, zero.

    Values are immutable after construction; labels and the optional product
    coding are cosmetic and never take part in equality.
    """

    n: int
    meet: tuple[tuple[int, ...], ...]
    star: tuple[int, ...]
    zero: int
    labels: tuple[str, ...] | None = field(default=None, compare=False)
    factors: tuple["FinPSL", ...] | None = field(default=None, compare=False, repr=False)

    @cached_property
    def one(self) -> int:
        return self.star[self.zero]

    def le(self, x: int, y: int) -> bool:
        return self.meet[x][y] == x

    def lt(self, x: int, y: int) -> bool:
        return x != y and self.meet[x][y] == x

    def parallel(self, x: int, y: int) -> bool:
        m = self.meet[x][y]
        return m != x and m != y

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    def label_all(self, xs) -> list[str]:
        return [self.label(x) for x in xs]

    @cached_property
    def coding(self) -> ProductCoding | None:
        if self.factors is None:
            return None
        return ProductCoding(tuple(f.n for f in self.factors))

    @cached_property
    def skeleton(self) -> ElementSet:
        star = self.star
        return ElementSet.of(self.n, (x for x in range(self.n) if star[star[x]] == x))

    @cached_property
    def dense(self) -> ElementSet:
        return ElementSet.of(self.n, (x for x in range(self.n) if self.star[x] == self.zero))

    @cached_property
    def central(self) -> ElementSet:
        out = []
        for c in self.skeleton:
            cs = self.star[c]
            if all(x == self.one for x in range(self.n) if self.le(c, x) and self.le(cs, x)):
                out.append(c)
        return ElementSet.of(self.n, out)

    @cached_property
    def down_sizes(self) -> tuple[int, ...]:
        meet = self.meet
        return tuple(sum(1 for y in range(self.n) if meet[x][y] == y) for x in range(self.n))

    @cached_property
    def atoms(self) -> tuple[int, ...]:
        """Minimal nonzero elements (covers of zero)."""
        nonzero = [x for x in range(self.n) if x != self.zero]
        return tuple(
            x for x in nonzero
            if not any(self.lt(y, x) for y in nonzero)
        )

    def to_json_dict(self) -> dict:
        d = {
            "n": self.n,
            "zero": self.zero,
            "meet": [list(row) for row in self.meet],
            "star": list(self.star),
        }
        if self.labels is not None:
            d["labels"] = list(self.labels)
        return d


def table_violations(meet, star, zero: int) -> list[Violation]:
    """All broken p-semilattice laws, each with a witness.

    Shape errors abort the remaining checks because the tables cannot be
    indexed reliably once sizes disagree.
    """
    n = len(meet)
    shape = []
    if len(star) != n:
        shape.append(Violation("star table length mismatch", (len(star), n)))
    for i, row in enumerate(meet):
        if len(row) != n:
            shape.append(Violation("meet row length mismatch", (i,)))
    entries_ok = all(
        isinstance(v, int) and 0 <= v < n for row in meet for v in row
    ) and all(isinstance(v, int) and 0 <= v < n for v in star)
    if not entries_ok:
        shape.append(Violation("table entry outside carrier", ()))
    if not 0 <= zero < n:
        shape.append(Violation("zero outside carrier", (zero,)))
    if shape:
        return shape

    out = []
    for x in range(n):
        if meet[x][x] != x:
            out.append(Violation("meet not idempotent", (x,)))
    for x in range(n):
        for y in range(x + 1, n):
            if meet[x][y] != meet[y][x]:
                out.append(Violation("meet not commutative", (x, y)))
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if meet[meet[x][y]][z] != meet[x][meet[y][z]]:
                    out.append(Violation("meet not associative", (x, y, z)))
    for x in range(n):
        if meet[zero][x] != zero:
            out.append(Violation("zero not least", (x,)))
    # x ^ a = 0  iff  x <= a*
    for a in range(n):
        sa = star[a]
        for x in range(n):
            if (meet[x][a] == zero) != (meet[x][sa] == x):
                out.append(Violation("pseudocomplement law violated", (x, a)))
    one = star[zero]
    for x in range(n):
        if meet[one][x] != x:
            out.append(Violation("star(zero) not greatest", (x,)))
    return out


def validate(meet, star, zero: int, labels=None) -> FinPSL:
    """Build a FinPSL from raw tables, raising with all violations found."""
    violations = table_violations(meet, star, zero)
    if violations:
        raise InvalidAlgebraError(violations)
    return FinPSL(
        n=len(meet),
        meet=tuple(tuple(row) for row in meet),
        star=tuple(star),
        zero=zero,
        labels=tuple(labels) if labels is not None else None,
    )


def _check_cap(size: int, cap: int | None):
    cap = SIZE_CAP if cap is None else cap
    if size > cap:
        raise CapError(f"carrier size {size} exceeds cap {cap}")


_ATOM_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _subset_label(mask: int, t: int) -> str:
    if mask == 0:
        return "0"
    if mask == (1 << t) - 1:
        return "1"
    return "".join(_ATOM_LETTERS[i] for i in range(t) if mask >> i & 1)


def boolean_algebra(t: int, cap: int | None = None) -> FinPSL:
    """The boolean algebra with t atoms: subsets as bitmasks, meet is
    intersection, star is set complement."""
    if t < 0:
        raise ValueError("atom count must be nonnegative")
    if t > len(_ATOM_LETTERS):
        raise CapError(f"atom count {t} too large")
    n = 1 << t
    _check_cap(n, cap)
    full = n - 1
    meet = tuple(tuple(x & y for y in range(n)) for x in range(n))
    star = tuple(full ^ x for x in range(n))
    labels = tuple(_subset_label(x, t) for x in range(n))
    return FinPSL(n=n, meet=meet, star=star, zero=0, labels=labels)


def hat(p: FinPSL, cap: int | None = None) -> FinPSL:
    """Adjoin a new top element.

    The new top takes star value zero and the old top becomes the maximal
    proper dense element, relabelled "e".
    """
    n = p.n
    _check_cap(n + 1, cap)
    top = n
    meet = [list(row) + [x] for x, row in enumerate(p.meet)]
    meet.append(list(range(n)) + [top])
    star = list(p.star)
    star[p.zero] = top
    star.append(p.zero)
    labels = list(p.labels) if p.labels else [str(i) for i in range(n)]
    if n >= 2:
        labels[p.one] = "e"
    labels.append("1")
    return FinPSL(
        n=n + 1,
        meet=tuple(tuple(row) for row in meet),
        star=tuple(star),
        zero=p.zero,
        labels=tuple(labels),
    )


def f_hat(t: int, cap: int | None = None) -> FinPSL:
    """The t-atom boolean algebra with a new top adjoined; t = 0 gives the
    two-element algebra."""
    if t < 0:
        raise ValueError("atom count must be nonnegative")
    if t == 0:
        return boolean_algebra(1, cap)
    return hat(boolean_algebra(t, cap), cap)


def product(factor_list, cap: int | None = None) -> FinPSL:
    """Direct product with componentwise meet and star.

    The result keeps its factor list, so coordinates stay addressable
    through .coding; labels are coordinate tuples.
    """
    factor_list = tuple(factor_list)
    size = 1
    for f in factor_list:
        size *= f.n
    _check_cap(size, cap)
    if not factor_list:
        return FinPSL(n=1, meet=((0,),), star=(0,), zero=0, labels=("0",))
    coding = ProductCoding(tuple(f.n for f in factor_list))
    tuples = [coding.index_to_tuple(i) for i in range(size)]
    meet = tuple(
        tuple(
            coding.tuple_to_index(
                tuple(f.meet[a][b] for f, a, b in zip(factor_list, tx, ty))
            )
            for ty in tuples
        )
        for tx in tuples
    )
    star = tuple(
        coding.tuple_to_index(tuple(f.star[a] for f, a in zip(factor_list, tx)))
        for tx in tuples
    )
    zero = coding.tuple_to_index(tuple(f.zero for f in factor_list))
    labels = tuple(
        "(" + ",".join(f.label(a) for f, a in zip(factor_list, tx)) + ")"
        for tx in tuples
    )
    return FinPSL(
        n=size, meet=meet, star=star, zero=zero, labels=labels, factors=factor_list
    )


def sk_join(p: FinPSL, a: int, b: int) -> int:
    """Least skeletal upper bound (a* ^ b*)*; both arguments must be skeletal."""
    if a not in p.skeleton or b not in p.skeleton:
        raise ValueError("sk_join arguments must be skeletal")
    return p.star[p.meet[p.star[a]][p.star[b]]]


def sg(p: FinPSL, generators) -> ElementSet:
    """Carrier of the subalgebra generated by the given elements.

    Always contains zero (hence one) and is closed under meet and star,
    computed as a worklist fixpoint.
    """
    current = {p.zero, p.one}
    current.update(generators)
    work = list(current)
    while work:
        x = work.pop()
        sx = p.star[x]
        if sx not in current:
            current.add(sx)
            work.append(sx)
        for y in list(current):
            m = p.meet[x][y]
            if m not in current:
                current.add(m)
                work.append(m)
    return ElementSet.of(p.n, current)


def is_subuniverse(p: FinPSL, carrier: ElementSet) -> bool:
    xs = carrier.indices
    if p.zero not in carrier:
        return False
    return all(p.star[x] in carrier for x in xs) and all(
        p.meet[x][y] in carrier for x in xs for y in xs
    )


def extract(p: FinPSL, carrier: ElementSet) -> tuple[FinPSL, tuple[int, ...]]:
    """Realize a subalgebra carrier as its own FinPSL.

    Returns the reindexed algebra plus the position-to-ambient index map.
    Meet and star restrict because the carrier is closed.
    """
    if not is_subuniverse(p, carrier):
        raise ValueError("carrier is not closed under the operations")
    idx = carrier.indices
    back = {x: k for k, x in enumerate(idx)}
    meet = tuple(tuple(back[p.meet[x][y]] for y in idx) for x in idx)
    star = tuple(back[p.star[x]] for x in idx)
    labels = tuple(p.label(x) for x in idx)
    return (
        FinPSL(n=len(idx), meet=meet, star=star, zero=back[p.zero], labels=labels),
        idx,
    )


def theta_quotient(p: FinPSL, a: int):
    """Quotient by the congruence x ~ y iff a^x = a^y.

    The quotient carrier is {a^x}, meet restricts, the derived complement is
    (a^x)' = a^(x*), and the top is a.  Returns the quotient together with
    the canonical surjection as a Morphism.
    """
    from .morphisms import Morphism

    carrier = sorted({p.meet[a][x] for x in range(p.n)})
    back = {x: k for k, x in enumerate(carrier)}
    meet = tuple(tuple(back[p.meet[x][y]] for y in carrier) for x in carrier)
    # each carrier element m satisfies m = a^m, so m is its own preimage
    star = tuple(back[p.meet[a][p.star[x]]] for x in carrier)
    labels = tuple(p.label(x) for x in carrier)
    q = validate(meet, star, back[p.zero], labels)
    nu = Morphism(
        source=p,
        target=q,
        map=tuple(back[p.meet[a][x]] for x in range(p.n)),
        kind="hom",
    )
    return q, nu


def save_algebra(p: FinPSL, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_algebra(p))


def dumps_algebra(p: FinPSL) -> str:
    return json.dumps(p.to_json_dict(), sort_keys=True, separators=(",", ":")) + "\n"


def loads_algebra(text: str) -> FinPSL:
    d = json.loads(text)
    labels = d.get("labels")
    return validate(d["meet"], d["star"], d["zero"], labels)


def load_algebra(path) -> FinPSL:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_algebra(fh.read())
