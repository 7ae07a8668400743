"""Constructive subalgebra-extension chains inside coded products.

The builders realize, at desk scale, the stepwise constructions that grow a
subdirectly irreducible subalgebra of a product of hatted boolean algebras
into the whole product (chain_ext1), grow a product of hatted factors by
two-element factors (chain_ext2), and adjoin a single skeletal witness that
behaves like a fresh two-element coordinate (case3_witness_and_iso).  Every
produced carrier is generated with sg() and then independently checked
against its claimed shape with the isomorphism search; nothing about the
construction is trusted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core import ElementSet, FinPSL, extract, f_hat, is_subuniverse, product, sg
from .core import boolean_algebra, sk_join
from .morphisms import Morphism, find_iso_over


class PreconditionError(ValueError):
    """An input violates a documented entry condition of a chain builder."""


@dataclass(frozen=True)
class Shape:
    """Target isomorphism type: a power of 2 times hatted boolean factors."""

    twos: int
    hats: tuple[int, ...]  # atom counts; 0 means another two-element factor

    def build(self) -> FinPSL:
        factors = [boolean_algebra(1) for _ in range(self.twos)]
        factors += [f_hat(t) for t in self.hats]
        return product(factors)

    @property
    def size(self) -> int:
        s = 1 << self.twos
        for t in self.hats:
            s *= (1 << t) + 1 if t >= 1 else 2
        return s

    def __str__(self) -> str:
        parts = ["2"] * self.twos + [f"F^{t}" for t in self.hats]
        return " x ".join(parts) if parts else "1"


@dataclass
class ChainStep:
    name: str
    carrier: ElementSet
    shape: Shape
    iso: Morphism | None
    verified: bool
    added: tuple[int, ...] = ()

    def to_json_dict(self, ambient: FinPSL) -> dict:
        return {
            "name": self.name,
            "carrier": self.carrier.to_list(),
            "carrier_labels": ambient.label_all(self.carrier),
            "shape": str(self.shape),
            "added": ambient.label_all(self.added),
            "iso": self.iso.to_json_dict() if self.iso else None,
            "verified": self.verified,
        }


@dataclass
class ChainReport:
    ambient: FinPSL
    permutation: tuple[int, ...] | None
    steps: list[ChainStep]
    ok: bool
    # (base carrier, adjoined skeletal element) pairs for which the closed
    # normal form below must reproduce the generated carrier
    closed_form_instances: list[tuple[ElementSet, int]] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "ambient_n": self.ambient.n,
            "factor_permutation": list(self.permutation) if self.permutation else None,
            "steps": [s.to_json_dict(self.ambient) for s in self.steps],
            "ok": self.ok,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))


def _hat_atom_count(p: FinPSL) -> int | None:
    """t when p is the t-atom boolean algebra with a top adjoined (t >= 1),
    0 when p is the two-element algebra, None otherwise."""
    if p.n == 2:
        return 0
    t = (p.n - 1).bit_length() - 1
    if (1 << t) + 1 != p.n:
        return None
    if find_iso_over(p, f_hat(t)) is None:
        return None
    return t


def _factor_atom_counts(t: FinPSL) -> list[int]:
    if t.factors is None:
        raise PreconditionError("ambient must be a coded product")
    counts = []
    for f in t.factors:
        c = _hat_atom_count(f)
        if c is None:
            raise PreconditionError("every factor must be 2 or a hatted boolean algebra")
        counts.append(c)
    return counts


def _verify_step(ambient: FinPSL, step: ChainStep) -> None:
    sub, _ = extract(ambient, step.carrier)
    target = step.shape.build()
    iso = find_iso_over(target, sub) if target.n == sub.n else None
    step.iso = iso
    step.verified = iso is not None


def _subalgebra_iso_f_hat(p: FinPSL, s: ElementSet) -> int | None:
    """Atom count when the carrier s is isomorphic to some hatted boolean
    algebra (or to 2); None otherwise."""
    sub, _ = extract(p, s)
    return _hat_atom_count(sub)


def subalgebra_skeleton(p: FinPSL, s: ElementSet) -> list[int]:
    star = p.star
    return [x for x in s if star[star[x]] == x]


def subalgebra_dense(p: FinPSL, s: ElementSet) -> list[int]:
    return [x for x in s if p.star[x] == p.zero]


def _max_skeletal(p: FinPSL, sk: list[int]) -> list[int]:
    """Anti-atoms of the boolean algebra formed by the listed skeletals."""
    proper = [x for x in sk if x != p.one]
    return [x for x in proper if not any(p.lt(x, y) for y in proper)]


def closed_form_sg(
    p: FinPSL, base: ElementSet, b: int, ones_skeletals: list[int] | None = None
) -> ElementSet:
    """Closed-form carrier of the subalgebra generated by base and one
    skeletal element b.

    Default form: { ((b^s) v (b*^t)) ^ d : s,t skeletal in base, d dense in
    base }, the normal form obtained by rewriting meet/star terms over the
    enlarged skeleton.  With ones_skeletals given, the three-part union
    base + { d^b^s } + { d^(b^s)* } over the listed skeletals s instead,
    which describes the adjunction of a fresh two-element coordinate.
    """
    if ones_skeletals is not None:
        parts = closed_form_case3_parts(p, base, b, ones_skeletals)
        return ElementSet.of(p.n, parts[0] | parts[1] | parts[2])
    meet, star = p.meet, p.star
    sk = subalgebra_skeleton(p, base)
    dense = subalgebra_dense(p, base)
    out = set()
    for s in sk:
        bs = meet[b][s]
        for t in sk:
            bt = meet[star[b]][t]
            j = star[meet[star[bs]][star[bt]]]
            for d in dense:
                out.add(meet[j][d])
    return ElementSet.of(p.n, out)


def closed_form_case3_parts(
    p: FinPSL, base: ElementSet, b: int, ones_skeletals: list[int]
) -> tuple[frozenset[int], frozenset[int], frozenset[int]]:
    """The three parts of the two-element-coordinate adjunction form:
    (base, meets d^b^s, meets d^(b^s)*)."""
    meet, star = p.meet, p.star
    dense = subalgebra_dense(p, base)
    part2, part3 = set(), set()
    for d in dense:
        for s in ones_skeletals:
            bs = meet[b][s]
            part2.add(meet[d][bs])
            part3.add(meet[d][star[bs]])
    return frozenset(base), frozenset(part2), frozenset(part3)


# ---------------------------------------------------------------------------
# chain_ext1: hatted subalgebra -> full product of hatted factors


def _projection(p: FinPSL, s: ElementSet, k: int) -> set[int]:
    coding = p.coding
    return {coding.index_to_tuple(x)[k] for x in s}


def _vector(p: FinPSL, coords) -> int:
    return p.coding.tuple_to_index(tuple(coords))


def _reorder_product(t: FinPSL, s: ElementSet, perm: list[int]):
    factors = [t.factors[i] for i in perm]
    t2 = product(factors)
    remap = {}
    for x in range(t.n):
        tup = t.coding.index_to_tuple(x)
        remap[x] = t2.coding.tuple_to_index(tuple(tup[i] for i in perm))
    s2 = ElementSet.of(t2.n, (remap[x] for x in s))
    return t2, s2


def chain_ext1(t: FinPSL, s: ElementSet) -> ChainReport:
    """Grow a subalgebra isomorphic to a single hatted boolean algebra into
    the whole product of hatted factors, one verified step at a time.

    The chain has entries T0..T2q: the first q steps adjoin the dense and
    skeletal coordinate witnesses that add one factor each, the last q
    phases enlarge each factor to its full atom count by repeatedly
    adjoining a single skeletal element strictly between an anti-atom of the
    current skeleton and the matching dense coordinate vector.  Factors are
    reordered up front so the first projection is faithful and projection
    sizes decrease; the permutation is recorded.
    """
    f_counts = _factor_atom_counts(t)
    if any(c < 1 for c in f_counts):
        raise PreconditionError("chain_ext1 factors must be hatted (atom count >= 1)")
    if not is_subuniverse(t, s):
        raise PreconditionError("s is not a subalgebra carrier")
    s_atoms = _subalgebra_iso_f_hat(t, s)
    if s_atoms is None:
        raise PreconditionError("s must be isomorphic to 2 or to a hatted boolean algebra")
    q = len(f_counts)

    report = ChainReport(ambient=t, permutation=None, steps=[], ok=True)

    def push(name, carrier, shape, added=()):
        step = ChainStep(name, carrier, shape, None, False, tuple(added))
        _verify_step(report.ambient, step)
        report.steps.append(step)
        if not step.verified:
            report.ok = False
        return carrier

    if q == 1:
        push("T0", s, Shape(0, (s_atoms,)))
        if s_atoms == 0:
            proper = [d for d in subalgebra_dense(t, ElementSet.full(t.n)) if d != t.one]
            d = min(proper)
            cur = push("T1", sg(t, list(s) + [d]), Shape(0, (1,)), added=(d,))
        else:
            cur = push("T1", s, Shape(0, (s_atoms,)))
        push("T2", ElementSet.full(t.n), Shape(0, tuple(f_counts)))
        return report

    # factor reordering: put a faithful projection first, sizes decreasing
    sizes = [len(_projection(t, s, k)) for k in range(q)]
    perm = sorted(range(q), key=lambda k: (-sizes[k], k))
    if sizes[perm[0]] != len(s):
        raise PreconditionError("no projection is faithful on s")
    t2, s2 = _reorder_product(t, s, perm)
    report.ambient = t2
    report.permutation = tuple(perm)
    f_counts = [f_counts[i] for i in perm]
    t = t2
    s = s2

    e_of = [t.factors[k].n - 2 for k in range(q)]  # index of e in each factor
    one_of = [t.factors[k].n - 1 for k in range(q)]

    def coord_vec(values: dict[int, int]) -> int:
        return _vector(t, [values.get(k, one_of[k]) for k in range(q)])

    # the distinguished dense element of s (the top when s is the
    # two-element algebra)
    if s_atoms == 0:
        d_idx = t.one
    else:
        proper = [d for d in subalgebra_dense(t, s) if d != t.one]
        if len(proper) != 1:
            raise PreconditionError("hatted subalgebra must have one proper dense element")
        d_idx = proper[0]
    d_tuple = t.coding.index_to_tuple(d_idx)

    # claimed atom count per factor after the first phase
    g = [0] * q
    g[0] = s_atoms if s_atoms > 0 else 1
    for k in range(1, q):
        size = len(_projection(t, s, k))
        if d_tuple[k] == e_of[k]:
            g[k] = (size - 1).bit_length() - 1  # size = 2^g + 1
        else:
            g[k] = size.bit_length() - 1  # hat of a boolean projection
    r_count = sum(1 for k in range(q) if d_tuple[k] == e_of[k]) if s_atoms > 0 else 0

    cur = push("T0", s, Shape(0, (s_atoms,)))
    if s_atoms == 0:
        d0 = coord_vec({0: e_of[0]})
        cur = push("T1", sg(t, list(cur) + [d0]), Shape(0, (1,)), added=(d0,))
    else:
        cur = push("T1", cur, Shape(0, (g[0],)))

    for k in range(1, q):
        witnesses = [coord_vec({k: e_of[k]}), coord_vec({k: t.factors[k].zero})]
        if k == 1 and r_count >= 2:
            witnesses.append(coord_vec({0: e_of[0]}))
        new = [w for w in witnesses if w not in cur]
        cur = push(
            f"T{k + 1}",
            sg(t, list(cur) + witnesses),
            Shape(0, tuple(g[: k + 1])),
            added=tuple(new),
        )

    # enlargement phases: bring factor j from g[j] atoms up to f(j)
    sk_full = t.skeleton
    full_max = _max_skeletal(t, list(sk_full))
    counts = list(g)
    for j in range(q):
        d_coord = coord_vec({j: e_of[j]})
        m = 0
        while counts[j] < f_counts[j]:
            m += 1
            sk_cur = subalgebra_skeleton(t, cur)
            anti = _max_skeletal(t, sk_cur)
            bs = [
                b
                for b in anti
                if t.lt(b, d_coord) and b not in full_max
            ]
            if not bs:
                report.ok = False
                push(f"T{q + j + 1}", cur, Shape(0, tuple(counts)))
                return report
            b = min(bs)
            cands = [
                y
                for y in sk_full
                if t.lt(b, y) and t.lt(y, d_coord) and t.lt(sk_join(t, b, t.star[y]), d_coord)
            ]
            if not cands:
                report.ok = False
                push(f"T{q + j + 1}", cur, Shape(0, tuple(counts)))
                return report
            bbar = min(cands)
            base = cur
            counts[j] += 1
            name = (
                f"T{q + j + 1}"
                if counts[j] == f_counts[j]
                else f"T{q + j + 1}[{m}]"
            )
            cur = push(name, sg(t, list(cur) + [bbar]), Shape(0, tuple(counts)), added=(bbar,))
            report.closed_form_instances.append((base, bbar))
        if counts[j] == f_counts[j] and (not report.steps or report.steps[-1].name != f"T{q + j + 1}"):
            cur = push(f"T{q + j + 1}", cur, Shape(0, tuple(counts)))

    if cur.mask != ElementSet.full(t.n).mask:
        report.ok = False
    return report


# ---------------------------------------------------------------------------
# chain_ext2: adjoin the two-element factors one at a time


def chain_ext2(t: FinPSL, s: ElementSet) -> ChainReport:
    """Grow a subalgebra isomorphic to the hatted part of a product
    2^p x (hatted factors) by one two-element factor per step.

    Step k adjoins the vector with k ones, then p-k zeros, then ones: these
    all lie outside s because every proper element of s sits below a proper
    dense element and therefore has some hatted coordinate below e.
    """
    if t.factors is None:
        raise PreconditionError("ambient must be a coded product")
    counts = _factor_atom_counts(t)
    p_count = 0
    while p_count < len(counts) and counts[p_count] == 0:
        p_count += 1
    hat_counts = counts[p_count:]
    if p_count == 0 or not hat_counts or any(c < 1 for c in hat_counts):
        raise PreconditionError(
            "chain_ext2 needs two-element factors followed by hatted factors"
        )
    if not is_subuniverse(t, s):
        raise PreconditionError("s is not a subalgebra carrier")
    q = len(hat_counts)

    # all-ones guard: only the top of s may have every hatted coordinate 1
    coding = t.coding
    for x in s:
        tup = coding.index_to_tuple(x)
        if x != t.one and all(
            tup[p_count + i] == t.factors[p_count + i].n - 1 for i in range(q)
        ):
            raise PreconditionError(
                "s contains a proper element with all hatted coordinates 1"
            )

    sub, _ = extract(t, s)
    target = Shape(0, tuple(hat_counts))
    if sub.n != target.size or find_iso_over(target.build(), sub) is None:
        raise PreconditionError("s must be isomorphic to the product of hatted factors")

    report = ChainReport(ambient=t, permutation=None, steps=[], ok=True)

    def push(name, carrier, shape, added=()):
        step = ChainStep(name, carrier, shape, None, False, tuple(added))
        _verify_step(t, step)
        report.steps.append(step)
        if not step.verified:
            report.ok = False
        return carrier

    cur = push("T0", s, Shape(0, tuple(hat_counts)))
    for k in range(p_count):
        coords = [1] * k + [0] * (p_count - k) + [f.n - 1 for f in t.factors[p_count:]]
        b_k = coding.tuple_to_index(tuple(coords))
        base = cur
        cur = push(
            f"T{k + 1}",
            sg(t, list(cur) + [b_k]),
            Shape(k + 1, tuple(hat_counts)),
            added=(b_k,),
        )
        report.closed_form_instances.append((base, b_k))
    if cur.mask != ElementSet.full(t.n).mask:
        report.ok = False
    return report


# ---------------------------------------------------------------------------
# case 3 witness: a skeletal element acting as a fresh two-element coordinate


@dataclass
class Case3Result:
    b: int
    s_prime: ElementSet
    h: tuple[int, ...]  # ambient index map realizing the isomorphism onto s_prime
    q_factor: int
    atom: int
    checks: dict[str, bool]

    def to_json_dict(self, ambient: FinPSL) -> dict:
        return {
            "b": ambient.label(self.b),
            "s_prime": ambient.label_all(self.s_prime),
            "h": list(self.h),
            "q_factor": self.q_factor,
            "atom": ambient.label(self.atom),
            "checks": self.checks,
        }


def _eq7_parameters(p: FinPSL, s: ElementSet):
    """Find the factor index i >= 1 and an atom a of that factor such that
    s = { x : coordinate i of x lies above a iff coordinate 0 equals 1 }.
    Returns (i, atom index within the factor) or None."""
    coding = p.coding
    tuples = [coding.index_to_tuple(x) for x in range(p.n)]
    for i in range(1, len(p.factors)):
        fac = p.factors[i]
        for a in fac.atoms:
            member = [
                x
                for x in range(p.n)
                if (fac.le(a, tuples[x][i])) == (tuples[x][0] == 1)
            ]
            if ElementSet.of(p.n, member).mask == s.mask:
                return i, a
    return None


def case3_witness_and_iso(p: FinPSL, s: ElementSet, t: FinPSL) -> Case3Result | None:
    """Search a skeletal witness b that behaves like the missing two-element
    coordinate, then build and exhaustively verify the piecewise isomorphism.

    p must be a coded product whose first factor is the two-element algebra;
    s is the subalgebra whose 0-coordinate is slaved to one atom of one
    hatted factor; t is the claimed shape of the extension.  Returns None
    when no witness exists (possible when p is too small), raises on inputs
    that break the preconditions outright.
    """
    if t.n > p.n:
        return None
    if p.factors is None:
        raise PreconditionError("p must be a coded product")
    counts = _factor_atom_counts(p)
    if counts[0] != 0 or len(counts) < 2 or any(c < 1 for c in counts[1:]):
        raise PreconditionError("p must be 2 x (hatted factors)")
    if find_iso_over(t, p) is None:
        raise PreconditionError("t must have the same shape as p")
    if not is_subuniverse(p, s):
        raise PreconditionError("s is not a subalgebra carrier")
    params = _eq7_parameters(p, s)
    if params is None:
        raise PreconditionError("s is not slaved to an atom of a hatted factor")
    q_idx, atom = params
    q = len(p.factors) - 1
    coding = p.coding
    meet, star = p.meet, p.star

    def tup(x):
        return coding.index_to_tuple(x)

    # maximal proper dense elements of s, keyed by the factor holding the e
    dense_s = subalgebra_dense(p, s)
    max_dense = {}
    for d in dense_s:
        if d == p.one:
            continue
        if not any(p.lt(d, d2) and d2 != p.one for d2 in dense_s):
            coords = tup(d)
            (k,) = [k for k in range(1, q + 1) if coords[k] == p.factors[k].n - 2]
            max_dense[k] = d
    if set(max_dense) != set(range(1, q + 1)):
        raise PreconditionError("s lacks the expected maximal dense elements")

    # maximal central element of s below each maximal dense element
    sub, positions = extract(p, s)
    central_s = [positions[c] for c in sub.central]
    a_of = {}
    for k, d in max_dense.items():
        below = [c for c in central_s if p.lt(c, d)]
        a_of[k] = max(below, key=lambda c: p.down_sizes[c])
    a_q = a_of[q_idx]

    others = [k for k in range(1, q + 1) if k != q_idx]
    sk_s = subalgebra_skeleton(p, s)
    zero_side = [x for x in s if tup(x)[0] == 0]
    ones_sk = [x for x in sk_s if tup(x)[0] == 1]

    def conditions(b: int) -> bool:
        for k in others:
            if not (p.parallel(b, max_dense[k]) and p.lt(star[b], a_of[k])):
                return False
        if not p.lt(a_q, b):
            return False
        if not p.parallel(meet[b][star[a_q]], max_dense[q_idx]):
            return False
        if not p.lt(sk_join(p, star[b], a_q), max_dense[q_idx]):
            return False
        return all(p.lt(x, b) for x in zero_side if x != b)

    for b in p.skeleton:
        if b in s or not conditions(b):
            continue
        s_prime = sg(p, list(s) + [b])
        if len(s_prime) != t.n:
            continue
        result = _build_case3_map(p, s, b, q_idx, atom, ones_sk, s_prime)
        if result is None:
            continue
        h, checks = result
        return Case3Result(
            b=b,
            s_prime=s_prime,
            h=h,
            q_factor=q_idx,
            atom=atom,
            checks=checks,
        )
    return None


def _build_case3_map(p, s, b, q_idx, atom, ones_sk, s_prime):
    """Piecewise map: identity on s, d^bbar^s -> d^b^s, d^(bbar^s)* ->
    d^(b^s)*, where bbar is the actual fresh coordinate vector of p.
    Verifies well-definedness, the two preservation equations, injectivity
    and that the image is exactly s_prime."""
    meet, star = p.meet, p.star
    coding = p.coding
    bbar = coding.tuple_to_index(
        tuple([0] + [f.n - 1 for f in p.factors[1:]])
    )
    dense_s = subalgebra_dense(p, s)
    h = {x: x for x in s}
    for d in dense_s:
        for sk in ones_sk:
            src1 = meet[d][meet[bbar][sk]]
            val1 = meet[d][meet[b][sk]]
            src2 = meet[d][star[meet[bbar][sk]]]
            val2 = meet[d][star[meet[b][sk]]]
            for src, val in ((src1, val1), (src2, val2)):
                if src in h and h[src] != val:
                    return None  # map would be ill-defined
                h[src] = val
    if len(h) != p.n:
        return None  # the three parts do not cover the ambient carrier
    hmap = tuple(h[x] for x in range(p.n))
    image = set(hmap)
    checks = {
        "total": True,
        "fixes_s": all(hmap[x] == x for x in s),
        "injective": len(image) == p.n,
        "image_is_s_prime": image == set(s_prime),
        "preserves_meet": all(
            hmap[meet[u][v]] == meet[hmap[u]][hmap[v]]
            for u in range(p.n)
            for v in range(u, p.n)
        ),
        "preserves_star": all(hmap[star[u]] == star[hmap[u]] for u in range(p.n)),
    }
    if not all(checks.values()):
        return None
    return hmap, checks
