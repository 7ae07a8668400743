"""Finite-shadow closure tests: boolean extendability of subalgebras,
extension search over a fixed subalgebra, and whole-algebra classification.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from . import core
from .axioms import AXIOM_NAMES, axiom
from .core import ElementSet, FinPSL, extract, is_subuniverse, sg
from .logic import EvalResult, eval_sentence
from .morphisms import Morphism, find_embedding_over, is_embedding


def subalgebras(p: FinPSL, max_generators: int = 3) -> list[ElementSet]:
    """All subalgebra carriers, enumerated as sg-closures of generator sets.

    Generator sets up to size 3 suffice at the carrier sizes this library
    enumerates; the exhaustive powerset route below cross-checks that claim
    in the test suite.  Deduplicated by carrier bitmask, sorted by size then
    mask for a stable order.
    """
    found = {sg(p, ()).mask}
    gens: list[tuple[int, ...]] = []
    base = list(range(p.n))
    if max_generators >= 1:
        gens += [(x,) for x in base]
    if max_generators >= 2:
        gens += [(x, y) for x in base for y in base if x < y]
    if max_generators >= 3:
        gens += [
            (x, y, z)
            for x in base
            for y in base
            if x < y
            for z in base
            if y < z
        ]
    for g in gens:
        found.add(sg(p, g).mask)
    out = [ElementSet(m, p.n) for m in found]
    out.sort(key=lambda s: (len(s), s.mask))
    return out


def subalgebras_exhaustive(p: FinPSL) -> list[ElementSet]:
    """Brute-force reference: test every subset of the carrier for closure."""
    if p.n > 16:
        raise ValueError("powerset enumeration capped at 16 elements")
    out = []
    for mask in range(1 << p.n):
        s = ElementSet(mask, p.n)
        if p.zero in s and is_subuniverse(p, s):
            out.append(s)
    out.sort(key=lambda s: (len(s), s.mask))
    return out


def is_boolean(p: FinPSL) -> bool:
    """Every element skeletal; equivalently the only dense element is 1."""
    return len(p.skeleton) == p.n


@dataclass
class Theorem1Report:
    holds: bool
    # carriers of subalgebras with no boolean extension inside the algebra
    failures: list[ElementSet]
    # for each subalgebra mask, the smallest boolean carrier extending it
    extensions: dict[int, int | None]


def theorem1_finite(p: FinPSL) -> Theorem1Report:
    """Finite shadow of the subalgebra-extension characterization of
    algebraic closure.

    The characterization extends any finite subalgebra to one shaped like a
    power of 2 times powers of a hatted atomfree boolean algebra.  No finite
    algebra realizes the atomfree factors, and demanding the extension for
    every finite stand-in of them forces their exponent to zero, so the
    executable finite test is: every subalgebra extends inside the algebra
    to a boolean subalgebra (one of shape 2^r, any r with 2^r <= n).
    """
    subs = subalgebras(p)
    boolean_subs = [
        s for s in subs if is_boolean(extract(p, s)[0])
    ]
    failures = []
    extensions: dict[int, int | None] = {}
    for s in subs:
        ext = next((b for b in boolean_subs if s <= b), None)
        extensions[s.mask] = ext.mask if ext is not None else None
        if ext is None:
            failures.append(s)
    return Theorem1Report(holds=not failures, failures=failures, extensions=extensions)


def extend_over_search(
    p: FinPSL, s: ElementSet, t: FinPSL, embed_s_in_t: Morphism
) -> Morphism | None:
    """Find an embedding of t into p that inverts embed_s_in_t on s.

    The image is then a subalgebra of p containing s pointwise, isomorphic
    to t over s.  The search is complete; None means no such extension
    exists inside p.
    """
    sub, positions = extract(p, s)
    if embed_s_in_t.source != sub or embed_s_in_t.target != t:
        raise ValueError("embed_s_in_t must embed the extracted subalgebra into t")
    if not is_embedding(embed_s_in_t):
        raise ValueError("embed_s_in_t is not an embedding")
    fixed = {
        embed_s_in_t.map[pos]: ambient for pos, ambient in enumerate(positions)
    }
    return find_embedding_over(t, p, fixed)


@dataclass
class Classification:
    algebra: FinPSL
    axioms: dict[str, EvalResult]
    is_boolean: bool
    dense_is_trivial: bool
    theorem1: Theorem1Report

    def to_json_dict(self) -> dict:
        return {
            "n": self.algebra.n,
            "axioms": {
                name: {
                    "value": r.value,
                    "witness": r.witness,
                    "counterexample": r.counterexample,
                }
                for name, r in self.axioms.items()
            },
            "is_boolean": self.is_boolean,
            "dense_is_trivial": self.dense_is_trivial,
            "theorem1_finite": self.theorem1.holds,
        }


def classify(p: FinPSL) -> Classification:
    """Evaluate all nine axioms plus the structural flags.

    is_boolean means every element is skeletal.  That implies the only dense
    element is 1, and the implication is asserted; the converse is false in
    general (the pentagon has trivial dense set yet a non-skeletal element),
    so the trivial-dense flag is recorded separately.
    """
    verdicts = {name: eval_sentence(p, axiom(name)) for name in AXIOM_NAMES}
    boolean = is_boolean(p)
    dense_is_one = p.dense.indices == (p.one,)
    if boolean and not dense_is_one:
        raise AssertionError("boolean algebra with a proper dense element")
    return Classification(
        algebra=p,
        axioms=verdicts,
        is_boolean=boolean,
        dense_is_trivial=dense_is_one,
        theorem1=theorem1_finite(p),
    )


def classification_json_line(p: FinPSL, canonical_hex: str, c: Classification) -> str:
    d = {"canonical": canonical_hex}
    d.update(c.to_json_dict())
    return json.dumps(d, sort_keys=True, separators=(",", ":"))


@dataclass
class TransferRecord:
    left: int
    right: int
    axiom: str
    product_value: bool
    factor_values: tuple[bool, bool]

    @property
    def ok(self) -> bool:
        return self.product_value == (self.factor_values[0] and self.factor_values[1])


def product_transfer_check(
    algebras: list[FinPSL], n_pairs: int, seed: int
) -> list[TransferRecord]:
    """Sampled check that each axiom holds in a binary product exactly when
    it holds in both factors.  The seed fully determines the sample; verdict
    evaluations are memoized per algebra and per distinct pair."""
    rng = random.Random(seed)
    single: dict[tuple[int, str], bool] = {}
    paired: dict[tuple[int, int, str], bool] = {}
    records = []
    for _ in range(n_pairs):
        i = rng.randrange(len(algebras))
        j = rng.randrange(len(algebras))
        prod = None
        for name in AXIOM_NAMES:
            for k in (i, j):
                if (k, name) not in single:
                    single[k, name] = eval_sentence(algebras[k], axiom(name)).value
            if (i, j, name) not in paired:
                if prod is None:
                    prod = core.product([algebras[i], algebras[j]])
                paired[i, j, name] = eval_sentence(prod, axiom(name)).value
            records.append(
                TransferRecord(
                    left=i,
                    right=j,
                    axiom=name,
                    product_value=paired[i, j, name],
                    factor_values=(single[i, name], single[j, name]),
                )
            )
    return records
