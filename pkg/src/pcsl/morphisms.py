"""Homomorphism checks, embedding/isomorphism search, canonical forms.

The searches are complete backtracking over partial maps with constraint
propagation: placing x -> y immediately forces star(x) -> star(y) and, for
every already placed x', meet(x, x') -> meet(y, y').  Pruning restricts the
candidate targets by cheap isomorphism invariants; candidates are always
tried in increasing target index, so every search is deterministic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .core import FinPSL

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Morphism:
    source: FinPSL
    target: FinPSL
    map: tuple[int, ...]
    kind: str = "hom"  # hom | embedding | isomorphism

    def __call__(self, x: int) -> int:
        return self.map[x]

    def to_json_dict(self) -> dict:
        return {"map": list(self.map), "kind": self.kind}


def is_homomorphism(m: Morphism):
    """Check the three preservation equations; returns (ok, first violation).

    Violations are return data, shaped ("zero", ()), ("meet", (x, y)) or
    ("star", (x,)).
    """
    a, b, f = m.source, m.target, m.map
    if len(f) != a.n or any(not 0 <= y < b.n for y in f):
        return False, ("total", ())
    if f[a.zero] != b.zero:
        return False, ("zero", ())
    for x in range(a.n):
        if f[a.star[x]] != b.star[f[x]]:
            return False, ("star", (x,))
    for x in range(a.n):
        for y in range(x, a.n):
            if f[a.meet[x][y]] != b.meet[f[x]][f[y]]:
                return False, ("meet", (x, y))
    return True, None


def is_embedding(m: Morphism) -> bool:
    ok, _ = is_homomorphism(m)
    return ok and len(set(m.map)) == m.source.n


def is_isomorphism(m: Morphism) -> bool:
    return is_embedding(m) and m.source.n == m.target.n


def _iso_signature(p: FinPSL, x: int) -> tuple:
    return (
        p.down_sizes[x],
        x in p.skeleton,
        x in p.dense,
        x in p.central,
        p.down_sizes[p.star[x]],
    )


def _embed_compatible(a: FinPSL, x: int, b: FinPSL, y: int) -> bool:
    # skeletal/dense flags transfer along embeddings in both directions;
    # order ideals can only grow, centrality can be lost, so neither the
    # central flag nor exact ideal sizes are usable here.
    if (x in a.skeleton) != (y in b.skeleton):
        return False
    if (x in a.dense) != (y in b.dense):
        return False
    return a.down_sizes[x] <= b.down_sizes[y]


class _Search:
    """Backtracking map builder shared by the iso and embedding searches."""

    def __init__(self, a: FinPSL, b: FinPSL, bijective: bool, prune: bool):
        self.a, self.b = a, b
        self.bijective = bijective
        self.forward = [-1] * a.n
        self.used = [False] * b.n
        self.placed: list[int] = []
        if not prune:
            self.candidates = [list(range(b.n)) for _ in range(a.n)]
        elif bijective:
            sig_b = [_iso_signature(b, y) for y in range(b.n)]
            self.candidates = [
                [y for y in range(b.n) if sig_b[y] == _iso_signature(a, x)]
                for x in range(a.n)
            ]
        else:
            self.candidates = [
                [y for y in range(b.n) if _embed_compatible(a, x, b, y)]
                for x in range(a.n)
            ]

    def place(self, x: int, y: int) -> bool:
        """Assign x -> y and propagate all forced consequences.

        Appends every new assignment to self.placed so the caller can undo
        back to a trail mark on failure.
        """
        queue = [(x, y)]
        while queue:
            x, y = queue.pop()
            if self.forward[x] != -1:
                if self.forward[x] != y:
                    return False
                continue
            if self.used[y]:
                return False
            self.forward[x] = y
            self.used[y] = True
            self.placed.append(x)
            queue.append((self.a.star[x], self.b.star[y]))
            for x2 in self.placed:
                y2 = self.forward[x2]
                queue.append((self.a.meet[x][x2], self.b.meet[y][y2]))
        return True

    def undo_to(self, mark: int) -> None:
        while len(self.placed) > mark:
            x = self.placed.pop()
            self.used[self.forward[x]] = False
            self.forward[x] = -1

    def run(self, fixed: dict[int, int]) -> tuple[int, ...] | None:
        a, b = self.a, self.b
        if not self.place(a.zero, b.zero):
            return None
        for x, y in sorted(fixed.items()):
            if not (0 <= x < a.n and 0 <= y < b.n):
                log.debug("fixed pair (%s, %s) outside carriers", x, y)
                return None
            if not self.place(x, y):
                log.debug("fixed map already breaks a preservation equation")
                return None
        order = sorted(range(a.n), key=lambda x: (len(self.candidates[x]), x))

        def extend() -> bool:
            x = next((v for v in order if self.forward[v] == -1), None)
            if x is None:
                return True
            mark = len(self.placed)
            for y in self.candidates[x]:
                if self.used[y]:
                    continue
                if self.place(x, y) and extend():
                    return True
                self.undo_to(mark)
            return False

        if not extend():
            return None
        return tuple(self.forward)


def find_iso_over(
    a: FinPSL, b: FinPSL, fixed: dict[int, int] | None = None, prune: bool = True
) -> Morphism | None:
    """Complete search for an isomorphism a -> b extending the fixed pairs."""
    if a.n != b.n:
        return None
    m = _Search(a, b, bijective=True, prune=prune).run(fixed or {})
    if m is None:
        return None
    mor = Morphism(a, b, m, kind="isomorphism")
    assert is_isomorphism(mor)
    return mor


def find_embedding_over(
    a: FinPSL, b: FinPSL, fixed: dict[int, int] | None = None, prune: bool = True
) -> Morphism | None:
    """Complete search for an injective homomorphism a -> b extending fixed."""
    if a.n > b.n:
        return None
    m = _Search(a, b, bijective=False, prune=prune).run(fixed or {})
    if m is None:
        return None
    mor = Morphism(a, b, m, kind="embedding")
    assert is_embedding(mor)
    return mor


def inverse(m: Morphism) -> Morphism:
    if not is_isomorphism(m):
        raise ValueError("only isomorphisms invert")
    inv = [0] * m.target.n
    for x, y in enumerate(m.map):
        inv[y] = x
    return Morphism(m.target, m.source, tuple(inv), kind="isomorphism")


# ---------------------------------------------------------------------------
# canonical forms


def canonical_form(p: FinPSL) -> bytes:
    """Canonical byte string: equal iff the algebras are isomorphic.

    Minimizes the encoded (meet, star) tables over all labelings that list
    the carrier in linear-extension order of the underlying poset.  That
    family of labelings is isomorphism invariant, and placing every element
    after its whole strict down-set keeps each meet entry exact, so branch
    and bound on the growing meet block is sound.  Star bytes follow the
    meet block and break remaining ties at the leaves.
    """
    if p.n > 255:
        raise ValueError("canonical_form supports carriers up to 255 elements")
    n = p.n
    meet = p.meet
    down_mask = [0] * n
    for x in range(n):
        for y in range(n):
            if y != x and meet[x][y] == y:
                down_mask[x] |= 1 << y

    best: list[int] | None = None
    perm = [-1] * n  # position -> element
    pos_of = [-1] * n
    placed_mask = 0

    def search(k: int, prefix: list[int]):
        nonlocal best, placed_mask
        if k == n:
            cand = prefix + [pos_of[p.star[perm[j]]] for j in range(n)]
            if best is None or cand < best:
                best = cand
            return
        for x in range(n):
            if pos_of[x] != -1 or down_mask[x] & ~placed_mask:
                continue
            perm[k] = x
            pos_of[x] = k
            placed_mask |= 1 << x
            # meet(x, placed) lies in the down-set of x, hence is placed
            cand = prefix + [pos_of[meet[x][perm[j]]] for j in range(k + 1)]
            if best is None or cand <= best[: len(cand)]:
                search(k + 1, cand)
            placed_mask &= ~(1 << x)
            pos_of[x] = -1
            perm[k] = -1

    search(0, [])
    assert best is not None
    return bytes([n]) + bytes(best)
