"""Exhaustive enumeration of small p-semilattices up to isomorphism.

Every finite p-semilattice is a bounded poset with all binary meets (a
lattice, once finite and bounded) whose pseudocomplements exist, so the
enumerator walks bounded posets instead of raw tables: pick a strict
down-set for each middle element in topological order, adjoin bottom and
top, keep the posets where all meets and all pseudocomplements exist, and
deduplicate by canonical form.  A raw-table oracle for tiny sizes guards
the whole route.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from itertools import product as iproduct

from .closure import Classification, classify
from .core import FinPSL, InvalidAlgebraError, table_violations, validate
from .morphisms import canonical_form

ENUMERATION_CAP = 8
ORACLE_CAP = 5


@dataclass
class CatalogEntry:
    algebra: FinPSL
    canonical: bytes
    classification: Classification | None = None
    provenance: str = "enumerated"

    def to_json_dict(self) -> dict:
        d = self.algebra.to_json_dict()
        d["canonical"] = self.canonical.hex()
        d["provenance"] = self.provenance
        d["classification"] = (
            self.classification.to_json_dict() if self.classification else None
        )
        return d


def _middle_downset_sequences(m: int):
    """Strict down-set masks for posets on m labeled points whose identity
    labeling is a linear extension; every unlabeled poset shows up at least
    once."""
    downs = [0] * m

    def rec(i: int):
        if i == m:
            yield tuple(downs)
            return
        for mask in range(1 << i):
            mm = mask
            closed = True
            while mm:
                j = (mm & -mm).bit_length() - 1
                if downs[j] & ~mask:
                    closed = False
                    break
                mm &= mm - 1
            if closed:
                downs[i] = mask
                yield from rec(i + 1)
        downs[i] = 0

    if m == 0:
        yield ()
    else:
        yield from rec(0)


def _tables_from_downsets(n: int, downs: tuple[int, ...]):
    """Meet and star tables for the bounded poset with the given middle, or
    None when a meet or a pseudocomplement is missing."""
    # element 0 = bottom, 1..n-2 = middle, n-1 = top
    low = [0] * n  # bitmask of lower bounds, self included
    low[0] = 1
    for k, d in enumerate(downs):
        low[k + 1] = (d << 1) | 1 | (1 << (k + 1))
    low[n - 1] = (1 << n) - 1

    def max_of(mask: int) -> int | None:
        mm = mask
        while mm:
            g = mm.bit_length() - 1
            if mask & ~low[g] == 0:
                return g
            mm &= ~(1 << g)
        return None

    meet = [[0] * n for _ in range(n)]
    for x in range(n):
        for y in range(x, n):
            g = max_of(low[x] & low[y])
            if g is None:
                return None
            meet[x][y] = meet[y][x] = g
    star = [0] * n
    for a in range(n):
        zeros = 0
        for y in range(n):
            if meet[y][a] == 0:
                zeros |= 1 << y
        g = max_of(zeros)
        if g is None:
            return None
        star[a] = g
    return meet, star


def enumerate_psl(n_max: int, cap: int = ENUMERATION_CAP) -> list[CatalogEntry]:
    """All p-semilattices with carrier size <= n_max, up to isomorphism."""
    if n_max > cap:
        raise ValueError(f"n_max {n_max} exceeds enumeration cap {cap}")
    entries: list[CatalogEntry] = []
    seen: set[bytes] = set()
    for n in range(1, n_max + 1):
        if n == 1:
            algebras = [FinPSL(1, ((0,),), (0,), 0, labels=("0",))]
        else:
            algebras = []
            for downs in _middle_downset_sequences(n - 2):
                tables = _tables_from_downsets(n, downs)
                if tables is None:
                    continue
                meet, star = tables
                algebras.append(validate(meet, star, 0))
        for p in algebras:
            cf = canonical_form(p)
            if cf in seen:
                continue
            seen.add(cf)
            entries.append(CatalogEntry(algebra=p, canonical=cf))
    entries.sort(key=lambda e: (e.algebra.n, e.canonical))
    return entries


def enumerate_psl_oracle(n_max: int) -> list[CatalogEntry]:
    """Raw-table oracle: sweep all meet tables that are idempotent,
    commutative and have 0 as bottom, filter through full validation with
    the derived star, deduplicate by canonical form.

    The omitted tables could never validate, so the filtered set matches a
    truly unrestricted sweep.
    """
    if n_max > ORACLE_CAP:
        raise ValueError(f"oracle capped at {ORACLE_CAP} elements")
    entries: list[CatalogEntry] = []
    seen: set[bytes] = set()
    for n in range(1, n_max + 1):
        cells = [(x, y) for x in range(1, n) for y in range(x + 1, n)]
        for values in iproduct(range(n), repeat=len(cells)):
            meet = [[0] * n for _ in range(n)]
            for x in range(n):
                meet[x][x] = x
            for (x, y), v in zip(cells, values):
                meet[x][y] = meet[y][x] = v
            star = _derive_star(n, meet)
            if star is None:
                continue
            if table_violations(meet, star, 0):
                continue
            p = validate(meet, star, 0)
            cf = canonical_form(p)
            if cf not in seen:
                seen.add(cf)
                entries.append(CatalogEntry(algebra=p, canonical=cf, provenance="oracle"))
    entries.sort(key=lambda e: (e.algebra.n, e.canonical))
    return entries


def _derive_star(n: int, meet) -> list[int] | None:
    star = [0] * n
    for a in range(n):
        zeros = [y for y in range(n) if meet[y][a] == 0]
        best = None
        for g in zeros:
            if all(meet[z][g] == z for z in zeros):
                best = g
                break
        if best is None:
            return None
        star[a] = best
    return star


def counts_by_size(entries: list[CatalogEntry]) -> dict[int, int]:
    out: dict[int, int] = {}
    for e in entries:
        out[e.algebra.n] = out.get(e.algebra.n, 0) + 1
    return out


# --- persistence --------------------------------------------------------------


class CatalogFormatError(ValueError):
    pass


def dumps_catalog(entries: list[CatalogEntry]) -> str:
    return "".join(
        json.dumps(e.to_json_dict(), sort_keys=True, separators=(",", ":")) + "\n"
        for e in entries
    )


def save_catalog(entries: list[CatalogEntry], path) -> None:
    text = dumps_catalog(entries)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    manifest = {
        "n_max": max((e.algebra.n for e in entries), default=0),
        "count": len(entries),
        "digest": hashlib.sha256(text.encode()).hexdigest(),
    }
    with open(str(path) + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True)
        fh.write("\n")


def load_catalog(path) -> list[CatalogEntry]:
    """Reload a catalog, revalidating every algebra and recomputing every
    canonical form; tampered files are rejected with the failing detail."""
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CatalogFormatError(f"line {lineno}: bad JSON: {exc}") from exc
            try:
                p = validate(d["meet"], d["star"], d["zero"], d.get("labels"))
            except InvalidAlgebraError as exc:
                raise CatalogFormatError(f"line {lineno}: {exc}") from exc
            cf = canonical_form(p)
            if cf.hex() != d["canonical"]:
                raise CatalogFormatError(f"line {lineno}: canonical form mismatch")
            entries.append(
                CatalogEntry(algebra=p, canonical=cf, provenance=d.get("provenance", "loaded"))
            )
    return entries


def classify_all(entries: list[CatalogEntry]) -> None:
    for e in entries:
        e.classification = classify(e.algebra)
