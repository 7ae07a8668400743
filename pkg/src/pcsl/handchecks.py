"""Independent hand-coded deciders for the nine axioms.

Each function walks the quantifier prefix with explicit loops, mirroring the
displayed formulas directly instead of going through the sentence parser and
generic evaluator.  They exist purely as a second implementation to check
the DSL route against and stay deliberately plain.
"""

from __future__ import annotations

from .core import FinPSL


def _lt(p, x, y):
    return x != y and p.meet[x][y] == x


def _le(p, x, y):
    return p.meet[x][y] == x


def _par(p, x, y):
    m = p.meet[x][y]
    return m != x and m != y


def _skj(p, a, b):
    return p.star[p.meet[p.star[a]][p.star[b]]]


def check_ac1(p: FinPSL) -> bool:
    n, meet = p.n, p.meet
    for a in range(n):
        for b in range(n):
            ab = meet[a][b]
            for c in range(n):
                if meet[ab][c] != ab:
                    continue
                if not any(
                    _le(p, a, x) and _le(p, b, y) and meet[x][y] == c
                    for x in range(n)
                    for y in range(n)
                ):
                    return False
    return True


def check_ac2(p: FinPSL) -> bool:
    n, meet = p.n, p.meet
    ds = p.dense.indices
    for d1 in ds:
        for d2 in ds:
            for d3 in ds:
                for t in range(n):
                    if not (_lt(p, d1, d2) and _lt(p, d2, d3)):
                        continue
                    if not (
                        _lt(p, meet[t][d1], meet[t][d2])
                        and _lt(p, meet[t][d2], meet[t][d3])
                    ):
                        continue
                    if not any(
                        _lt(p, d1, d4)
                        and _lt(p, d4, d3)
                        and meet[d4][d2] == d1
                        and _lt(p, meet[t][d1], meet[t][d4])
                        and _lt(p, meet[t][d4], meet[t][d3])
                        for d4 in range(n)
                    ):
                        return False
    return True


def check_ac3(p: FinPSL) -> bool:
    n, meet, star = p.n, p.meet, p.star
    ds = p.dense.indices
    sk = p.skeleton.indices
    for d in ds:
        for dm in ds:
            for k in sk:
                for f in range(n):
                    for fm in range(n):
                        for x in range(n):
                            if not (
                                _par(p, d, dm)
                                and _le(p, f, dm)
                                and _le(p, fm, d)
                                and not _le(p, fm, dm)
                                and _le(p, k, d)
                                and not _le(p, meet[star[k]][f], d)
                                and _le(p, star[x], dm)
                            ):
                                continue
                            if not any(
                                _le(p, k, z)
                                and _le(p, z, d)
                                and not _le(p, meet[star[z]][f], d)
                                and not _le(p, meet[z][fm], dm)
                                and _le(p, star[meet[z][x]], dm)
                                for z in sk
                            ):
                                return False
    return True


def check_ac4(p: FinPSL) -> bool:
    for d in p.dense.indices:
        for b1 in p.skeleton.indices:
            if not (_lt(p, b1, d) and _lt(p, d, p.one)):
                continue
            if not any(
                _lt(p, b1, b2) and _lt(p, b2, d) and _lt(p, _skj(p, b1, p.star[b2]), d)
                for b2 in p.skeleton.indices
            ):
                return False
    return True


def check_ec1(p: FinPSL) -> bool:
    sk = p.skeleton.indices
    for b1 in sk:
        for b2 in sk:
            if not _lt(p, b1, b2):
                continue
            if not any(_lt(p, b1, b3) and _lt(p, b3, b2) for b3 in sk):
                return False
    return True


def check_ec2(p: FinPSL) -> bool:
    sk = p.skeleton.indices
    meet, star = p.meet, p.star
    for b1 in sk:
        for b2 in sk:
            for d in p.dense.indices:
                if not (_le(p, b1, b2) and _lt(p, b2, d) and _par(p, star[b1], d)):
                    continue
                if not any(
                    _lt(p, b2, b3)
                    and _lt(p, b3, p.one)
                    and _par(p, meet[star[b1]][b3], d)
                    and _lt(p, _skj(p, b1, star[b3]), d)
                    for b3 in sk
                ):
                    return False
    return True


def check_ec3(p: FinPSL) -> bool:
    return any(_lt(p, d, p.one) for d in p.dense.indices)


def check_ec4(p: FinPSL) -> bool:
    ds = p.dense.indices
    for d1 in ds:
        for d2 in ds:
            if not _lt(p, d1, d2):
                continue
            if not any(_lt(p, d1, d3) and _lt(p, d3, d2) for d3 in range(p.n)):
                return False
    return True


def check_ec5(p: FinPSL) -> bool:
    meet, star = p.meet, p.star
    for b in p.skeleton.indices:
        for d1 in p.dense.indices:
            if not (_lt(p, p.zero, b) and _lt(p, b, d1)):
                continue
            if not any(
                _lt(p, d2, d1)
                and _par(p, b, d2)
                and meet[d1][star[b]] == meet[d2][star[b]]
                for d2 in p.dense.indices
            ):
                return False
    return True


HAND_CHECKS = {
    "AC1": check_ac1,
    "AC2": check_ac2,
    "AC3": check_ac3,
    "AC4": check_ac4,
    "EC1": check_ec1,
    "EC2": check_ec2,
    "EC3": check_ec3,
    "EC4": check_ec4,
    "EC5": check_ec5,
}
