"""Named sentences shipped as text assets.

AC1..AC4 axiomatize algebraic closure, EC1..EC5 the extra requirements of
existential closure.  PHI1..PHI5 are the matching open solvability formulas:
each has declared parameters and a guard formula that states the side
conditions under which the matrix is expected to be satisfiable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .core import FinPSL
from .logic import EvalResult, Formula, eval_formula, parse

AC_NAMES = ("AC1", "AC2", "AC3", "AC4")
EC_NAMES = ("EC1", "EC2", "EC3", "EC4", "EC5")
AXIOM_NAMES = AC_NAMES + EC_NAMES
PHI_NAMES = ("PHI1", "PHI2", "PHI3", "PHI4", "PHI5")
SENTENCE_NAMES = AXIOM_NAMES + PHI_NAMES


def sentence_text(name: str) -> str:
    if name not in SENTENCE_NAMES:
        raise KeyError(f"unknown sentence {name!r}")
    return (resources.files("pcsl") / "sentences" / f"{name}.fol").read_text()


def _meta_line(text: str, key: str) -> str | None:
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith(f"# {key}:"):
            return stripped[len(f"# {key}:"):].strip()
    return None


@dataclass(frozen=True)
class OpenSentence:
    name: str
    params: tuple[str, ...]
    guard: Formula | None
    matrix: Formula


@lru_cache(maxsize=None)
def axiom(name: str) -> Formula:
    """The parsed sentence; PHI names yield the open matrix formula."""
    return parse(sentence_text(name), allow_free=name in PHI_NAMES)


@lru_cache(maxsize=None)
def open_sentence(name: str) -> OpenSentence:
    if name not in PHI_NAMES:
        raise KeyError(f"{name!r} is not an open sentence")
    text = sentence_text(name)
    params = tuple((_meta_line(text, "params") or "").split())
    guard_text = _meta_line(text, "guard") or ""
    guard = parse(guard_text, allow_free=True) if guard_text else None
    return OpenSentence(name, params, guard, parse(text, allow_free=True))


def phi_holds(p: FinPSL, name: str, params: dict[str, int]) -> tuple[bool, EvalResult | None]:
    """Evaluate an open solvability formula under explicit parameters.

    Returns (guard_ok, result); the matrix is only evaluated when the guard
    side conditions hold for the parameters.
    """
    s = open_sentence(name)
    if set(params) != set(s.params):
        raise ValueError(f"{name} expects parameters {s.params}")
    if s.guard is not None and not eval_formula(p, s.guard, params):
        return False, None
    return True, eval_formula(p, s.matrix, params)
