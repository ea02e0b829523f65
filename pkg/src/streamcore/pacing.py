"""Pacing formulas as sets of time points, and the refinement check ``must |= can``.

Refinement is quantified over all input traces, but a formula's denotation is
defined pointwise from which inputs are present, so it suffices to compare the
formulas as propositional functions of one presence row.

Pacing formulas are positive (monotone), which gives a cheap decision
procedure: every valuation satisfying ``must`` contains one of its DNF clauses,
so ``must |= can`` holds iff ``can`` is true on each clause taken as a minimal
valuation.  A failing clause is itself the counterexample.
"""

from __future__ import annotations

from typing import Mapping, Optional

from .model import And, Atom, Or, Pacing, StreamTrace, Top, atoms


class MissingAtom(KeyError):
    pass


def fires(tau: Pacing, row: Mapping[str, bool]) -> bool:
    """Whether the time point described by the presence ``row`` is paced by ``tau``."""
    if isinstance(tau, Atom):
        try:
            return bool(row[tau.name])
        except KeyError:
            raise MissingAtom(tau.name) from None
    if isinstance(tau, Top):
        return True
    if isinstance(tau, And):
        return fires(tau.left, row) and fires(tau.right, row)
    if isinstance(tau, Or):
        return fires(tau.left, row) or fires(tau.right, row)
    raise TypeError(f"not a pacing formula: {tau!r}")


def denotation_times(tau: Pacing, inputs: StreamTrace) -> set:
    names = atoms(tau)
    missing = names - inputs.domain
    if missing:
        raise MissingAtom(sorted(missing)[0])
    return {n for n in range(inputs.horizon) if fires(tau, inputs.presence(n, names))}


def dnf(tau: Pacing) -> list:
    """Clauses (frozensets of atom names) whose disjunction is equivalent to ``tau``."""
    if isinstance(tau, Atom):
        return [frozenset((tau.name,))]
    if isinstance(tau, Top):
        return [frozenset()]
    if isinstance(tau, Or):
        return _absorb(dnf(tau.left) + dnf(tau.right))
    if isinstance(tau, And):
        return _absorb([l | r for l in dnf(tau.left) for r in dnf(tau.right)])
    raise TypeError(f"not a pacing formula: {tau!r}")


def _absorb(clauses: list) -> list:
    # drop clauses that are supersets of another one; keeps the list small
    unique = sorted(set(clauses), key=lambda c: (len(c), sorted(c)))
    kept: list = []
    for c in unique:
        if not any(k <= c for k in kept):
            kept.append(c)
    return kept


def _holds_on(tau: Pacing, true_atoms: frozenset) -> bool:
    if isinstance(tau, Atom):
        return tau.name in true_atoms
    if isinstance(tau, Top):
        return True
    if isinstance(tau, And):
        return _holds_on(tau.left, true_atoms) and _holds_on(tau.right, true_atoms)
    return _holds_on(tau.left, true_atoms) or _holds_on(tau.right, true_atoms)


def counterexample(tau_must: Pacing, tau_can: Pacing) -> Optional[dict]:
    """A presence valuation firing ``tau_must`` but not ``tau_can``, or None if none exists."""
    for clause in dnf(tau_must):
        if not _holds_on(tau_can, clause):
            universe = sorted(atoms(tau_must) | atoms(tau_can))
            return {name: name in clause for name in universe}
    return None


def entails(tau_must: Pacing, tau_can: Pacing) -> bool:
    return counterexample(tau_must, tau_can) is None


def format_valuation(valuation: Mapping[str, bool]) -> str:
    inner = ", ".join(f"{k}: {'present' if v else 'absent'}" for k, v in valuation.items())
    return "{" + inner + "}"
