"""Model checking for local team logics.

The quantifier alternation of the model checking game is resolved by
exhaustive expansion over the finite team; results are memoized on
(subformula identity, team row).  A fresh memo is used per top-level
``check`` call, but an :class:`Evaluator` can be kept around to share the
memo across many queries against the same model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import Assignment, DependenceModel, ModelError
from .syntax import (
    And,
    Anon,
    ATOM_TYPES,
    Dep,
    Eq,
    Excl,
    Exists,
    Forall,
    Formula,
    FormulaError,
    Incl,
    Ind,
    Neq,
    NInd,
    Not,
    Or,
    RelLit,
    is_nnf,
)


@dataclass
class CheckStats:
    atom_evals: int = 0
    quantifier_expansions: int = 0
    memo_hits: int = 0


@dataclass(frozen=True)
class CheckResult:
    value: bool
    stats: CheckStats


def eval_local_atom(beta: Formula, model: DependenceModel, s: Assignment) -> bool:
    """Truth of a single local atom (or literal) at one team assignment."""
    ftype = model.ftype
    team = model.team
    if isinstance(beta, RelLit):
        held = model.structure.holds(beta.rel, model.values(s, beta.args))
        return held if beta.positive else not held
    if isinstance(beta, Eq):
        return model.value(s, beta.left) == model.value(s, beta.right)
    if isinstance(beta, Neq):
        return model.value(s, beta.left) != model.value(s, beta.right)
    if isinstance(beta, Dep):
        idx = [ftype.index(x) for x in beta.over]
        j = ftype.index(beta.target)
        return all(
            t[j] == s[j] for t in team if all(t[i] == s[i] for i in idx)
        )
    if isinstance(beta, Anon):
        idx = [ftype.index(x) for x in beta.over]
        j = ftype.index(beta.target)
        return any(
            t[j] != s[j] for t in team if all(t[i] == s[i] for i in idx)
        )
    if isinstance(beta, (Incl, Excl)):
        li = [ftype.index(x) for x in beta.left]
        ri = [ftype.index(y) for y in beta.right]
        sx = tuple(s[i] for i in li)
        member = any(tuple(t[i] for i in ri) == sx for t in team)
        return member if isinstance(beta, Incl) else not member
    if isinstance(beta, (Ind, NInd)):
        li = [ftype.index(x) for x in beta.left]
        ri = [ftype.index(y) for y in beta.right]
        sx = tuple(s[i] for i in li)
        ind = all(
            any(
                tuple(u[i] for i in li) == sx
                and tuple(u[i] for i in ri) == tuple(t[i] for i in ri)
                for u in team
            )
            for t in team
        )
        return ind if isinstance(beta, Ind) else not ind
    raise FormulaError(f"not a local atom: {type(beta).__name__}")


class Evaluator:
    """Memoizing evaluator bound to one model.  Safe to reuse across many
    formulas: the memo is keyed by subformula identity and row index, so
    sharing subformula objects shares work."""

    def __init__(self, model: DependenceModel):
        self.model = model
        self.stats = CheckStats()
        self._memo: dict[tuple[int, int], bool] = {}
        # memo keys use id(); hold the nodes so ids are never recycled
        self._pinned: dict[int, Formula] = {}
        self._row_index = {row: i for i, row in enumerate(model.team)}

    def truth(self, phi: Formula, s: Assignment) -> bool:
        try:
            i = self._row_index[s]
        except KeyError:
            raise ModelError(f"assignment {s} outside team") from None
        return self._truth_at(phi, i)

    def truth_rows(self, phi: Formula) -> list[bool]:
        """Truth value at every team row, in team order."""
        return [self._truth_at(phi, i) for i in range(len(self.model.team))]

    def _truth_at(self, phi: Formula, i: int) -> bool:
        key = (id(phi), i)
        memo = self._memo
        if key in memo:
            self.stats.memo_hits += 1
            return memo[key]
        self._pinned[id(phi)] = phi
        team = self.model.team
        if isinstance(phi, ATOM_TYPES):
            self.stats.atom_evals += 1
            value = eval_local_atom(phi, self.model, team[i])
        elif isinstance(phi, And):
            value = self._truth_at(phi.left, i) and self._truth_at(phi.right, i)
        elif isinstance(phi, Or):
            value = self._truth_at(phi.left, i) or self._truth_at(phi.right, i)
        elif isinstance(phi, (Forall, Exists)):
            self.stats.quantifier_expansions += 1
            idx = [self.model.ftype.index(x) for x in phi.fixed]
            s = team[i]
            want = isinstance(phi, Exists)
            value = not want
            for j, t in enumerate(team):
                if all(t[k] == s[k] for k in idx):
                    if self._truth_at(phi.body, j) == want:
                        value = want
                        break
        elif isinstance(phi, Not):
            raise FormulaError("checker requires a Not-free formula")
        else:
            raise FormulaError(f"unknown formula node {type(phi).__name__}")
        memo[key] = value
        return value


def check(phi: Formula, model: DependenceModel, s: Assignment) -> CheckResult:
    """Whether ``phi`` holds at assignment ``s`` of the model."""
    if not is_nnf(phi):
        raise FormulaError("checker requires a Not-free formula")
    ev = Evaluator(model)
    value = ev.truth(phi, s)
    return CheckResult(value, ev.stats)


def extension(beta: Formula, model: DependenceModel) -> tuple[Assignment, ...]:
    """The team assignments at which a local atom holds, in team order."""
    return tuple(s for s in model.team if eval_local_atom(beta, model, s))


def check_global_atom(beta: Formula, model: DependenceModel) -> bool:
    """Truth of the global (team-level) variant of a local atom.

    Evaluates the direct team-quantifier definition and cross-checks it
    against the universal closure of the local atom; a mismatch would be an
    implementation bug.
    """
    ftype = model.ftype
    team = model.team

    if isinstance(beta, Dep):
        li = [ftype.index(x) for x in beta.over]
        j = ftype.index(beta.target)
        direct = all(
            s[j] == t[j]
            for s in team
            for t in team
            if all(s[i] == t[i] for i in li)
        )
    elif isinstance(beta, Anon):
        li = [ftype.index(x) for x in beta.over]
        j = ftype.index(beta.target)
        direct = all(
            any(
                all(s[i] == t[i] for i in li) and s[j] != t[j] for t in team
            )
            for s in team
        )
    elif isinstance(beta, Incl):
        li = [ftype.index(x) for x in beta.left]
        ri = [ftype.index(y) for y in beta.right]
        direct = all(
            any(tuple(s[i] for i in li) == tuple(t[i] for i in ri) for t in team)
            for s in team
        )
    elif isinstance(beta, Excl):
        li = [ftype.index(x) for x in beta.left]
        ri = [ftype.index(y) for y in beta.right]
        direct = all(
            tuple(s[i] for i in li) != tuple(t[i] for i in ri)
            for s in team
            for t in team
        )
    elif isinstance(beta, Ind):
        li = [ftype.index(x) for x in beta.left]
        ri = [ftype.index(y) for y in beta.right]
        direct = all(
            any(
                tuple(u[i] for i in li) == tuple(s[i] for i in li)
                and tuple(u[i] for i in ri) == tuple(t[i] for i in ri)
                for u in team
            )
            for s in team
            for t in team
        )
    else:
        raise FormulaError(
            f"no global variant for {type(beta).__name__}"
        )

    # the global atom must coincide with the universal closure of its
    # local variant; a mismatch signals a checker bug
    closed = check(Forall((), beta), model, team[0]).value
    assert direct == closed, "global atom disagrees with universal closure"
    return direct
