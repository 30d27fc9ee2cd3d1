"""Compact deterministic CDCL SAT solver.

Two-watched-literal propagation, first-UIP clause learning with
non-chronological backjumping, and activity-based decisions with index
tie-breaking.  No restarts and no randomness: identical inputs always take
the identical search path, which keeps run reports reproducible.

Built for the small instances this package generates; for heavy lifting
point the solver bridge at an external solver instead.
"""

from __future__ import annotations

import time
from typing import Iterable, Sequence

SAT = "SAT"
UNSAT = "UNSAT"
UNKNOWN = "UNKNOWN"

_ACTIVITY_RESCALE = 1e100
_DEADLINE_CHECK_PERIOD = 256


class CdclSolver:
    def __init__(self, var_count: int, clauses: Iterable[Sequence[int]]) -> None:
        self.var_count = var_count
        self.assign = [0] * (var_count + 1)  # 0 unassigned / 1 true / -1 false
        self.level = [0] * (var_count + 1)
        self.reason: list[list[int] | None] = [None] * (var_count + 1)
        self.activity = [0.0] * (var_count + 1)
        self.phase = [-1] * (var_count + 1)
        self.seen = bytearray(var_count + 1)
        self.watches: list[list[int]] = [[] for _ in range(2 * var_count + 2)]
        self.clauses: list[list[int]] = []
        self.trail: list[int] = []
        self.qhead = 0
        self.decision_level = 0
        self.decisions = 0
        self.var_inc = 1.0
        self.unsat_at_load = False

        for raw in clauses:
            self._add_clause(raw)

    @staticmethod
    def _lidx(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def _lit_value(self, lit: int) -> int:
        val = self.assign[abs(lit)]
        return val if lit > 0 else -val

    def _add_clause(self, raw: Sequence[int]) -> None:
        seen: dict[int, int] = {}
        lits: list[int] = []
        for lit in raw:
            var = abs(lit)
            if not 1 <= var <= self.var_count:
                raise ValueError(f"literal {lit} out of range for {self.var_count} variables")
            prev = seen.get(var)
            if prev is None:
                seen[var] = lit
                lits.append(lit)
            elif prev != lit:
                return  # tautology
        if not lits:
            self.unsat_at_load = True
            return
        if len(lits) == 1:
            if not self._enqueue(lits[0], None):
                self.unsat_at_load = True
            return
        cref = len(self.clauses)
        self.clauses.append(lits)
        self.watches[self._lidx(lits[0])].append(cref)
        self.watches[self._lidx(lits[1])].append(cref)

    def _enqueue(self, lit: int, reason: list[int] | None) -> bool:
        var = abs(lit)
        val = 1 if lit > 0 else -1
        if self.assign[var] != 0:
            return self.assign[var] == val
        self.assign[var] = val
        self.level[var] = self.decision_level
        self.reason[var] = reason
        self.trail.append(lit)
        return True

    def _propagate(self) -> list[int] | None:
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            fidx = self._lidx(-p)
            wlist = self.watches[fidx]
            keep: list[int] = []
            conflict: list[int] | None = None
            for pos, cref in enumerate(wlist):
                clause = self.clauses[cref]
                if clause[0] == -p:
                    clause[0] = clause[1]
                    clause[1] = -p
                first = clause[0]
                if self._lit_value(first) == 1:
                    keep.append(cref)
                    continue
                moved = False
                for idx in range(2, len(clause)):
                    lit = clause[idx]
                    if self._lit_value(lit) != -1:
                        clause[idx] = clause[1]
                        clause[1] = lit
                        self.watches[self._lidx(lit)].append(cref)
                        moved = True
                        break
                if moved:
                    continue
                keep.append(cref)
                if self._lit_value(first) == -1:
                    conflict = clause
                    keep.extend(wlist[pos + 1 :])
                    break
                self._enqueue(first, clause)
            self.watches[fidx] = keep
            if conflict is not None:
                return conflict
        return None

    def _bump(self, var: int) -> None:
        self.activity[var] += self.var_inc
        if self.activity[var] > _ACTIVITY_RESCALE:
            scale = 1.0 / _ACTIVITY_RESCALE
            for v in range(1, self.var_count + 1):
                self.activity[v] *= scale
            self.var_inc *= scale

    def _analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        learnt: list[int] = [0]
        seen = self.seen
        counter = 0
        p = 0
        index = len(self.trail) - 1
        bt_level = 0
        clause = conflict
        while True:
            for q in clause:
                if p != 0 and q == p:
                    continue
                var = abs(q)
                if not seen[var] and self.level[var] > 0:
                    seen[var] = 1
                    self._bump(var)
                    if self.level[var] >= self.decision_level:
                        counter += 1
                    else:
                        learnt.append(q)
                        if self.level[var] > bt_level:
                            bt_level = self.level[var]
            while not seen[abs(self.trail[index])]:
                index -= 1
            p = self.trail[index]
            index -= 1
            seen[abs(p)] = 0
            counter -= 1
            if counter == 0:
                learnt[0] = -p
                break
            clause = self.reason[abs(p)] or []
        for q in learnt[1:]:
            seen[abs(q)] = 0
        return learnt, bt_level

    def _cancel_until(self, target_level: int) -> None:
        while self.trail and self.level[abs(self.trail[-1])] > target_level:
            lit = self.trail.pop()
            var = abs(lit)
            self.phase[var] = 1 if lit > 0 else -1
            self.assign[var] = 0
            self.reason[var] = None
        self.qhead = len(self.trail)
        self.decision_level = target_level

    def _record(self, learnt: list[int]) -> None:
        if len(learnt) == 1:
            self._enqueue(learnt[0], None)
            return
        best = 1
        for idx in range(2, len(learnt)):
            if self.level[abs(learnt[idx])] > self.level[abs(learnt[best])]:
                best = idx
        learnt[1], learnt[best] = learnt[best], learnt[1]
        cref = len(self.clauses)
        self.clauses.append(learnt)
        self.watches[self._lidx(learnt[0])].append(cref)
        self.watches[self._lidx(learnt[1])].append(cref)
        self._enqueue(learnt[0], learnt)

    def _pick_variable(self) -> int:
        best = 0
        best_act = -1.0
        assign = self.assign
        activity = self.activity
        for var in range(1, self.var_count + 1):
            if assign[var] == 0 and activity[var] > best_act:
                best = var
                best_act = activity[var]
        return best

    def solve(self, deadline: float | None = None) -> tuple[str, list[bool] | None, int]:
        """Returns (status, model, decisions); model is indexed by variable.

        model[0] is unused padding so model[v] is the value of variable v.
        """
        if self.unsat_at_load:
            return UNSAT, None, self.decisions
        if deadline is not None and time.perf_counter() >= deadline:
            return UNKNOWN, None, self.decisions
        since_check = 0
        while True:
            conflict = self._propagate()
            if conflict is not None:
                if self.decision_level == 0:
                    return UNSAT, None, self.decisions
                learnt, bt_level = self._analyze(conflict)
                self._cancel_until(bt_level)
                self._record(learnt)
                self.var_inc /= 0.95
            else:
                var = self._pick_variable()
                if var == 0:
                    model = [False] * (self.var_count + 1)
                    for v in range(1, self.var_count + 1):
                        model[v] = self.assign[v] == 1
                    return SAT, model, self.decisions
                self.decisions += 1
                self.decision_level += 1
                self._enqueue(var if self.phase[var] > 0 else -var, None)
            since_check += 1
            if since_check >= _DEADLINE_CHECK_PERIOD:
                since_check = 0
                if deadline is not None and time.perf_counter() >= deadline:
                    return UNKNOWN, None, self.decisions
