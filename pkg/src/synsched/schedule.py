"""Tick-based schedules: representation, partitioning, validation, baselines.

A schedule maps each Pauli check (data, ancilla, basis) to a positive tick.
Checks sharing a qubit must sit on different ticks.  Appending a check at
its minimum feasible tick (one past the latest conflicting assignment)
keeps that invariant by construction.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliCheck


class SchedulingError(ValueError):
    pass


@dataclass
class Schedule:
    """Assignment of checks to ticks.  Depth = largest assigned tick."""

    assignments: dict[PauliCheck, int] = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return max(self.assignments.values(), default=0)

    def is_complete(self, checks) -> bool:
        return all(c in self.assignments for c in checks)

    def copy(self) -> "Schedule":
        return Schedule(dict(self.assignments))

    def canonical(self) -> tuple:
        """Sorted (data, ancilla, basis, tick) tuples; stable hash/serialization key."""
        return tuple(
            (c.data, c.ancilla, c.basis, t)
            for c, t in sorted(self.assignments.items())
        )

    def shifted(self, offset: int) -> "Schedule":
        return Schedule({c: t + offset for c, t in self.assignments.items()})

    def merged_with(self, other: "Schedule") -> "Schedule":
        overlap = self.assignments.keys() & other.assignments.keys()
        if overlap:
            raise SchedulingError(f"schedules overlap on {len(overlap)} checks")
        merged = dict(self.assignments)
        merged.update(other.assignments)
        return Schedule(merged)

    def to_json_obj(self) -> list[dict]:
        return [
            {"data": c.data, "ancilla": c.ancilla, "basis": c.basis, "tick": t}
            for c, t in sorted(self.assignments.items(), key=lambda kv: (kv[1], kv[0]))
        ]

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_obj(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Schedule":
        with open(path) as fh:
            rows = json.load(fh)
        assignments = {}
        for row in rows:
            check = PauliCheck(data=int(row["data"]), ancilla=int(row["ancilla"]),
                               basis=row["basis"])
            tick = int(row["tick"])
            if tick < 1:
                raise SchedulingError(f"tick must be positive, got {tick}")
            if check in assignments:
                raise SchedulingError(f"duplicate assignment for {check}")
            assignments[check] = tick
        return cls(assignments)


@dataclass
class PartitionSet:
    """Ordered stabilizer-index groups; within a group all shared data
    qubits carry identical Pauli letters, so checks commute freely."""

    groups: list[list[int]]


def _compatible(a, b) -> bool:
    """No data qubit where both stabilizers act non-trivially with different letters."""
    both = (a.x | a.z) & (b.x | b.z)
    differ = (a.x != b.x) | (a.z != b.z)
    return not bool((both & differ).any())


def _overlaps(a, b) -> bool:
    return bool(((a.x | a.z) & (b.x | b.z)).any())


def partition_stabilizers(code, rng_seed: int) -> PartitionSet:
    """Greedy partition into freely-commuting groups.

    Each group seeds with a random remaining stabilizer and grows with any
    stabilizer compatible with every current member, preferring candidates
    that share a qubit with the group (connected growth, then disjoint
    ones, index order within each phase).  Connected growth makes CSS codes
    split into exactly the X group and the Z group: once a group holds one
    type it absorbs that whole type, after which every opposite-type
    stabilizer clashes on its own face.
    """
    rng = np.random.default_rng(rng_seed)
    pool = list(range(code.r))
    groups = []
    while pool:
        group = [pool.pop(int(rng.integers(len(pool))))]
        while True:
            compatible = [
                j for j in pool
                if all(_compatible(code.stabilizers[j], code.stabilizers[m]) for m in group)
            ]
            if not compatible:
                break
            connected = [
                j for j in compatible
                if any(_overlaps(code.stabilizers[j], code.stabilizers[m]) for m in group)
            ]
            pick = (connected or compatible)[0]
            group.append(pick)
            pool.remove(pick)
        groups.append(sorted(group))
    return PartitionSet(groups=groups)


def min_feasible_tick(partial: Schedule, check: PauliCheck) -> int:
    """One past the latest assigned tick among checks sharing a qubit with `check`."""
    if check in partial.assignments:
        raise SchedulingError(f"{check} is already assigned")
    t_max = 0
    for other, t in partial.assignments.items():
        if other.data in (check.data, check.ancilla) or other.ancilla in (check.data, check.ancilla):
            if t > t_max:
                t_max = t
    return t_max + 1


@dataclass
class ValidationReport:
    conflicts: list[tuple[int, int, PauliCheck, PauliCheck]]
    anticommutation_violations: list[tuple[int, int, int]]

    @property
    def ok(self) -> bool:
        return not self.conflicts and not self.anticommutation_violations

    def describe(self) -> str:
        lines = []
        for tick, qubit, c1, c2 in self.conflicts:
            lines.append(f"tick {tick}: qubit {qubit} used by {c1} and {c2}")
        for i, j, prod in self.anticommutation_violations:
            lines.append(
                f"stabilizers {i} and {j}: tick-difference product {prod} <= 0 "
                "over their anticommuting overlap"
            )
        return "\n".join(lines) if lines else "valid"


def _anticommuting_overlaps(code):
    """Pairs (i, j, [qubits]) where the stabilizers' letters differ on shared support."""
    out = []
    for i, j in itertools.combinations(range(code.r), 2):
        a, b = code.stabilizers[i], code.stabilizers[j]
        both = (a.x | a.z) & (b.x | b.z)
        differ = (a.x != b.x) | (a.z != b.z)
        qubits = np.flatnonzero(both & differ)
        if qubits.size:
            out.append((i, j, qubits.tolist()))
    return out


def validate_schedule(code, schedule: Schedule) -> ValidationReport:
    """Report per-tick qubit conflicts and cross-stabilizer ordering violations.

    The ordering condition is applied as written: for stabilizers with
    anticommuting checks on overlapped data qubits, the product of their
    tick differences over those qubits must be positive.
    """
    from .codes import derive_checks

    checklist = derive_checks(code)
    missing = [c for c in checklist.checks if c not in schedule.assignments]
    if missing:
        raise SchedulingError(
            f"schedule is incomplete: {len(missing)} checks unassigned, first {missing[0]}"
        )

    conflicts = []
    occupied: dict[tuple[int, int], PauliCheck] = {}
    for check, tick in sorted(schedule.assignments.items()):
        for qubit in check.qubits():
            key = (tick, qubit)
            if key in occupied:
                conflicts.append((tick, qubit, occupied[key], check))
            else:
                occupied[key] = check

    tick_of = {}
    for j, row in checklist.checks_by_stabilizer.items():
        for c in row:
            tick_of[(j, c.data)] = schedule.assignments[c]
    violations = []
    for i, j, qubits in _anticommuting_overlaps(code):
        prod = 1
        for q in qubits:
            prod *= tick_of[(i, q)] - tick_of[(j, q)]
        if prod <= 0:
            violations.append((i, j, prod))
    return ValidationReport(conflicts=conflicts, anticommutation_violations=violations)


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------

def append_all(schedule: Schedule, checks) -> Schedule:
    """Append checks in the given order, each at its minimum feasible tick."""
    for c in checks:
        schedule.assignments[c] = min_feasible_tick(schedule, c)
    return schedule


def lexical_schedule(code) -> Schedule:
    """Stabilizers in index order, checks in ascending data-qubit order."""
    from .codes import derive_checks

    checklist = derive_checks(code)
    schedule = Schedule()
    for j in sorted(checklist.checks_by_stabilizer):
        append_all(schedule, sorted(checklist.checks_by_stabilizer[j], key=lambda c: c.data))
    return schedule


def ordering_precedences(code) -> list[tuple[PauliCheck, PauliCheck]]:
    """Check precedences that keep anticommuting overlaps consistently ordered.

    For every stabilizer pair (i, j), i < j, with anticommuting checks on
    shared data qubits, stabilizer i's check on each shared qubit must run
    strictly before stabilizer j's.  Index order (the file's x list before
    its z list) fixes the direction, which linearizes the positive
    tick-difference product the same way the depth-optimal baseline of the
    benchmark literature does.
    """
    from .codes import derive_checks

    checklist = derive_checks(code)
    prec = []
    for i, j, qubits in _anticommuting_overlaps(code):
        for q in qubits:
            ci = PauliCheck(data=q, ancilla=checklist.ancilla_of_stabilizer[i],
                            basis=code.stabilizers[i].letter(q))
            cj = PauliCheck(data=q, ancilla=checklist.ancilla_of_stabilizer[j],
                            basis=code.stabilizers[j].letter(q))
            prec.append((ci, cj))
    return prec


def greedy_lowest_depth(code=None, checks=None) -> Schedule:
    """List scheduling: among the ready checks, repeatedly place the
    earliest-fitting one at its minimum feasible tick, preferring the check
    with the fewest feasible ticks in the current window on ties, then
    (ancilla, data) order.

    When scheduling a whole code, a check is ready once its ordering
    predecessors (see ordering_precedences) are placed, so the result always
    satisfies the cross-stabilizer ordering condition.
    """
    if checks is None:
        from .codes import derive_checks

        pending = set(derive_checks(code).checks)
        preds: dict[PauliCheck, list[PauliCheck]] = {}
        for before, after in ordering_precedences(code):
            preds.setdefault(after, []).append(before)
    else:
        pending = set(checks)
        preds = {}
    schedule = Schedule()
    busy: dict[int, set[int]] = {}

    def feasible_count(check, window):
        used = busy.get(check.data, set()) | busy.get(check.ancilla, set())
        return sum(1 for t in range(1, window + 1) if t not in used)

    while pending:
        window = max(schedule.depth, 1)
        ready = (c for c in pending
                 if all(p not in pending for p in preds.get(c, ())))
        scored = [(min_feasible_tick(schedule, c), feasible_count(c, window), c)
                  for c in ready]
        tick, _, best = min(scored)
        schedule.assignments[best] = tick
        pending.remove(best)
        for qubit in best.qubits():
            busy.setdefault(qubit, set()).add(tick)
    return schedule


def optimal_lowest_depth(code, time_budget: float) -> tuple[Schedule, bool]:
    """Exact minimum-depth schedule by branch and bound.

    Minimizes the maximum tick subject to per-tick qubit disjointness and
    the ordering_precedences constraints (index-order linearization of the
    anticommuting-overlap tick-difference product).  Returns (schedule,
    proven); proven means optimality was established within the budget.  On
    timeout the best incumbent found so far is returned, seeded by greedy.
    """
    from .codes import derive_checks

    if time_budget <= 0:
        raise ValueError("time budget must be positive")
    deadline = time.monotonic() + time_budget
    checklist = derive_checks(code)
    checks = sorted(checklist.checks)
    m = len(checks)
    idx_of = {c: i for i, c in enumerate(checks)}

    # Conflict cliques: checks sharing a qubit.
    sharing: list[list[int]] = [[] for _ in range(m)]
    by_qubit: dict[int, list[int]] = {}
    for i, c in enumerate(checks):
        for q in c.qubits():
            by_qubit.setdefault(q, []).append(i)
    for members in by_qubit.values():
        for i in members:
            sharing[i].extend(j for j in members if j != i)
    sharing = [sorted(set(s)) for s in sharing]

    before_of: list[list[int]] = [[] for _ in range(m)]  # b -> its predecessors
    after_of: list[list[int]] = [[] for _ in range(m)]   # a -> its successors
    for ca, cb in ordering_precedences(code):
        a, b = idx_of[ca], idx_of[cb]
        after_of[a].append(b)
        before_of[b].append(a)

    lower = max(len(v) for v in by_qubit.values())
    incumbent = min(greedy_lowest_depth(code), lexical_schedule(code),
                    key=lambda s: s.depth)
    upper = incumbent.depth

    def decision(T: int):
        """Find a depth-<=T assignment, or None on budget, False if refuted."""
        ticks = [0] * m  # 0 = unassigned
        domains = [((1 << (T + 1)) - 2) for _ in range(m)]  # bits 1..T set
        trail: list[tuple[int, int]] = []

        def shrink(j, mask) -> bool:
            if domains[j] & ~mask:
                trail.append((j, domains[j]))
                domains[j] &= mask
                if domains[j] == 0:
                    return False
            return True

        def propagate_assign(i, t) -> bool:
            ticks[i] = t
            for j in sharing[i]:
                if ticks[j] == 0 and not shrink(j, ~(1 << t)):
                    return False
            for j in after_of[i]:  # j must run strictly after t
                if ticks[j]:
                    if ticks[j] <= t:
                        return False
                elif not shrink(j, ~((1 << (t + 1)) - 1)):
                    return False
            for j in before_of[i]:  # j must run strictly before t
                if ticks[j]:
                    if ticks[j] >= t:
                        return False
                elif not shrink(j, (1 << t) - 1):
                    return False
            return True

        nodes = 0

        def dfs() -> bool | None:
            nonlocal nodes
            nodes += 1
            if nodes % 2048 == 0 and time.monotonic() > deadline:
                return None
            best_i, best_size = -1, T + 1
            for i in range(m):
                if ticks[i] == 0:
                    size = domains[i].bit_count()
                    if size < best_size:
                        best_i, best_size = i, size
                        if size == 1:
                            break
            if best_i < 0:
                return True
            dom = domains[best_i]
            while dom:
                t = (dom & -dom).bit_length() - 1
                dom &= dom - 1
                mark = len(trail)
                if propagate_assign(best_i, t):
                    result = dfs()
                    if result:
                        return True
                    if result is None:
                        return None
                while len(trail) > mark:
                    j, old = trail.pop()
                    domains[j] = old
                ticks[best_i] = 0
            return False

        result = dfs()
        if result:
            return {checks[i]: ticks[i] for i in range(m)}
        return result  # False (refuted) or None (budget)

    proven = False
    best = incumbent
    if upper == lower:
        proven = True
    for T in range(lower, upper):
        if time.monotonic() > deadline:
            break
        solution = decision(T)
        if solution is None:
            break
        if solution:
            best = Schedule(solution)
            proven = True
            break
        # T refuted; after refuting upper - 1 the incumbent is optimal.
        if T == upper - 1:
            proven = True
    return best, proven
