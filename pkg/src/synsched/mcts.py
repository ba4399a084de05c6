"""Monte Carlo tree search over partial schedules, one partition at a time.

States are partial schedules of the active partition's checks, grown by
appending an unassigned check at its minimum feasible tick.  Terminal
states (all partition checks placed) are scored by simulating the full
code round: frozen earlier partitions, the candidate block, and greedy
placeholder blocks for partitions not yet searched, concatenated
sequentially.  The score is the inverse overall logical error rate, so
higher is better.

Each partition search uses one fixed evaluation seed (common random
numbers): score differences between terminals reflect the schedules, not
sampling noise.  Final numbers should be re-estimated with a fresh seed
and a larger shot budget.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from . import sim
from .pauli import PauliCheck
from .schedule import Schedule, greedy_lowest_depth


@dataclass
class SearchConfig:
    c: float = math.sqrt(2.0)
    iters_per_step: int = 4000
    eval_shots: int = 10_000
    master_seed: int = 0
    eval_cache_capacity: int = 65536
    threads: int = 1

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("exploration constant must be >= 0")
        if self.iters_per_step <= 0 or self.eval_shots <= 0:
            raise ValueError("iterations and evaluation shots must be positive")


def _last_ticks(state: Schedule) -> dict[int, int]:
    last: dict[int, int] = {}
    for c, t in state.assignments.items():
        for q in c.qubits():
            if t > last.get(q, 0):
                last[q] = t
    return last


def moves(state: Schedule, partition_checks: list[PauliCheck]) -> list[tuple[PauliCheck, int]]:
    """One move per unassigned partition check, each at its minimum feasible
    tick, in deterministic (ancilla, data) order."""
    last = _last_ticks(state)
    return [
        (c, max(last.get(c.data, 0), last.get(c.ancilla, 0)) + 1)
        for c in sorted(partition_checks)
        if c not in state.assignments
    ]


class SearchNode:
    """One tree node: a partial partition schedule with visit statistics."""

    __slots__ = ("state", "E", "n", "children", "untried")

    def __init__(self, state: Schedule, untried: list[tuple[PauliCheck, int]]):
        self.state = state
        self.E = 0.0
        self.n = 0
        self.children: dict[tuple[PauliCheck, int], SearchNode] = {}
        self.untried = untried

    @property
    def terminal(self) -> bool:
        return not self.untried and not self.children

    def mean_score(self) -> float:
        return self.E / self.n if self.n else 0.0


def _make_node(state: Schedule, partition_checks) -> SearchNode:
    return SearchNode(state, moves(state, partition_checks))


def uct_value(child: SearchNode, parent_visits: int, c: float) -> float:
    """Upper confidence bound applied to trees: E/n + c * sqrt(ln(N) / n)."""
    if child.n < 1 or parent_visits < 1:
        raise ValueError("UCT needs visited nodes; expand unvisited children instead")
    return child.E / child.n + c * math.sqrt(math.log(parent_visits) / child.n)


def _argmax_child(node: SearchNode, key) -> tuple[tuple, "SearchNode"]:
    """Max over children by `key`, first-in-move-order on ties."""
    best = None
    for mv in sorted(node.children):
        child = node.children[mv]
        val = key(child)
        if best is None or val > best[0]:
            best = (val, mv, child)
    return best[1], best[2]


class Evaluator:
    """Scores complete partition blocks by full-round simulation.

    The full schedule is: frozen blocks of already-searched partitions,
    this block, then greedy placeholder blocks for the remaining
    partitions, each shifted past the previous block's depth.  Scores are
    cached by the block's canonical form in a capacity-bounded LRU.
    """

    def __init__(self, code, noise, decoder, shots, seed, prefix: Schedule,
                 placeholders: list[Schedule], cache_capacity: int, threads: int = 1):
        self.code = code
        self.noise = noise
        self.decoder = decoder
        self.shots = shots
        self.seed = seed
        self.prefix = prefix
        self.placeholders = placeholders
        self.threads = threads
        self._cache: OrderedDict[tuple, float] = OrderedDict()
        self._capacity = cache_capacity
        self.evaluations = 0
        self.best_score = -math.inf
        self.best_state: Schedule | None = None

    def full_schedule(self, block: Schedule) -> Schedule:
        merged = self.prefix.copy()
        for part in (block, *self.placeholders):
            merged = merged.merged_with(part.shifted(merged.depth))
        return merged

    def __call__(self, state: Schedule) -> float:
        key = state.canonical()
        hit = self._cache.get(key)
        if hit is not None:
            self._cache.move_to_end(key)
            return hit
        result = sim.estimate_logical_error(
            self.code, self.full_schedule(state), self.noise, self.decoder,
            shots=self.shots, seed=self.seed, threads=self.threads,
        )
        score = result.score
        self.evaluations += 1
        self._cache[key] = score
        if len(self._cache) > self._capacity:
            self._cache.popitem(last=False)
        if score > self.best_score:
            self.best_score = score
            self.best_state = state.copy()
        return score


def _rollout(state: Schedule, partition_checks, rng) -> Schedule:
    """Uniform-random completion of a partial partition schedule."""
    pending = [c for c in partition_checks if c not in state.assignments]
    if not pending:
        return state
    state = state.copy()
    last = _last_ticks(state)
    order = rng.permutation(len(pending))
    for idx in order:
        c = pending[idx]
        tick = max(last.get(c.data, 0), last.get(c.ancilla, 0)) + 1
        state.assignments[c] = tick
        for q in c.qubits():
            last[q] = tick
    return state


def search_step(root: SearchNode, config: SearchConfig, evaluator,
                partition_checks: list[PauliCheck],
                rng: np.random.Generator) -> tuple[PauliCheck, int]:
    """Run selection/expansion/simulation/backpropagation until the root has
    iters_per_step visits; return the move to the child with the highest
    mean score (ties by move order).

    A root retained from the previous step keeps its statistics, so only
    iters_per_step - root.n new iterations run.
    """
    if root.terminal:
        raise ValueError("search_step needs a non-terminal root")
    while root.n < config.iters_per_step or not root.children:
        node = root
        path = [node]
        # Selection: descend through fully expanded nodes.
        while not node.untried and node.children:
            _, node = _argmax_child(
                node, lambda ch, N=node.n: uct_value(ch, N, config.c))
            path.append(node)
        # Expansion: realize one untried move, chosen uniformly at random.
        if node.untried:
            idx = int(rng.integers(len(node.untried)))
            move = node.untried.pop(idx)
            state = node.state.copy()
            state.assignments[move[0]] = move[1]
            child = _make_node(state, partition_checks)
            node.children[move] = child
            node = child
            path.append(node)
        # Simulation: uniform-random rollout to a terminal, then score it.
        score = evaluator(_rollout(node.state, partition_checks, rng))
        # Backpropagation.
        for visited in path:
            visited.E += score
            visited.n += 1
    move, _ = _argmax_child(root, lambda ch: ch.mean_score())
    return move


@dataclass
class SearchLogEntry:
    partition: int
    step: int
    chosen_move: tuple
    root_visits: int
    best_score: float

    def to_json_obj(self):
        check, tick = self.chosen_move
        return {
            "partition": self.partition, "step": self.step,
            "chosen_move": {"data": check.data, "ancilla": check.ancilla,
                            "basis": check.basis, "tick": tick},
            "root_visits": self.root_visits, "best_score": self.best_score,
        }


@dataclass
class SearchResult:
    schedule: Schedule
    log: list[SearchLogEntry] = field(default_factory=list)
    evaluations: int = 0


def continuous_search(code, partition_set, config: SearchConfig, noise, decoder,
                      log_hook=None) -> SearchResult:
    """Search each partition in order with subtree reuse, concatenating the
    blocks sequentially (each block's ticks offset by the depth so far).

    After committing to the best child its retained subtree seeds the next
    step, so the visits already spent there are not repeated.  Per
    partition the emitted block is the better of the walked-to terminal
    and the best terminal evaluated during any rollout.
    """
    from .codes import derive_checks

    checklist = derive_checks(code)
    rng = np.random.default_rng(config.master_seed)
    log: list[SearchLogEntry] = []
    total_evals = 0

    group_checks = [
        sorted(c for j in group for c in checklist.checks_by_stabilizer[j])
        for group in partition_set.groups
    ]

    prefix = Schedule()
    for p_index, partition_checks in enumerate(group_checks):
        placeholders = [greedy_lowest_depth(checks=checks)
                        for checks in group_checks[p_index + 1:]]
        eval_seed = int(np.random.SeedSequence(
            entropy=config.master_seed & (2**63 - 1), spawn_key=(7919, p_index)
        ).generate_state(1)[0])
        evaluator = Evaluator(
            code, noise, decoder, config.eval_shots, eval_seed,
            prefix, placeholders, config.eval_cache_capacity, config.threads,
        )
        root = _make_node(Schedule(), partition_checks)
        step = 0
        while not root.terminal:
            move = search_step(root, config, evaluator, partition_checks, rng)
            root = root.children[move]
            step += 1
            entry = SearchLogEntry(
                partition=p_index, step=step, chosen_move=move,
                root_visits=root.n, best_score=evaluator.best_score,
            )
            log.append(entry)
            if log_hook is not None:
                log_hook(entry)
        walked = root.state
        walked_score = evaluator(walked)
        block = walked
        if evaluator.best_state is not None and evaluator.best_score > walked_score:
            block = evaluator.best_state
        prefix = prefix.merged_with(block.shifted(prefix.depth))
        total_evals += evaluator.evaluations

    return SearchResult(schedule=prefix, log=log, evaluations=total_evals)
