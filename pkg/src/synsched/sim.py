"""Noise model, Pauli-frame Monte Carlo of a scheduled syndrome round, and
the logical-error evaluation protocol.

One evaluation shot: run the noisy scheduled round on an empty frame,
project the residual onto the data qubits (ancillas are measured and
reset), compute the error-free syndrome of that residual, decode, and
check whether the corrected residual flips any logical operator.  The
noisy round's own ancilla outcomes are never consumed, so scheduling
artifacts only enter through error propagation.

Shots are simulated in fixed-size chunks of 4096; each chunk draws from
its own counter-based stream keyed by (seed, chunk index), so results are
bit-identical for a given seed regardless of thread count, and shot i is a
pure function of the seed and i.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliCheck, PauliString, conjugate_through_check, symplectic_parity

CHUNK = 4096

# Two-qubit depolarizing: index c in 0..14 encodes the non-identity pair
# (first, second) = ((c+1) >> 2, (c+1) & 3) with 0=I, 1=X, 2=Y, 3=Z.
_PAIR_X = np.array([(p in (1, 2)) for p in range(4)], dtype=np.uint8)
_PAIR_Z = np.array([(p in (2, 3)) for p in range(4)], dtype=np.uint8)


class SimulationError(RuntimeError):
    pass


class DecoderContractError(RuntimeError):
    """A decoder returned a correction whose syndrome differs from its input."""


@dataclass
class NoiseModel:
    """Depolarizing rates per circuit location.

    Default semantics: p_2q applies once per executed check (uniform over
    the 15 non-identity two-qubit Paulis on its data/ancilla pair), p_idle
    once per idle qubit-tick (uniform over X, Y, Z).

    With ancilla_only=True, gate and idle noise land on ancilla qubits
    alone (each executed check deposits a uniform X/Y/Z on its ancilla
    with probability p_2q; data qubits are noiseless), so every error is a
    hook error shaped by the schedule.  This reproduces the benchmark
    injection model that the published large schedule-vs-schedule
    reduction factors are measured under.

    per_qubit_overrides maps qubit id -> (p_2q multiplier, p_idle
    multiplier); a check's rate picks up the multipliers of every qubit it
    deposits noise on.  p_meas is an ancilla readout flip recorded for
    completeness; the evaluation protocol never reads the noisy round's
    outcomes, so it defaults to 0 and has no effect on the residual.
    """

    p_2q: float = 0.0074
    p_idle: float = 0.0052
    p_meas: float = 0.0
    per_qubit_overrides: dict[int, tuple[float, float]] = field(default_factory=dict)
    ancilla_only: bool = False

    def __post_init__(self):
        for name, p in (("p_2q", self.p_2q), ("p_idle", self.p_idle), ("p_meas", self.p_meas)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} outside [0, 1]")

    def check_rate(self, check: PauliCheck) -> float:
        rate = self.p_2q
        qubits = (check.ancilla,) if self.ancilla_only else check.qubits()
        for q in qubits:
            rate *= self.per_qubit_overrides.get(q, (1.0, 1.0))[0]
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"override makes check rate {rate} for {check}")
        return rate

    def idle_rate(self, qubit: int) -> float:
        rate = self.p_idle * self.per_qubit_overrides.get(qubit, (1.0, 1.0))[1]
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"override makes idle rate {rate} for qubit {qubit}")
        return rate

    @classmethod
    def zero(cls) -> "NoiseModel":
        return cls(p_2q=0.0, p_idle=0.0, p_meas=0.0)

    @classmethod
    def load(cls, path) -> "NoiseModel":
        with open(path) as fh:
            raw = json.load(fh)
        overrides = {}
        for entry in raw.get("overrides", []):
            overrides[int(entry["qubit"])] = (
                float(entry.get("p_2q_mult", 1.0)),
                float(entry.get("p_idle_mult", 1.0)),
            )
        return cls(
            p_2q=float(raw.get("p_2q", 0.0074)),
            p_idle=float(raw.get("p_idle", 0.0052)),
            p_meas=float(raw.get("p_meas", 0.0)),
            per_qubit_overrides=overrides,
            ancilla_only=bool(raw.get("ancilla_only", False)),
        )

    def save(self, path) -> None:
        payload = {
            "p_2q": self.p_2q, "p_idle": self.p_idle, "p_meas": self.p_meas,
            "ancilla_only": self.ancilla_only,
            "overrides": [
                {"qubit": q, "p_2q_mult": m2, "p_idle_mult": mi}
                for q, (m2, mi) in sorted(self.per_qubit_overrides.items())
            ],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")


@dataclass
class Circuit:
    """A scheduled syndrome round unrolled into ticks.

    Data qubits idle on every tick they are untouched; an ancilla idles
    only strictly between its first and last scheduled check (it is
    prepared just before and measured just after its window).
    """

    n_data: int
    n_qubits: int
    ticks: list[list[PauliCheck]]
    idle: list[list[int]]

    @property
    def depth(self) -> int:
        return len(self.ticks)

    def fault_locations(self):
        """Deterministic order: per tick, checks then idle qubits."""
        for t, (checks, idles) in enumerate(zip(self.ticks, self.idle), start=1):
            for c in checks:
                yield ("check", t, c)
            for q in idles:
                yield ("idle", t, q)


def build_circuit(code, schedule) -> Circuit:
    """Unroll a complete, conflict-free schedule into per-tick gate lists."""
    from .codes import derive_checks
    from .schedule import SchedulingError

    checklist = derive_checks(code)
    missing = [c for c in checklist.checks if c not in schedule.assignments]
    if missing:
        raise SchedulingError(f"schedule incomplete: {len(missing)} checks missing")
    extra = [c for c in schedule.assignments if c not in set(checklist.checks)]
    if extra:
        raise SchedulingError(f"schedule has {len(extra)} checks foreign to the code")
    depth = schedule.depth
    ticks: list[list[PauliCheck]] = [[] for _ in range(depth)]
    for check, tick in schedule.assignments.items():
        ticks[tick - 1].append(check)
    for row in ticks:
        row.sort()
        used = {}
        for c in row:
            for q in c.qubits():
                if q in used:
                    raise SchedulingError(f"qubit {q} used twice in one tick: {used[q]} and {c}")
                used[q] = c

    n = code.n
    ancillas = sorted({c.ancilla for c in checklist.checks})
    n_qubits = max(ancillas, default=n - 1) + 1
    window = {}
    for check, tick in schedule.assignments.items():
        lo, hi = window.get(check.ancilla, (tick, tick))
        window[check.ancilla] = (min(lo, tick), max(hi, tick))

    idle = []
    for t in range(1, depth + 1):
        touched = {q for c in ticks[t - 1] for q in c.qubits()}
        idles = [q for q in range(n) if q not in touched]
        idles.extend(a for a in ancillas
                     if window[a][0] < t < window[a][1] and a not in touched)
        idle.append(sorted(idles))
    return Circuit(n_data=n, n_qubits=n_qubits, ticks=ticks, idle=idle)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def _chunk_generator(seed: int, chunk_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & (2**63 - 1),
                                spawn_key=(chunk_index,))
    return np.random.Generator(np.random.Philox(ss))


def _noisy_idles(circuit: Circuit, noise: NoiseModel, t0: int) -> list[int]:
    idles = circuit.idle[t0]
    if noise.ancilla_only:
        return [q for q in idles if q >= circuit.n_data]
    return idles


def _sample_chunk(circuit: Circuit, noise: NoiseModel, gen, batch: int,
                  x: np.ndarray, z: np.ndarray) -> None:
    """Propagate `batch` frames through the noisy round, in place.

    Draw shapes are fixed at CHUNK rows so shot content depends only on
    the stream, not on the batch size of a final partial chunk.
    """
    check_rates = [np.array([noise.check_rate(c) for c in row]) for row in circuit.ticks]
    for t0, row in enumerate(circuit.ticks):
        for c in row:
            d, a = c.data, c.ancilla
            if c.basis == "Z":
                x[:, a] ^= x[:, d]
                z[:, d] ^= z[:, a]
            else:
                x[:, a] ^= z[:, d]
                x[:, d] ^= z[:, a]
        if len(row):
            u = gen.random((CHUNK, len(row)))[:batch]
            hit = u < check_rates[t0][None, :]
            if noise.ancilla_only:
                pick = gen.integers(0, 3, size=(CHUNK, len(row)), dtype=np.uint8)[:batch]
                for ci, c in enumerate(row):
                    h = hit[:, ci]
                    x[:, c.ancilla] ^= h & (pick[:, ci] <= 1)
                    z[:, c.ancilla] ^= h & (pick[:, ci] >= 1)
            else:
                pick = gen.integers(0, 15, size=(CHUNK, len(row)), dtype=np.uint8)[:batch]
                pair = (pick + 1)
                first, second = pair >> 2, pair & 3
                for ci, c in enumerate(row):
                    h = hit[:, ci]
                    x[:, c.data] ^= h & _PAIR_X[first[:, ci]]
                    z[:, c.data] ^= h & _PAIR_Z[first[:, ci]]
                    x[:, c.ancilla] ^= h & _PAIR_X[second[:, ci]]
                    z[:, c.ancilla] ^= h & _PAIR_Z[second[:, ci]]
        idles = _noisy_idles(circuit, noise, t0)
        if idles:
            idle_rates = np.array([noise.idle_rate(q) for q in idles])
            u = gen.random((CHUNK, len(idles)))[:batch]
            pick = gen.integers(0, 3, size=(CHUNK, len(idles)), dtype=np.uint8)[:batch]
            hit = u < idle_rates[None, :]
            xs = hit & (pick <= 1)
            zs = hit & (pick >= 1)
            cols = np.asarray(idles)
            x[:, cols] ^= xs
            z[:, cols] ^= zs


def sample_residual(circuit: Circuit, noise: NoiseModel, shot_seed: int) -> PauliString:
    """One noisy round: the residual data-qubit error, ancillas traced out."""
    gen = _chunk_generator(shot_seed, 0)
    x = np.zeros((1, circuit.n_qubits), dtype=np.uint8)
    z = np.zeros((1, circuit.n_qubits), dtype=np.uint8)
    _sample_chunk(circuit, noise, gen, 1, x, z)
    return PauliString(x[0, : circuit.n_data], z[0, : circuit.n_data])


def propagate_with_faults(circuit: Circuit, faults) -> PauliString:
    """Deterministic propagation of injected faults.

    `faults` is a list of (tick, qubit, letter); each fault is applied
    after the named tick's checks have acted, then conjugated through all
    later ticks.  Returns the data-qubit residual.
    """
    from .pauli import compose

    frame = PauliString.identity(circuit.n_qubits)
    by_tick: dict[int, list[tuple[int, str]]] = {}
    for tick, qubit, letter in faults:
        if not 1 <= tick <= circuit.depth:
            raise SimulationError(f"fault tick {tick} outside 1..{circuit.depth}")
        by_tick.setdefault(tick, []).append((qubit, letter))
    for t in range(1, circuit.depth + 1):
        if not frame.is_identity():
            for c in circuit.ticks[t - 1]:
                frame = conjugate_through_check(frame, c)
        for qubit, letter in by_tick.get(t, ()):
            frame = compose(frame, PauliString.single(circuit.n_qubits, qubit, letter))
    return frame.restrict(range(circuit.n_data))


@dataclass
class EvalResult:
    p_x: float
    p_z: float
    overall: float
    score: float
    shots: int
    stderr_x: float
    stderr_z: float
    events_x: int
    events_z: int

    def to_json_obj(self) -> dict:
        return {
            "p_x": self.p_x, "p_z": self.p_z, "overall": self.overall,
            "score": self.score, "shots": self.shots,
            "stderr_x": self.stderr_x, "stderr_z": self.stderr_z,
            "events_x": self.events_x, "events_z": self.events_z,
        }


def _logical_event_counts(code, decoder, ex, ez) -> tuple[int, int]:
    """Decode residuals (rows of ex/ez) and count logical X / Z flips."""
    sx = np.array([s.x for s in code.stabilizers], dtype=np.int32).reshape(code.r, code.n)
    sz = np.array([s.z for s in code.stabilizers], dtype=np.int32).reshape(code.r, code.n)
    syndromes = ((ex.astype(np.int32) @ sz.T) + (ez.astype(np.int32) @ sx.T)) % 2
    cx, cz = decoder.decode_batch(syndromes.astype(np.uint8))
    check = ((cx.astype(np.int32) @ sz.T) + (cz.astype(np.int32) @ sx.T)) % 2
    if not np.array_equal(check, syndromes):
        bad = int(np.argmax((check != syndromes).any(axis=1)))
        raise DecoderContractError(
            f"decoder {decoder.name!r} returned a syndrome-inconsistent correction "
            f"for syndrome {syndromes[bad].tolist()}"
        )
    rx = ex ^ cx
    rz = ez ^ cz

    def flips(ops):
        ox = np.array([p.x for p in ops], dtype=np.int32).reshape(len(ops), code.n)
        oz = np.array([p.z for p in ops], dtype=np.int32).reshape(len(ops), code.n)
        par = ((rx.astype(np.int32) @ oz.T) + (rz.astype(np.int32) @ ox.T)) % 2
        return par.any(axis=1)

    events_z = int(flips(code.logical_xs).sum()) if code.logical_xs else 0
    events_x = int(flips(code.logical_zs).sum()) if code.logical_zs else 0
    return events_x, events_z


def estimate_logical_error(code, schedule, noise: NoiseModel, decoder,
                           shots: int, seed: int, threads: int = 1) -> EvalResult:
    """Monte Carlo estimate of logical X/Z error rates for one noisy round.

    A logical Z error is a corrected residual that anticommutes with any
    logical X operator, and vice versa; for multi-logical codes this counts
    shots where at least one logical qubit flips.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    circuit = build_circuit(code, schedule)
    n_chunks = (shots + CHUNK - 1) // CHUNK

    def run_chunk(ci: int) -> tuple[int, int]:
        batch = min(CHUNK, shots - ci * CHUNK)
        gen = _chunk_generator(seed, ci)
        x = np.zeros((batch, circuit.n_qubits), dtype=np.uint8)
        z = np.zeros((batch, circuit.n_qubits), dtype=np.uint8)
        _sample_chunk(circuit, noise, gen, batch, x, z)
        return _logical_event_counts(code, decoder, x[:, : code.n], z[:, : code.n])

    if threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(run_chunk, range(n_chunks)))
    else:
        counts = [run_chunk(ci) for ci in range(n_chunks)]
    events_x = sum(c[0] for c in counts)
    events_z = sum(c[1] for c in counts)
    return _finalize(events_x, events_z, shots)


def _finalize(events_x: int, events_z: int, shots: int) -> EvalResult:
    p_x = events_x / shots
    p_z = events_z / shots
    overall = 1.0 - (1.0 - p_x) * (1.0 - p_z)
    # An empty event count gives overall = 0; substitute the 1/(2N)
    # rule-of-thumb upper bound so scores stay finite and comparable.
    score = 1.0 / overall if overall > 0 else 2.0 * shots
    return EvalResult(
        p_x=p_x, p_z=p_z, overall=overall, score=score, shots=shots,
        stderr_x=math.sqrt(p_x * (1.0 - p_x) / shots),
        stderr_z=math.sqrt(p_z * (1.0 - p_z) / shots),
        events_x=events_x, events_z=events_z,
    )


@dataclass
class OracleResult:
    p_x: float
    p_z: float
    p_multi: float  # probability of two or more faults, bounds the truncation


def first_order_oracle(code, schedule, noise: NoiseModel, decoder,
                       max_configs: int = 300_000) -> OracleResult:
    """Exact probability of logical X/Z events over all single-fault
    configurations (each weighted by the no-other-fault probability).

    Every check location contributes 15 two-qubit Paulis (or 3 ancilla
    Paulis when the noise model is ancilla_only), every noisy idle slot 3
    single-qubit Paulis; each configuration is propagated deterministically
    through the remaining ticks and pushed through the full decode pipeline.
    Accurate to O(p^2): `p_multi` bounds the neglected multi-fault mass.
    """
    circuit = build_circuit(code, schedule)
    locations = [
        loc for loc in circuit.fault_locations()
        if loc[0] == "check" or loc[2] in _noisy_idles(circuit, noise, loc[1] - 1)
    ]
    rates = [noise.check_rate(p) if kind == "check" else noise.idle_rate(p)
             for kind, _, p in locations]
    per_check = 3 if noise.ancilla_only else 15
    n_configs = sum(per_check if kind == "check" else 3 for kind, _, _ in locations)
    if n_configs > max_configs:
        raise SimulationError(f"{n_configs} single-fault configurations exceed "
                              f"the guard {max_configs}")
    if any(r >= 1.0 for r in rates):
        raise SimulationError("fault rates must be < 1 for the oracle")
    p0 = math.exp(sum(math.log1p(-r) for r in rates if r > 0.0))

    letters = "IXYZ"
    p_x = p_z = 0.0
    for (kind, tick, payload), rate in zip(locations, rates):
        if rate == 0.0:
            continue
        base = p0 * rate / (1.0 - rate)
        if kind == "check" and not noise.ancilla_only:
            choices = [((payload.data, letters[(c + 1) >> 2]),
                        (payload.ancilla, letters[(c + 1) & 3])) for c in range(15)]
            w = base / 15.0
        elif kind == "check":
            choices = [((payload.ancilla, letter),) for letter in "XYZ"]
            w = base / 3.0
        else:
            choices = [((payload, letter),) for letter in "XYZ"]
            w = base / 3.0
        for combo in choices:
            faults = [(tick, q, letter) for q, letter in combo if letter != "I"]
            residual = propagate_with_faults(circuit, faults)
            ex, ez = _single_events(code, decoder, residual)
            p_x += w * ex
            p_z += w * ez
    p_single = sum(p0 * r / (1.0 - r) for r in rates)
    return OracleResult(p_x=p_x, p_z=p_z, p_multi=max(0.0, 1.0 - p0 - p_single))


def _single_events(code, decoder, residual: PauliString) -> tuple[int, int]:
    ex = residual.x[None, :]
    ez = residual.z[None, :]
    events_x, events_z = _logical_event_counts(code, decoder, ex, ez)
    return events_x, events_z


def spacetime_report(code, schedule, t_2q: float = 600.0, t_meas: float = 4000.0) -> dict:
    """Round duration and space-time volume of a scheduled syndrome round.

    t_round = depth * t_2q + t_meas in nanoseconds; `time` renders it in
    the benchmark tables' units (ns / 1000); physical qubits count data
    plus one ancilla per stabilizer.
    """
    depth = schedule.depth
    t_round = depth * t_2q + t_meas
    physical = code.n + code.r
    time_units = t_round / 1000.0
    return {
        "depth": depth,
        "t_round_ns": t_round,
        "time": time_units,
        "physical_qubits": physical,
        "volume": time_units * physical,
    }
