"""Phase-free Pauli algebra in binary-symplectic form.

A Pauli string on n qubits is stored as two length-n bit vectors: qubit q
carries I/X/Z/Y according to (x_q, z_q) = (0,0)/(1,0)/(0,1)/(1,1).  Global
phase is never tracked; all operations here are the mod-2 linear algebra
that Pauli-frame simulation needs.

Text format: a fixed-length string over {I, X, Y, Z} whose leftmost
character is qubit 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PAULI_LETTERS = "IXYZ"

# (x, z) bit pair for each letter.
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}


class DimensionError(ValueError):
    """Raised when operands act on different qubit counts or indices are out of range."""


class PauliString:
    """An n-qubit Pauli operator, up to global phase.

    Instances are immutable: the underlying bit vectors are frozen after
    construction, so strings can be shared freely across threads.
    """

    __slots__ = ("n", "x", "z", "_hash")

    def __init__(self, x, z):
        x = np.asarray(x, dtype=np.uint8) & 1
        z = np.asarray(z, dtype=np.uint8) & 1
        if x.shape != z.shape or x.ndim != 1:
            raise DimensionError(
                f"x/z bit vectors must be 1-D and equal length, got {x.shape} and {z.shape}"
            )
        x.setflags(write=False)
        z.setflags(write=False)
        self.n = x.shape[0]
        self.x = x
        self.z = z
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        """The Pauli acting as `letter` on `qubit` and I elsewhere."""
        if not 0 <= qubit < n:
            raise DimensionError(f"qubit {qubit} out of range for n={n}")
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        x[qubit], z[qubit] = _LETTER_BITS[letter]
        return cls(x, z)

    @classmethod
    def from_string(cls, text: str) -> "PauliString":
        """Parse a letter string; character i is qubit i."""
        try:
            bits = [_LETTER_BITS[ch] for ch in text]
        except KeyError as exc:
            raise ValueError(f"invalid Pauli letter {exc.args[0]!r} in {text!r}") from exc
        if not bits:
            return cls.identity(0)
        x, z = zip(*bits)
        return cls(np.array(x, dtype=np.uint8), np.array(z, dtype=np.uint8))

    def to_string(self) -> str:
        return "".join(_BITS_LETTER[(int(xq), int(zq))] for xq, zq in zip(self.x, self.z))

    def letter(self, qubit: int) -> str:
        return _BITS_LETTER[(int(self.x[qubit]), int(self.z[qubit]))]

    def weight(self) -> int:
        """Number of qubits carrying a non-identity letter."""
        return int(np.count_nonzero(self.x | self.z))

    def support(self) -> list[int]:
        return np.flatnonzero(self.x | self.z).tolist()

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def restrict(self, qubits) -> "PauliString":
        """Projection onto the given qubit index list (in that order)."""
        idx = np.asarray(qubits, dtype=np.intp)
        return PauliString(self.x[idx], self.z[idx])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.x.tobytes(), self.z.tobytes()))
        return self._hash

    def __repr__(self):
        return f"PauliString({self.to_string()!r})"


def compose(a: PauliString, b: PauliString) -> PauliString:
    """Phase-free product a*b: componentwise XOR of the bit vectors."""
    if a.n != b.n:
        raise DimensionError(f"cannot compose Paulis on {a.n} and {b.n} qubits")
    return PauliString(a.x ^ b.x, a.z ^ b.z)


def symplectic_parity(a: PauliString, b: PauliString) -> int:
    """Symplectic inner product mod 2: 1 iff a and b anticommute."""
    if a.n != b.n:
        raise DimensionError(f"cannot compare Paulis on {a.n} and {b.n} qubits")
    return int(np.bitwise_xor.reduce((a.x & b.z) ^ (a.z & b.x), initial=0))


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the number of pointwise-anticommuting positions is even."""
    return symplectic_parity(a, b) == 0


def syndrome(error: PauliString, stabilizers: list[PauliString]) -> np.ndarray:
    """Bit vector with bit i = 1 iff `error` anticommutes with stabilizer i."""
    return np.array([symplectic_parity(error, s) for s in stabilizers], dtype=np.uint8)


@dataclass(frozen=True, order=True)
class PauliCheck:
    """One two-qubit interaction of a syndrome round: (data, ancilla, basis).

    Ordering is (ancilla, data, basis); that is the deterministic tie-break
    order used throughout the schedulers.
    """

    ancilla: int
    data: int
    basis: str  # "X" or "Z"

    def __post_init__(self):
        if self.basis not in ("X", "Z"):
            raise ValueError(f"check basis must be X or Z, got {self.basis!r}")

    def qubits(self) -> tuple[int, int]:
        return (self.data, self.ancilla)

    def __repr__(self):
        return f"PauliCheck(data={self.data}, ancilla={self.ancilla}, basis={self.basis!r})"


def conjugate_through_check(frame: PauliString, check: PauliCheck) -> PauliString:
    """Propagate a Pauli frame through one check's two-qubit sub-circuit.

    Z check (CNOT, data = control, ancilla = target):
        X_data -> X_data X_anc,   Z_anc -> Z_data Z_anc.
    X check (basis change on the ancilla, CNOT with ancilla as control,
    basis change back); composite action:
        Z_anc -> Z_anc X_data,    Z_data -> X_anc Z_data.
    Everything else is unchanged; Y components follow by linearity of the
    (x, z) bit rules.  Both sub-circuits are self-inverse, so applying the
    same check twice restores the frame.
    """
    d, a = check.data, check.ancilla
    if d == a:
        raise DimensionError("check data and ancilla must differ")
    if not (0 <= d < frame.n and 0 <= a < frame.n):
        raise DimensionError(
            f"check qubits ({d}, {a}) out of range for frame on {frame.n} qubits"
        )
    x = frame.x.copy()
    z = frame.z.copy()
    if check.basis == "Z":
        x[a] ^= x[d]
        z[d] ^= z[a]
    else:
        x[a] ^= z[d]
        x[d] ^= z[a]
    return PauliString(x, z)
