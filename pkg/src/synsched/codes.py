"""Stabilizer-code model, validation, file I/O, and reference-code generators.

Code files are JSON objects with keys family, n, k, d, logical_xs,
logical_zs, x_stabilizers, z_stabilizers.  Pauli strings are fixed-length
uppercase letter strings, leftmost character = qubit 0.  General codes may
place mixed-type strings in either stabilizer list; the two lists are
concatenated in order (x list first), and stabilizer j is measured by
ancilla qubit n + j.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gf2
from .pauli import PauliCheck, PauliString, commutes

FIXTURE_DIR = Path(__file__).parent / "codes"


class CodeFileError(ValueError):
    """Malformed code file: missing keys, bad JSON, or bad Pauli strings."""


class CodeValidationError(ValueError):
    """A structural invariant of the code is violated."""


@dataclass
class StabilizerCode:
    """An [[n, k, d]] stabilizer code with explicit logical operators.

    `stabilizers` concatenates the file's x list and z list; `x_count` is
    the length of the x list so files round-trip exactly.  Instances are
    treated as immutable after validation.
    """

    family: str
    n: int
    k: int
    d: int
    stabilizers: list[PauliString]
    logical_xs: list[PauliString]
    logical_zs: list[PauliString]
    x_count: int = 0

    @property
    def r(self) -> int:
        return len(self.stabilizers)

    def stabilizer_matrix(self) -> np.ndarray:
        """r x 2n GF(2) matrix, row i = [x bits | z bits] of stabilizer i."""
        return np.array(
            [np.concatenate([s.x, s.z]) for s in self.stabilizers], dtype=np.uint8
        ).reshape(self.r, 2 * self.n)

    def __repr__(self):
        return f"StabilizerCode({self.family!r}, [[{self.n},{self.k},{self.d}]])"


@dataclass
class CheckList:
    """All Pauli checks of a code, one ancilla per stabilizer (id n + j)."""

    checks: list[PauliCheck]
    ancilla_of_stabilizer: dict[int, int]
    checks_by_stabilizer: dict[int, list[PauliCheck]] = field(default_factory=dict)

    @property
    def stabilizer_of_ancilla(self) -> dict[int, int]:
        return {a: j for j, a in self.ancilla_of_stabilizer.items()}


def validate_code(code: StabilizerCode) -> None:
    """Check every structural invariant; raise CodeValidationError naming the violation."""
    n = code.n
    for i, s in enumerate(code.stabilizers):
        if s.n != n:
            raise CodeValidationError(f"stabilizer {i} acts on {s.n} qubits, expected {n}")
    for name, ops in (("logical_x", code.logical_xs), ("logical_z", code.logical_zs)):
        for i, op in enumerate(ops):
            if op.n != n:
                raise CodeValidationError(f"{name}[{i}] acts on {op.n} qubits, expected {n}")
    for i, j in itertools.combinations(range(code.r), 2):
        if not commutes(code.stabilizers[i], code.stabilizers[j]):
            raise CodeValidationError(
                f"stabilizers {i} and {j} anticommute: "
                f"{code.stabilizers[i].to_string()} vs {code.stabilizers[j].to_string()}"
            )
    mat = code.stabilizer_matrix()
    r = gf2.rank(mat)
    if r != code.r:
        raise CodeValidationError(
            f"stabilizers are GF(2)-dependent: rank {r} < {code.r} generators"
        )
    if code.k != n - code.r:
        raise CodeValidationError(f"k={code.k} but n - r = {n - code.r}")
    if len(code.logical_xs) != code.k or len(code.logical_zs) != code.k:
        raise CodeValidationError(
            f"need {code.k} logical X and Z operators, got "
            f"{len(code.logical_xs)} and {len(code.logical_zs)}"
        )
    for name, ops in (("logical_x", code.logical_xs), ("logical_z", code.logical_zs)):
        for i, op in enumerate(ops):
            for j, s in enumerate(code.stabilizers):
                if not commutes(op, s):
                    raise CodeValidationError(
                        f"{name}[{i}] anticommutes with stabilizer {j}"
                    )
            vec = np.concatenate([op.x, op.z])
            if gf2.in_row_span(vec, mat):
                raise CodeValidationError(f"{name}[{i}] lies in the stabilizer span")


def _parse_pauli_list(values, n: int, key: str) -> list[PauliString]:
    out = []
    for i, text in enumerate(values):
        if not isinstance(text, str) or len(text) != n:
            raise CodeFileError(f"{key}[{i}] is not a length-{n} Pauli string: {text!r}")
        try:
            out.append(PauliString.from_string(text))
        except ValueError as exc:
            raise CodeFileError(f"{key}[{i}]: {exc}") from exc
    return out


def load_code(path) -> StabilizerCode:
    """Load and validate a code file; raises CodeFileError / CodeValidationError."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise CodeFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CodeFileError(f"{path} is not valid JSON: {exc}") from exc
    required = ["family", "n", "k", "d", "logical_xs", "logical_zs",
                "x_stabilizers", "z_stabilizers"]
    missing = [key for key in required if key not in raw]
    if missing:
        raise CodeFileError(f"{path} missing keys: {', '.join(missing)}")
    n = raw["n"]
    if not isinstance(n, int) or n <= 0:
        raise CodeFileError(f"n must be a positive integer, got {n!r}")
    xs = _parse_pauli_list(raw["x_stabilizers"], n, "x_stabilizers")
    zs = _parse_pauli_list(raw["z_stabilizers"], n, "z_stabilizers")
    code = StabilizerCode(
        family=str(raw["family"]),
        n=n,
        k=int(raw["k"]),
        d=int(raw["d"]),
        stabilizers=xs + zs,
        logical_xs=_parse_pauli_list(raw["logical_xs"], n, "logical_xs"),
        logical_zs=_parse_pauli_list(raw["logical_zs"], n, "logical_zs"),
        x_count=len(xs),
    )
    validate_code(code)
    return code


def write_code(code: StabilizerCode, path) -> None:
    payload = {
        "family": code.family,
        "n": code.n,
        "k": code.k,
        "d": code.d,
        "logical_xs": [p.to_string() for p in code.logical_xs],
        "logical_zs": [p.to_string() for p in code.logical_zs],
        "x_stabilizers": [p.to_string() for p in code.stabilizers[: code.x_count]],
        "z_stabilizers": [p.to_string() for p in code.stabilizers[code.x_count:]],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def derive_checks(code: StabilizerCode) -> CheckList:
    """One check per non-identity stabilizer position; ancilla id = n + stabilizer index."""
    checks = []
    by_stab: dict[int, list[PauliCheck]] = {}
    anc = {}
    for j, s in enumerate(code.stabilizers):
        ancilla = code.n + j
        anc[j] = ancilla
        row = []
        for q in s.support():
            letter = s.letter(q)
            if letter == "Y":
                raise CodeValidationError(
                    f"stabilizer {j} has a Y on qubit {q}; checks support X and Z bases only"
                )
            row.append(PauliCheck(data=q, ancilla=ancilla, basis=letter))
        by_stab[j] = row
        checks.extend(row)
    return CheckList(checks=checks, ancilla_of_stabilizer=anc, checks_by_stabilizer=by_stab)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def _css_code(family, n, d, x_supports, z_supports, logical_x_qubits, logical_z_qubits):
    def make(letter, supports):
        out = []
        for supp in supports:
            x = np.zeros(n, dtype=np.uint8)
            z = np.zeros(n, dtype=np.uint8)
            (x if letter == "X" else z)[sorted(supp)] = 1
            out.append(PauliString(x, z))
        return out

    xs = make("X", x_supports)
    zs = make("Z", z_supports)
    lx = make("X", [logical_x_qubits])[0]
    lz = make("Z", [logical_z_qubits])[0]
    code = StabilizerCode(
        family=family, n=n, k=n - len(xs) - len(zs), d=d,
        stabilizers=xs + zs, logical_xs=[lx], logical_zs=[lz], x_count=len(xs),
    )
    validate_code(code)
    return code


def rotated_surface_plaquettes(d: int):
    """Plaquette descriptors for the distance-d rotated surface code.

    Data qubit (row, col) has index row*d + col.  Each descriptor is
    (kind, corners) where corners maps 'nw'/'ne'/'sw'/'se' to a qubit index
    or None for corners cut off at the boundary.  Z-type boundary plaquettes
    sit on the left/right edges, X-type on top/bottom, so the horizontal
    logical Z chain and vertical logical X chain commute with everything.
    """
    if d < 3 or d % 2 == 0:
        raise ValueError(f"rotated surface distance must be odd and >= 3, got {d}")

    def qubit(r, c):
        return r * d + c if 0 <= r < d and 0 <= c < d else None

    plaquettes = []
    for i in range(-1, d):
        for j in range(-1, d):
            corners = {
                "nw": qubit(i, j), "ne": qubit(i, j + 1),
                "sw": qubit(i + 1, j), "se": qubit(i + 1, j + 1),
            }
            present = [q for q in corners.values() if q is not None]
            kind = "X" if (i + j) % 2 else "Z"
            if len(present) == 4:
                plaquettes.append((kind, corners))
            elif len(present) == 2:
                top_or_bottom = i == -1 or i == d - 1
                if (kind == "X") == top_or_bottom:
                    plaquettes.append((kind, corners))
    return plaquettes


def gen_rotated_surface(d: int) -> StabilizerCode:
    """Distance-d rotated surface code: [[d^2, 1, d]].

    Logical Z is the horizontal chain on row 0, logical X the vertical
    chain on column 0.
    """
    plaquettes = rotated_surface_plaquettes(d)
    x_supports = [set(q for q in c.values() if q is not None)
                  for kind, c in plaquettes if kind == "X"]
    z_supports = [set(q for q in c.values() if q is not None)
                  for kind, c in plaquettes if kind == "Z"]
    return _css_code(
        family="rotated_surface", n=d * d, d=d,
        x_supports=x_supports, z_supports=z_supports,
        logical_x_qubits=[r * d for r in range(d)],
        logical_z_qubits=list(range(d)),
    )


def gen_xzzx(d: int) -> StabilizerCode:
    """XZZX variant of the rotated surface code: conjugate every operator by
    a basis swap (X <-> Z) on the qubits of odd checkerboard parity."""
    base = gen_rotated_surface(d)
    swap = np.array([(q // d + q % d) % 2 for q in range(d * d)], dtype=bool)

    def conj(p: PauliString) -> PauliString:
        x, z = p.x.copy(), p.z.copy()
        x[swap], z[swap] = z[swap], x[swap]
        return PauliString(x, z)

    code = StabilizerCode(
        family="xzzx_surface", n=base.n, k=base.k, d=base.d,
        stabilizers=[conj(s) for s in base.stabilizers],
        logical_xs=[conj(p) for p in base.logical_xs],
        logical_zs=[conj(p) for p in base.logical_zs],
        x_count=base.r,
    )
    validate_code(code)
    return code


def gen_color_666(d: int) -> StabilizerCode:
    """Distance-d triangular hexagonal-lattice color code: [[(3d^2+1)/4, 1, d]].

    Sites (x, y) with y in 0..L, x in y..2L-y stepping 2, L = 3(d-1)/2.  A
    site is a face center when ((x-y)/2) mod 3 hits the row's marker; its
    data qubits are the up-to-six lattice neighbours.  Every face carries
    both an X and a Z stabilizer; the logical operators live on the y = 0
    boundary row.  d=3 gives the 7-qubit code.
    """
    if d < 3 or d % 2 == 0:
        raise ValueError(f"color-code distance must be odd and >= 3, got {d}")
    L = 3 * (d - 1) // 2
    marker = {0: 2, 1: 0, 2: 1}
    data_sites, face_sites = [], []
    for y in range(L + 1):
        for x in range(y, 2 * L - y + 1, 2):
            if ((x - y) // 2) % 3 == marker[y % 3]:
                face_sites.append((x, y))
            else:
                data_sites.append((x, y))
    index = {site: i for i, site in enumerate(sorted(data_sites, key=lambda s: (s[1], s[0])))}
    n = len(data_sites)
    assert n == (3 * d * d + 1) // 4

    supports = []
    for (x, y) in sorted(face_sites, key=lambda s: (s[1], s[0])):
        neigh = [(x - 2, y), (x + 2, y), (x - 1, y - 1), (x + 1, y - 1),
                 (x - 1, y + 1), (x + 1, y + 1)]
        supports.append({index[s] for s in neigh if s in index})
    boundary = [index[s] for s in data_sites if s[1] == 0]
    return _css_code(
        family="hexagonal_color", n=n, d=d,
        x_supports=supports, z_supports=supports,
        logical_x_qubits=boundary, logical_z_qubits=boundary,
    )


# Square-octagonal (4.8.8) triangular patches, as face vertex sets on the
# truncated-square tiling with octagon centers at (4i, 4j) and square
# centers at (4i+2, 4j+2).  Boundary faces are octagon halves.  Both
# patches were checked exhaustively: CSS self-orthogonal, k=1, and the
# declared distance is the true minimum weight.
_COLOR_488_FACES = {
    3: [
        [(1, 2), (3, 2), (2, 1), (2, 3)],            # square (2,2)
        [(1, 2), (1, -2), (2, 1), (2, -1)],          # right half of octagon (0,0)
        [(3, 2), (3, -2), (2, 1), (2, -1)],          # left half of octagon (4,0)
    ],
    5: [
        [(1, 2), (3, 2), (2, 1), (2, 3)],            # square (2,2)
        [(5, 2), (7, 2), (6, 1), (6, 3)],            # square (6,2)
        [(1, 6), (3, 6), (2, 5), (2, 7)],            # square (2,6)
        [(3, 2), (5, 2), (2, 3), (6, 3), (2, 5), (6, 5), (3, 6), (5, 6)],  # octagon (4,4)
        [(6, 1), (7, 2), (9, 2), (10, 1)],           # NE half of octagon (8,0)
        [(1, 2), (1, 6), (2, 3), (2, 5)],            # right half of octagon (0,4)
        [(6, 3), (6, 5), (7, 2), (9, 2)],            # SW half of octagon (8,4)
        [(2, 7), (3, 6), (5, 6), (6, 7)],            # bottom half of octagon (4,8)
    ],
}

# Minimum-weight boundary logical supports (site coordinates), one per d.
_COLOR_488_LOGICAL = {
    3: [(1, -2), (3, -2), (2, -1)],
    5: [(2, 1), (6, 1), (10, 1), (3, 2), (5, 2)],
}


def gen_color_488(d: int) -> StabilizerCode:
    """Distance-d triangular square-octagonal color code (d = 3 or 5)."""
    if d not in _COLOR_488_FACES:
        raise ValueError(f"square-octagonal generator ships d in {{3, 5}}, got {d}")
    faces = _COLOR_488_FACES[d]
    verts = sorted({v for f in faces for v in f}, key=lambda p: (p[1], p[0]))
    index = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    supports = [{index[v] for v in f} for f in faces]
    boundary = sorted(index[v] for v in _COLOR_488_LOGICAL[d])
    return _css_code(
        family="square_octagonal_color", n=n, d=d,
        x_supports=supports, z_supports=supports,
        logical_x_qubits=boundary, logical_z_qubits=boundary,
    )


def gen_reference_schedule(code: StabilizerCode, kind: str):
    """Hand-crafted tick assignments for rotated-surface codes.

    Every bulk plaquette runs its four checks on ticks 1-4 in the named
    geometric corner order; weight-2 boundary stabilizers inherit the ticks
    of their surviving corners.

    kinds:
      zigzag        X plaquettes sweep rows (nw, ne, sw, se); Z plaquettes
                    sweep columns (nw, sw, ne, se).  Late hook halves land
                    perpendicular to the matching logical operator.
      clockwise     nw, ne, se, sw for every plaquette.
      anticlockwise nw, sw, se, ne for every plaquette.
    """
    from .schedule import Schedule, SchedulingError

    orders = {
        "zigzag": {"X": ("nw", "ne", "sw", "se"), "Z": ("nw", "sw", "ne", "se")},
        "clockwise": {"X": ("nw", "ne", "se", "sw"), "Z": ("nw", "ne", "se", "sw")},
        "anticlockwise": {"X": ("nw", "sw", "se", "ne"), "Z": ("nw", "sw", "se", "ne")},
    }
    if kind not in orders:
        raise SchedulingError(f"unknown reference schedule {kind!r}; "
                              f"choose from {sorted(orders)}")
    if code.family != "rotated_surface":
        raise SchedulingError(
            f"reference schedules exist only for rotated_surface codes, not {code.family!r}"
        )
    d = code.d
    plaquettes = rotated_surface_plaquettes(d)
    generated = gen_rotated_surface(d)
    if [s.to_string() for s in generated.stabilizers] != [s.to_string() for s in code.stabilizers]:
        raise SchedulingError(
            "code stabilizers do not match the canonical rotated-surface layout"
        )
    # Plaquette order must match the generator's stabilizer order: X first.
    ordered = [p for p in plaquettes if p[0] == "X"] + [p for p in plaquettes if p[0] == "Z"]
    assignments = {}
    for j, (kind_j, corners) in enumerate(ordered):
        ancilla = code.n + j
        for tick0, corner in enumerate(orders[kind][kind_j]):
            q = corners[corner]
            if q is not None:
                assignments[PauliCheck(data=q, ancilla=ancilla, basis=kind_j)] = tick0 + 1
    return Schedule(assignments)


# ---------------------------------------------------------------------------
# Distance
# ---------------------------------------------------------------------------

def brute_force_distance(code: StabilizerCode, w_max: int, guard: int = 10**8):
    """Minimum weight of a Pauli commuting with all stabilizers but outside
    their span, searching weights 1..w_max exhaustively.

    Returns the distance as an int, or None when every weight <= w_max is
    exhausted (distance >= w_max + 1).
    """
    n = code.n
    total = sum(math.comb(n, w) * 3**w for w in range(1, w_max + 1))
    if total > guard:
        raise ValueError(f"{total} candidates exceeds the tractability guard {guard}")
    sx = np.array([s.x for s in code.stabilizers], dtype=np.uint8)
    sz = np.array([s.z for s in code.stabilizers], dtype=np.uint8)
    mat = code.stabilizer_matrix()

    for w in range(1, w_max + 1):
        # All 3^w letter assignments as (x, z) bit rows.
        combos = np.array(list(itertools.product([(1, 0), (1, 1), (0, 1)], repeat=w)),
                          dtype=np.uint8)  # (3^w, w, 2)
        cx, cz = combos[:, :, 0], combos[:, :, 1]
        for supp in itertools.combinations(range(n), w):
            supp = list(supp)
            parities = (cz @ sx[:, supp].T.astype(np.intp)
                        + cx @ sz[:, supp].T.astype(np.intp)) % 2
            hits = np.flatnonzero(~parities.any(axis=1))
            for h in hits:
                vec = np.zeros(2 * n, dtype=np.uint8)
                vec[supp] = cx[h]
                vec[[n + q for q in supp]] = cz[h]
                if not gf2.in_row_span(vec, mat):
                    return w
    return None


# ---------------------------------------------------------------------------
# Fixture library
# ---------------------------------------------------------------------------

FIXTURE_GENERATORS = {
    "steane": lambda: gen_color_666(3),
    "color666_d5": lambda: gen_color_666(5),
    "color666_d9": lambda: gen_color_666(9),
    "color488_d3": lambda: gen_color_488(3),
    "color488_d5": lambda: gen_color_488(5),
    "surface_d3": lambda: gen_rotated_surface(3),
    "surface_d5": lambda: gen_rotated_surface(5),
    "xzzx_d3": lambda: gen_xzzx(3),
}


def fixture_path(name: str) -> Path:
    path = FIXTURE_DIR / f"{name}.json"
    if not path.exists():
        raise CodeFileError(
            f"unknown fixture {name!r}; available: {', '.join(sorted(FIXTURE_GENERATORS))}"
        )
    return path


def load_fixture(name: str) -> StabilizerCode:
    return load_code(fixture_path(name))


def regenerate_fixtures(directory=None) -> None:
    directory = Path(directory) if directory else FIXTURE_DIR
    directory.mkdir(parents=True, exist_ok=True)
    for name, gen in FIXTURE_GENERATORS.items():
        write_code(gen(), directory / f"{name}.json")


if __name__ == "__main__":
    regenerate_fixtures()
    print(f"fixtures written to {FIXTURE_DIR}")
