"""Tests for the binary-symplectic Pauli algebra and check conjugation."""

import itertools

import numpy as np
import pytest

from synsched.pauli import (DimensionError, PauliCheck, PauliString, commutes,
                            compose, conjugate_through_check, symplectic_parity,
                            syndrome)


def mul_letters(p: str, q: str) -> str:
    """Independent letter-table product oracle (phase-free)."""
    table = {
        ("X", "Z"): "Y", ("Z", "X"): "Y",
        ("X", "Y"): "Z", ("Y", "X"): "Z",
        ("Y", "Z"): "X", ("Z", "Y"): "X",
    }
    out = []
    for a, b in zip(p, q):
        if a == "I":
            out.append(b)
        elif b == "I":
            out.append(a)
        elif a == b:
            out.append("I")
        else:
            out.append(table[(a, b)])
    return "".join(out)


class TestCompose:
    def test_x_times_z_is_y(self):
        assert compose(PauliString.from_string("X"),
                       PauliString.from_string("Z")).to_string() == "Y"

    def test_self_inverse(self, rng):
        for _ in range(50):
            s = "".join(rng.choice(list("IXYZ"), size=6))
            p = PauliString.from_string(s)
            assert compose(p, p).is_identity()

    def test_against_letter_table_oracle(self, rng):
        for _ in range(200):
            a = "".join(rng.choice(list("IXYZ"), size=8))
            b = "".join(rng.choice(list("IXYZ"), size=8))
            got = compose(PauliString.from_string(a), PauliString.from_string(b))
            assert got.to_string() == mul_letters(a, b)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            compose(PauliString.from_string("XX"), PauliString.from_string("X"))


class TestCommutes:
    def test_single_qubit(self):
        assert not commutes(PauliString.from_string("X"), PauliString.from_string("Z"))
        assert commutes(PauliString.from_string("X"), PauliString.from_string("X"))
        assert commutes(PauliString.from_string("I"), PauliString.from_string("Y"))

    def test_two_anticommuting_positions(self):
        assert commutes(PauliString.from_string("XX"), PauliString.from_string("ZZ"))

    def test_steane_stabilizers_pairwise_commute(self, steane):
        # Oracle: dense symplectic product over GF(2).
        mat = steane.stabilizer_matrix()
        n = steane.n
        sx, sz = mat[:, :n].astype(int), mat[:, n:].astype(int)
        gram = (sx @ sz.T + sz @ sx.T) % 2
        assert not gram.any()
        for a, b in itertools.combinations(steane.stabilizers, 2):
            assert commutes(a, b)

    def test_bilinearity(self, rng):
        for _ in range(100):
            a, b, c = (PauliString(rng.integers(0, 2, 7), rng.integers(0, 2, 7))
                       for _ in range(3))
            assert symplectic_parity(compose(a, b), c) == (
                symplectic_parity(a, c) ^ symplectic_parity(b, c))


class TestSyndrome:
    def test_identity_error(self, steane):
        assert not syndrome(PauliString.identity(7), steane.stabilizers).any()

    def test_stabilizer_as_error(self, steane):
        for s in steane.stabilizers:
            assert not syndrome(s, steane.stabilizers).any()

    def test_single_x_against_dense_oracle(self, steane):
        e = PauliString.single(7, 0, "X")
        # Dense GF(2) oracle: bit i = Sz[i] . e.x + Sx[i] . e.z mod 2.
        sx = np.array([s.x for s in steane.stabilizers], dtype=int)
        sz = np.array([s.z for s in steane.stabilizers], dtype=int)
        expected = (sz @ e.x.astype(int) + sx @ e.z.astype(int)) % 2
        assert np.array_equal(syndrome(e, steane.stabilizers), expected)
        assert syndrome(e, steane.stabilizers).any()

    def test_linearity(self, steane, rng):
        for _ in range(50):
            a = PauliString(rng.integers(0, 2, 7), rng.integers(0, 2, 7))
            b = PauliString(rng.integers(0, 2, 7), rng.integers(0, 2, 7))
            lhs = syndrome(compose(a, b), steane.stabilizers)
            rhs = syndrome(a, steane.stabilizers) ^ syndrome(b, steane.stabilizers)
            assert np.array_equal(lhs, rhs)


class TestConjugateThroughCheck:
    def test_z_check_propagates_z_from_ancilla(self):
        # Z on the ancilla picks up a Z on the data qubit.
        frame = PauliString.single(2, 1, "Z")
        out = conjugate_through_check(frame, PauliCheck(data=0, ancilla=1, basis="Z"))
        assert out.to_string() == "ZZ"

    def test_z_check_keeps_x_on_ancilla(self):
        frame = PauliString.single(2, 1, "X")
        out = conjugate_through_check(frame, PauliCheck(data=0, ancilla=1, basis="Z"))
        assert out.to_string() == "IX"

    def test_x_check_propagates_x_from_ancilla_z(self):
        # Composite X-check: Z_anc -> Z_anc X_data.
        frame = PauliString.single(2, 1, "Z")
        out = conjugate_through_check(frame, PauliCheck(data=0, ancilla=1, basis="X"))
        assert out.to_string() == "XZ"

    def test_zzxz_hook(self):
        # ZZXZ stabilizer on data 0..3, ancilla 4.  A Z hook after the second
        # check propagates through the remaining X check and Z check: X lands
        # on the X check's data qubit, Z on the last Z check's data qubit.
        frame = PauliString.single(5, 4, "Z")
        frame = conjugate_through_check(frame, PauliCheck(data=2, ancilla=4, basis="X"))
        frame = conjugate_through_check(frame, PauliCheck(data=3, ancilla=4, basis="Z"))
        assert frame.to_string() == "IIXZZ"

    def test_involution(self, rng):
        for basis in ("X", "Z"):
            check = PauliCheck(data=1, ancilla=3, basis=basis)
            for _ in range(30):
                frame = PauliString(rng.integers(0, 2, 4), rng.integers(0, 2, 4))
                twice = conjugate_through_check(
                    conjugate_through_check(frame, check), check)
                assert twice == frame

    def test_preserves_commutation(self, rng):
        for basis in ("X", "Z"):
            check = PauliCheck(data=0, ancilla=2, basis=basis)
            for _ in range(50):
                f = PauliString(rng.integers(0, 2, 3), rng.integers(0, 2, 3))
                g = PauliString(rng.integers(0, 2, 3), rng.integers(0, 2, 3))
                assert symplectic_parity(f, g) == symplectic_parity(
                    conjugate_through_check(f, check),
                    conjugate_through_check(g, check))

    def test_out_of_range(self):
        with pytest.raises(DimensionError):
            conjugate_through_check(PauliString.identity(2),
                                    PauliCheck(data=0, ancilla=5, basis="Z"))


class TestText:
    def test_round_trip(self, rng):
        for _ in range(20):
            s = "".join(rng.choice(list("IXYZ"), size=10))
            assert PauliString.from_string(s).to_string() == s

    def test_y_maps_to_both_bits(self):
        p = PauliString.from_string("Y")
        assert p.x[0] == 1 and p.z[0] == 1

    def test_weight_and_support(self):
        p = PauliString.from_string("IXIYZ")
        assert p.weight() == 3
        assert p.support() == [1, 3, 4]

    def test_invalid_letter(self):
        with pytest.raises(ValueError):
            PauliString.from_string("IXQ")
