"""Tests for the code model, file I/O, generators, and distance search."""

import itertools
import json

import numpy as np
import pytest

from synsched import codes as codes_mod
from synsched import gf2
from synsched.codes import (CodeFileError, CodeValidationError, brute_force_distance,
                            derive_checks, gen_color_488, gen_color_666,
                            gen_reference_schedule, gen_rotated_surface, gen_xzzx,
                            load_code, load_fixture, write_code)
from synsched.pauli import PauliString, commutes
from synsched.schedule import SchedulingError, validate_schedule


class TestLoadValidate:
    def test_steane_fixture(self, steane):
        assert (steane.n, steane.r, steane.k, steane.d) == (7, 6, 1, 3)

    def test_anticommuting_pair_names_both(self, tmp_path):
        payload = {
            "family": "broken", "n": 2, "k": 0, "d": 1,
            "logical_xs": [], "logical_zs": [],
            "x_stabilizers": ["XI"], "z_stabilizers": ["ZI"],
        }
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(CodeValidationError, match="0 and 1 anticommute"):
            load_code(path)

    def test_missing_key(self, tmp_path):
        path = tmp_path / "missing.json"
        path.write_text(json.dumps({"family": "x", "n": 1}))
        with pytest.raises(CodeFileError, match="missing keys"):
            load_code(path)

    def test_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        with pytest.raises(CodeFileError, match="not valid JSON"):
            load_code(path)

    def test_dependent_stabilizers_rejected(self, tmp_path):
        payload = {
            "family": "dep", "n": 2, "k": 1, "d": 1,
            "logical_xs": ["XI"], "logical_zs": ["ZI"],
            "x_stabilizers": [], "z_stabilizers": ["ZZ", "ZZ"],
        }
        path = tmp_path / "dep.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(CodeValidationError, match="GF\\(2\\)-dependent"):
            load_code(path)

    def test_color666_d5_all_commute(self, color666_d5):
        assert color666_d5.r == 18
        for i, j in itertools.combinations(range(18), 2):
            assert commutes(color666_d5.stabilizers[i], color666_d5.stabilizers[j])

    def test_round_trip_every_fixture(self, tmp_path):
        for name in codes_mod.FIXTURE_GENERATORS:
            code = load_fixture(name)
            out = tmp_path / f"{name}.json"
            write_code(code, out)
            again = load_code(out)
            assert [s.to_string() for s in again.stabilizers] == \
                   [s.to_string() for s in code.stabilizers]
            assert [p.to_string() for p in again.logical_xs] == \
                   [p.to_string() for p in code.logical_xs]
            assert (again.family, again.n, again.k, again.d, again.x_count) == \
                   (code.family, code.n, code.k, code.d, code.x_count)


class TestDeriveChecks:
    def test_steane_has_24_checks(self, steane):
        checklist = derive_checks(steane)
        assert len(checklist.checks) == 24
        assert checklist.ancilla_of_stabilizer == {j: 7 + j for j in range(6)}

    def test_zzxz_single_stabilizer(self):
        code = codes_mod.StabilizerCode(
            family="toy", n=4, k=3, d=1,
            stabilizers=[PauliString.from_string("ZZXZ")],
            logical_xs=[], logical_zs=[], x_count=1,
        )
        checklist = derive_checks(code)
        assert len(checklist.checks) == 4
        bases = [c.basis for c in sorted(checklist.checks, key=lambda c: c.data)]
        assert bases == ["Z", "Z", "X", "Z"]

    def test_surface_d5_counts(self, surface_d5):
        # 16 bulk plaquettes of weight 4 plus 8 boundary pairs of weight 2.
        checklist = derive_checks(surface_d5)
        assert len(checklist.ancilla_of_stabilizer) == 24
        assert len(checklist.checks) == 80

    def test_weight_sum_equals_check_count(self, color488_d5):
        checklist = derive_checks(color488_d5)
        assert len(checklist.checks) == sum(s.weight() for s in color488_d5.stabilizers)

    def test_y_stabilizer_rejected(self):
        code = codes_mod.StabilizerCode(
            family="ytoy", n=2, k=1, d=1,
            stabilizers=[PauliString.from_string("YY")],
            logical_xs=[], logical_zs=[], x_count=1,
        )
        with pytest.raises(CodeValidationError, match="Y on qubit"):
            derive_checks(code)


class TestGenerators:
    def test_surface_d3(self):
        code = gen_rotated_surface(3)
        assert (code.n, code.k, code.d, code.r) == (9, 1, 3, 8)

    def test_surface_d5(self):
        code = gen_rotated_surface(5)
        assert (code.n, code.r) == (25, 24)
        assert gf2.rank(code.stabilizer_matrix()) == 24

    def test_surface_logicals(self, surface_d5):
        lx, lz = surface_d5.logical_xs[0], surface_d5.logical_zs[0]
        assert not commutes(lx, lz)
        for s in surface_d5.stabilizers:
            assert commutes(lx, s) and commutes(lz, s)

    def test_even_d_rejected(self):
        with pytest.raises(ValueError):
            gen_rotated_surface(4)
        with pytest.raises(ValueError):
            gen_rotated_surface(1)

    def test_color666_sizes(self):
        for d, n in ((3, 7), (5, 19), (7, 37), (9, 61)):
            code = gen_color_666(d)
            assert (code.n, code.k, code.d) == (n, 1, d)

    def test_color488_sizes(self):
        assert (gen_color_488(3).n, gen_color_488(5).n) == (7, 17)

    def test_xzzx_plaquettes_are_mixed(self, xzzx_d3):
        # Every weight-4 stabilizer carries two X and two Z letters.
        for s in xzzx_d3.stabilizers:
            letters = sorted(s.letter(q) for q in s.support())
            if s.weight() == 4:
                assert letters == ["X", "X", "Z", "Z"]


class TestReferenceSchedules:
    def test_clockwise_corner_order(self, surface_d3):
        schedule = gen_reference_schedule(surface_d3, "clockwise")
        plaquettes = codes_mod.rotated_surface_plaquettes(3)
        ordered = [p for p in plaquettes if p[0] == "X"] + \
                  [p for p in plaquettes if p[0] == "Z"]
        # Find a bulk plaquette and check nw, ne, se, sw -> ticks 1..4.
        for j, (kind, corners) in enumerate(ordered):
            if all(q is not None for q in corners.values()):
                ticks = {name: schedule.assignments[
                    next(c for c in schedule.assignments
                         if c.ancilla == 9 + j and c.data == q)]
                    for name, q in corners.items()}
                assert [ticks[k] for k in ("nw", "ne", "se", "sw")] == [1, 2, 3, 4]
                break
        else:
            pytest.fail("no bulk plaquette found")

    @pytest.mark.parametrize("kind", ["zigzag", "clockwise", "anticlockwise"])
    def test_depth_four_and_conflict_free(self, surface_d3, kind):
        schedule = gen_reference_schedule(surface_d3, kind)
        assert schedule.depth == 4
        report = validate_schedule(surface_d3, schedule)
        assert not report.conflicts
        if kind == "zigzag":
            assert report.ok

    def test_zigzag_differs_from_clockwise(self, surface_d3):
        zig = gen_reference_schedule(surface_d3, "zigzag")
        clock = gen_reference_schedule(surface_d3, "clockwise")
        assert zig.canonical() != clock.canonical()

    def test_non_surface_rejected(self, steane):
        with pytest.raises(SchedulingError):
            gen_reference_schedule(steane, "zigzag")

    def test_unknown_kind_rejected(self, surface_d3):
        with pytest.raises(SchedulingError):
            gen_reference_schedule(surface_d3, "spiral")


class TestDistance:
    def test_steane(self, steane):
        assert brute_force_distance(steane, 4) == 3

    def test_surface_d3(self, surface_d3):
        assert brute_force_distance(surface_d3, 4) == 3

    def test_xzzx_d3(self, xzzx_d3):
        assert brute_force_distance(xzzx_d3, 4) == 3

    def test_color488_d5_exhaustive(self, color488_d5):
        assert brute_force_distance(color488_d5, 5) == 5

    def test_returns_none_when_exhausted(self, color488_d5):
        assert brute_force_distance(color488_d5, 3) is None

    def test_guard(self, color666_d5):
        with pytest.raises(ValueError, match="guard"):
            brute_force_distance(color666_d5, 5, guard=10)
