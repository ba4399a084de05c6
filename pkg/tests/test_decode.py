"""Decoder tests: syndrome-consistency contract, exactness, and divergence."""

import itertools

import numpy as np
import pytest

from synsched import gf2
from synsched.codes import load_fixture
from synsched.decode import (DecodingError, MatchingDecoder, MLLookupDecoder,
                             build_decoding_model, make_decoder)
from synsched.pauli import PauliString, compose, symplectic_parity, syndrome
from synsched.sim import NoiseModel


def residual_in_span(code, error, correction):
    residual = compose(error, correction)
    vec = np.concatenate([residual.x, residual.z])
    return gf2.in_row_span(vec, code.stabilizer_matrix())


def random_syndromes(r, count, rng):
    return rng.integers(0, 2, size=(count, r)).astype(np.uint8)


@pytest.fixture(scope="module")
def steane_model(request):
    code = load_fixture("steane")
    return code, build_decoding_model(code)


class TestContract:
    @pytest.mark.parametrize("name", ["ml", "uf", "bposd"])
    def test_consistent_on_random_syndromes(self, name, steane_model, rng):
        code, model = steane_model
        decoder = make_decoder(name, model)
        for s in random_syndromes(code.r, 400, rng):
            correction = decoder.decode(s)
            assert np.array_equal(syndrome(correction, code.stabilizers), s), name

    def test_mwpm_consistent_on_surface(self, surface_d3, rng):
        decoder = make_decoder("mwpm", build_decoding_model(surface_d3))
        for s in random_syndromes(surface_d3.r, 400, rng):
            correction = decoder.decode(s)
            assert np.array_equal(syndrome(correction, surface_d3.stabilizers), s)

    @pytest.mark.parametrize("name", ["ml", "uf", "bposd"])
    def test_zero_syndrome_identity(self, name, steane_model):
        code, model = steane_model
        decoder = make_decoder(name, model)
        assert decoder.decode(np.zeros(code.r, dtype=np.uint8)).is_identity()

    def test_unknown_name(self, steane_model):
        _, model = steane_model
        with pytest.raises(DecodingError, match="bposd"):
            make_decoder("magic", model)

    @pytest.mark.parametrize("name", ["ml", "uf", "bposd"])
    def test_deterministic_across_constructions(self, name, steane_model, rng):
        code, model = steane_model
        d1, d2 = make_decoder(name, model), make_decoder(name, model)
        for s in random_syndromes(code.r, 50, rng):
            assert d1.decode(s) == d2.decode(s)

    def test_decode_batch_matches_scalar(self, steane_model, rng):
        code, model = steane_model
        decoder = make_decoder("bposd", model)
        syndromes = random_syndromes(code.r, 100, rng)
        cx, cz = decoder.decode_batch(syndromes)
        for i, s in enumerate(syndromes):
            single = decoder.decode(s)
            assert np.array_equal(cx[i], single.x) and np.array_equal(cz[i], single.z)


class TestMLLookup:
    def test_weight_one_decoded_to_itself(self, steane_model):
        code, model = steane_model
        decoder = MLLookupDecoder(model)
        for q in range(code.n):
            for letter in "XYZ":
                e = PauliString.single(code.n, q, letter)
                assert decoder.decode(syndrome(e, code.stabilizers)) == e

    def test_corrects_all_weight_two_on_d5(self, color488_d5):
        code = color488_d5
        decoder = MLLookupDecoder(build_decoding_model(code))
        letters = "XYZ"
        for q1, q2 in itertools.combinations(range(code.n), 2):
            for l1 in letters:
                for l2 in letters:
                    e = compose(PauliString.single(code.n, q1, l1),
                                PauliString.single(code.n, q2, l2))
                    c = decoder.decode(syndrome(e, code.stabilizers))
                    assert residual_in_span(code, e, c)

    def test_optimality_against_other_decoders(self, steane_model, rng):
        code, model = steane_model
        ml = MLLookupDecoder(model)
        others = [make_decoder(name, model) for name in ("uf", "bposd")]
        for s in random_syndromes(code.r, 200, rng):
            w_ml = ml.decode(s).weight()
            for other in others:
                assert w_ml <= other.decode(s).weight()

    def test_rank_cap(self, color666_d5):
        model = build_decoding_model(color666_d5)
        decoder = MLLookupDecoder(model)  # r = 18 fits under the cap
        assert decoder.decode(np.zeros(18, dtype=np.uint8)).is_identity()
        model.r = 25
        with pytest.raises(DecodingError, match="cap"):
            MLLookupDecoder(model)


class TestUnionFind:
    def test_weight_one_sweep_d3_surface(self, surface_d3):
        decoder = make_decoder("uf", build_decoding_model(surface_d3))
        for q in range(surface_d3.n):
            for letter in "XYZ":
                e = PauliString.single(surface_d3.n, q, letter)
                c = decoder.decode(syndrome(e, surface_d3.stabilizers))
                assert residual_in_span(surface_d3, e, c)

    def test_diverges_from_ml_on_weight_two(self, color666_d5):
        # There is a weight-2 X pattern the cluster decoder and the exact
        # decoder interpret differently (one residual is a stabilizer, the
        # other a logical).
        code = color666_d5
        model = build_decoding_model(code)
        uf = make_decoder("uf", model)
        ml = make_decoder("ml", model)
        diverged = False
        for q1, q2 in itertools.combinations(range(code.n), 2):
            e = compose(PauliString.single(code.n, q1, "X"),
                        PauliString.single(code.n, q2, "X"))
            s = syndrome(e, code.stabilizers)
            ok_uf = residual_in_span(code, e, uf.decode(s))
            ok_ml = residual_in_span(code, e, ml.decode(s))
            if ok_uf != ok_ml:
                diverged = True
                break
        assert diverged


class TestMatching:
    def test_rejects_color_codes(self, steane_model):
        code, model = steane_model
        with pytest.raises(DecodingError, match="flips 3 checks"):
            MatchingDecoder(model)

    def test_single_bulk_error_d5(self, surface_d5):
        decoder = make_decoder("mwpm", build_decoding_model(surface_d5))
        e = PauliString.single(surface_d5.n, 12, "X")  # center qubit
        assert decoder.decode(syndrome(e, surface_d5.stabilizers)) == e

    def test_weight_one_exhaustive_d3(self, surface_d3):
        decoder = make_decoder("mwpm", build_decoding_model(surface_d3))
        for q in range(9):
            for letter in "XYZ":
                e = PauliString.single(9, q, letter)
                c = decoder.decode(syndrome(e, surface_d3.stabilizers))
                assert residual_in_span(surface_d3, e, c)

    def test_weight_two_random_d5(self, surface_d5, rng):
        decoder = make_decoder("mwpm", build_decoding_model(surface_d5))
        letters = "XYZ"
        for _ in range(200):
            q1, q2 = rng.choice(surface_d5.n, size=2, replace=False)
            e = compose(PauliString.single(25, int(q1), letters[rng.integers(3)]),
                        PauliString.single(25, int(q2), letters[rng.integers(3)]))
            c = decoder.decode(syndrome(e, surface_d5.stabilizers))
            assert residual_in_span(surface_d5, e, c)

    def test_prior_weighted_edges(self, surface_d3):
        noise = NoiseModel(per_qubit_overrides={4: (5.0, 5.0)})
        decoder = make_decoder("mwpm", build_decoding_model(surface_d3, noise))
        e = PauliString.single(9, 4, "X")
        c = decoder.decode(syndrome(e, surface_d3.stabilizers))
        assert residual_in_span(surface_d3, e, c)


class TestBpOsd:
    def test_weight_one_sweep_steane(self, steane_model):
        code, model = steane_model
        decoder = make_decoder("bposd", model)
        for q in range(code.n):
            for letter in "XYZ":
                e = PauliString.single(code.n, q, letter)
                c = decoder.decode(syndrome(e, code.stabilizers))
                assert residual_in_span(code, e, c)

    def test_random_syndromes_consistent_17(self, color488_d5, rng):
        decoder = make_decoder("bposd", build_decoding_model(color488_d5))
        for s in random_syndromes(color488_d5.r, 500, rng):
            c = decoder.decode(s)
            assert np.array_equal(syndrome(c, color488_d5.stabilizers), s)
