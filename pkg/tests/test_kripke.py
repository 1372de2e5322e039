"""Transformers and solver instantiations for explicit-state models."""

import dataclasses
import random

import pytest
from hypothesis import given, settings, strategies as st

from ltpdr.engine import Verdict
from ltpdr.kripke import (
    KripkeStructure,
    backward_transformer,
    forward_transformer,
    inverse_backward_transformer,
    pdr_fkr,
    pdr_ibkr,
    pdr_opdual,
)
from ltpdr.oracles import bfs_safe
from util import random_kripke


class TestForwardTransformer:
    def test_empty_gives_initial(self, k1):
        assert forward_transformer(k1)(0) == 0b001

    def test_adds_successors(self, k1):
        assert forward_transformer(k1)(0b001) == 0b011

    def test_full_is_fixed(self, k1):
        assert forward_transformer(k1)(0b111) == 0b111


class TestBackwardTransformer:
    def test_full_set_is_fixed(self, k1):
        assert backward_transformer(k1)(0b111) == 0b111

    def test_universal_predecessors(self, k1):
        # Successors: 0 -> {1}, 1 -> {1}, 2 -> {2}; only 0 and 1 lead into {1}.
        assert backward_transformer(k1)(0b010) == 0b011

    def test_empty_collects_deadlocks(self, k1):
        assert backward_transformer(k1)(0) == 0


class TestInverseBackwardTransformer:
    def test_empty_gives_unsafe(self, k1):
        assert inverse_backward_transformer(k1)(0) == 0b100

    def test_existential_predecessors(self, k1):
        assert inverse_backward_transformer(k1)(0b010) == 0b111

    def test_complement_duality_exhaustive(self, k1):
        ib = inverse_backward_transformer(k1)
        bw = backward_transformer(k1)
        full = 0b111
        for A in range(8):
            assert ib(A) == full & ~(k1.safe & bw(full & ~A))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_duality_on_random_small_models(seed):
    rng = random.Random(seed)
    K = random_kripke(rng, max_states=5)
    ib = inverse_backward_transformer(K)
    bw = backward_transformer(K)
    full = K.full_mask
    for A in range(full + 1):
        assert ib(A) == full & ~(K.safe & bw(full & ~A))


class TestSolverInstances:
    def test_forward_safe(self, k1):
        assert pdr_fkr(k1).verdict is Verdict.TRUE

    def test_forward_unsafe(self, k1):
        K = dataclasses.replace(k1, safe=0b001)
        ans = pdr_fkr(K)
        assert ans.verdict is Verdict.FALSE
        # The counterexample tail is a reachable state outside the safe set.
        assert ans.kleene_witness.elements[-1] & ~K.safe

    def test_forward_empty_initial(self, k1):
        K = dataclasses.replace(k1, initial=0)
        assert pdr_fkr(K).verdict is Verdict.TRUE

    def test_inverse_backward_agrees(self, k1):
        assert pdr_ibkr(k1).verdict is Verdict.TRUE
        K = dataclasses.replace(k1, safe=0b001)
        assert pdr_ibkr(K).verdict is Verdict.FALSE

    def test_inverse_backward_alpha_full(self, k1):
        K = dataclasses.replace(k1, safe=0b111)
        assert pdr_ibkr(K).verdict is Verdict.TRUE

    def test_canonical_decide_agrees(self, k1):
        K = dataclasses.replace(k1, safe=0b001)
        assert pdr_fkr(K, canonical_decide=True).verdict is Verdict.FALSE
        assert pdr_fkr(k1, canonical_decide=True).verdict is Verdict.TRUE

    def test_opdual_agrees(self, k1):
        assert pdr_opdual(k1).verdict is Verdict.TRUE
        K = dataclasses.replace(k1, safe=0b001)
        assert pdr_opdual(K).verdict is Verdict.FALSE


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_all_instances_agree_with_reachability(seed):
    rng = random.Random(seed)
    K = random_kripke(rng)
    expected = Verdict.TRUE if bfs_safe(K).verdict else Verdict.FALSE
    assert pdr_fkr(K, debug=True).verdict is expected
    assert pdr_ibkr(K, debug=True).verdict is expected
    assert pdr_opdual(K).verdict is expected


class TestModelValidation:
    def test_rejects_out_of_range_transition(self):
        with pytest.raises(ValueError):
            KripkeStructure(2, frozenset({(0, 5)}), 0b01, 0b11)

    def test_rejects_oversized_masks(self):
        with pytest.raises(ValueError):
            KripkeStructure(2, frozenset(), 0b100, 0b11)

    def test_adjacency_is_dual(self, k1):
        assert k1.succ == (0b010, 0b010, 0b100)
        assert k1.pred == (0, 0b011, 0b100)
