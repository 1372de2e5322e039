"""Explicit-state transition-system instance over the powerset lattice.

State sets are int bitmasks over ``range(state_count)``.  Three monotone
transformers are provided:

* forward: initial states plus successors (least fixed point = reachable set);
* backward: universal predecessors of a set;
* inverse-backward: unsafe states plus existential predecessors, whose least
  fixed point is the set of states that can reach an unsafe state.

``pdr_fkr`` decides safety with the forward transformer bounded by the safe
set; ``pdr_ibkr`` decides the same property with the inverse-backward
transformer bounded by the complement of the initial set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .engine import (
    HeuristicsBundle,
    NegativeHeuristics,
    PDRAnswer,
    Transformer,
    canonical_heuristics,
    dualize,
    join_induction_proposer,
    run_combined,
    run_negative,
    run_positive,
)
from .lattice import Lattice


def _lowest_bit(mask: int) -> int:
    return mask & -mask


@dataclass(frozen=True)
class KripkeStructure:
    state_count: int
    transitions: frozenset  # of (src, dst) pairs
    initial: int  # bitmask
    safe: int  # bitmask

    def __post_init__(self):
        n = self.state_count
        if n <= 0:
            raise ValueError("state_count must be positive")
        full = (1 << n) - 1
        if self.initial & ~full or self.safe & ~full:
            raise ValueError("initial/safe sets exceed the state range")
        for (a, b) in self.transitions:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"transition ({a},{b}) out of range")
        succ = [0] * n
        pred = [0] * n
        for (a, b) in self.transitions:
            succ[a] |= 1 << b
            pred[b] |= 1 << a
        object.__setattr__(self, "succ", tuple(succ))
        object.__setattr__(self, "pred", tuple(pred))

    @property
    def full_mask(self) -> int:
        return (1 << self.state_count) - 1


class SubsetLattice(Lattice):
    """Powerset of a finite state space, elements as bitmasks.

    ``leq_info`` reports the mask of states violating the inclusion, which
    the set heuristics use directly.
    """

    def __init__(self, state_count: int):
        self.state_count = state_count
        self.bot = 0
        self.top = (1 << state_count) - 1

    def leq_info(self, a, b):
        diff = a & ~b
        return (diff == 0, diff)

    def meet(self, a, b):
        return a & b

    def join(self, a, b):
        return a | b


def _post(K: KripkeStructure, mask: int) -> int:
    out = 0
    m = mask
    while m:
        bit = _lowest_bit(m)
        out |= K.succ[bit.bit_length() - 1]
        m ^= bit
    return out


def _pre_exists(K: KripkeStructure, mask: int) -> int:
    out = 0
    m = mask
    while m:
        bit = _lowest_bit(m)
        out |= K.pred[bit.bit_length() - 1]
        m ^= bit
    return out


def forward_transformer(K: KripkeStructure) -> Transformer:
    lat = SubsetLattice(K.state_count)
    return Transformer(lat, lambda A: K.initial | _post(K, A))


def backward_transformer(K: KripkeStructure) -> Transformer:
    lat = SubsetLattice(K.state_count)
    full = lat.top

    def fn(A):
        out = 0
        for s in range(K.state_count):
            if K.succ[s] & ~A == 0:
                out |= 1 << s
        return out & full

    return Transformer(lat, fn)


def inverse_backward_transformer(K: KripkeStructure) -> Transformer:
    lat = SubsetLattice(K.state_count)
    unsafe = lat.top & ~K.safe
    return Transformer(lat, lambda A: unsafe | _pre_exists(K, A))


def _set_heuristics(lat: SubsetLattice, base_mask: int, contributor_masks: tuple,
                    canonical_decide: bool) -> HeuristicsBundle:
    """Shared choice functions for transformers of shape F(A) = base | image(A),
    where ``contributor_masks[s]`` is the set of states whose presence in A
    puts ``s`` into image(A)."""

    def candidate(last, alpha, diff):
        # diff is the violation mask X_{n-1} & ~alpha from leq_info.
        return _lowest_bit(diff)

    def decide(x_prev, head, fx):
        if canonical_decide:
            return x_prev
        x = 0
        m = head & ~base_mask
        while m:
            bit = _lowest_bit(m)
            preds = contributor_masks[bit.bit_length() - 1] & x_prev
            x |= _lowest_bit(preds)
            m ^= bit
        return x

    def conflict(x_prev, head, fx):
        return lat.top & ~(head & ~fx)

    return HeuristicsBundle(candidate, decide, conflict)


def forward_bundle(K: KripkeStructure, canonical_decide: bool = False) -> HeuristicsBundle:
    lat = SubsetLattice(K.state_count)
    return _set_heuristics(lat, K.initial, K.pred, canonical_decide)


def inverse_backward_bundle(K: KripkeStructure, canonical_decide: bool = False) -> HeuristicsBundle:
    lat = SubsetLattice(K.state_count)
    return _set_heuristics(lat, lat.top & ~K.safe, K.succ, canonical_decide)


def _set_negative_heuristics(lat: SubsetLattice, base_mask: int,
                             contributor_masks: tuple) -> NegativeHeuristics:
    def candidate(alpha):
        bad = lat.top & ~alpha
        if bad == 0:
            return None
        return _lowest_bit(bad)

    def decide(head):
        if head & ~base_mask == 0:
            return 0
        x = 0
        m = head & ~base_mask
        while m:
            bit = _lowest_bit(m)
            preds = contributor_masks[bit.bit_length() - 1]
            if preds == 0:
                return None
            x |= _lowest_bit(preds)
            m ^= bit
        return x

    return NegativeHeuristics(candidate, decide)


def forward_negative_heuristics(K: KripkeStructure) -> NegativeHeuristics:
    lat = SubsetLattice(K.state_count)
    return _set_negative_heuristics(lat, K.initial, K.pred)


def inverse_backward_negative_heuristics(K: KripkeStructure) -> NegativeHeuristics:
    lat = SubsetLattice(K.state_count)
    return _set_negative_heuristics(lat, lat.top & ~K.safe, K.succ)


def pdr_fkr(K: KripkeStructure, *, budget: int = 100000, schedule: str = "default",
            seed: Optional[int] = None, debug: bool = False, trace=None,
            canonical_decide: bool = False) -> PDRAnswer:
    F = forward_transformer(K)
    return run_combined(F, K.safe, forward_bundle(K, canonical_decide),
                        schedule=schedule, budget=budget, seed=seed,
                        debug=debug, trace=trace)


def pdr_ibkr(K: KripkeStructure, *, budget: int = 100000, schedule: str = "default",
             seed: Optional[int] = None, debug: bool = False, trace=None,
             canonical_decide: bool = False) -> PDRAnswer:
    F = inverse_backward_transformer(K)
    alpha = F.lattice.top & ~K.initial
    return run_combined(F, alpha, inverse_backward_bundle(K, canonical_decide),
                        schedule=schedule, budget=budget, seed=seed,
                        debug=debug, trace=trace)


def pdr_fkr_positive(K: KripkeStructure, *, budget: int = 100000, debug: bool = False,
                     trace=None) -> PDRAnswer:
    F = forward_transformer(K)
    return run_positive(F, K.safe, join_induction_proposer(F),
                        budget=budget, debug=debug, trace=trace)


def pdr_fkr_negative(K: KripkeStructure, *, budget: int = 100000, debug: bool = False,
                     trace=None) -> PDRAnswer:
    F = forward_transformer(K)
    return run_negative(F, K.safe, forward_negative_heuristics(K),
                        budget=budget, debug=debug, trace=trace)


def pdr_ibkr_positive(K: KripkeStructure, *, budget: int = 100000,
                      debug: bool = False, trace=None) -> PDRAnswer:
    F = inverse_backward_transformer(K)
    alpha = F.lattice.top & ~K.initial
    return run_positive(F, alpha, join_induction_proposer(F),
                        budget=budget, debug=debug, trace=trace)


def pdr_ibkr_negative(K: KripkeStructure, *, budget: int = 100000,
                      debug: bool = False, trace=None) -> PDRAnswer:
    F = inverse_backward_transformer(K)
    alpha = F.lattice.top & ~K.initial
    return run_negative(F, alpha, inverse_backward_negative_heuristics(K),
                        budget=budget, debug=debug, trace=trace)


def pdr_opdual(K: KripkeStructure, *, budget: int = 100000, schedule: str = "default",
               seed: Optional[int] = None, debug: bool = False, trace=None) -> PDRAnswer:
    """Decide safety as the dual under-approximation problem: is the initial
    set below the greatest fixed point of ``x -> safe /\\ backward(x)``?

    The engine runs over the opposite lattice with the canonical (lattice-
    agnostic) heuristics.
    """
    Fb = backward_transformer(K)
    lat = Fb.lattice
    G = Transformer(lat, lambda A: K.safe & Fb(A))
    G_op, alpha_op = dualize(G, K.initial)
    return run_combined(G_op, alpha_op, canonical_heuristics(G_op),
                        schedule=schedule, budget=budget, seed=seed,
                        debug=debug, trace=trace)
