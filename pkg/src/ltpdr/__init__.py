"""Property-directed reachability over complete lattices.

The generic engine decides whether the least fixed point of a monotone
transformer stays below a bound, producing a checkable certificate either
way.  Shipped instances: explicit-state transition systems (safety), Markov
decision processes (maximum reachability probability), and Markov reward
models (expected accumulated reward).
"""

from .engine import (
    ContractFailure,
    EngineInvariantError,
    HeuristicViolation,
    HeuristicsBundle,
    NegativeHeuristics,
    PDRAnswer,
    PDRConfig,
    RunStats,
    Verdict,
    canonical_heuristics,
    dualize,
    involution_reduce,
    run_combined,
    run_negative,
    run_positive,
)
from .kripke import (
    KripkeStructure,
    SubsetLattice,
    backward_transformer,
    forward_transformer,
    inverse_backward_transformer,
    pdr_fkr,
    pdr_ibkr,
)
from .lattice import (
    InvolutionViolation,
    KTSequence,
    KleeneSequence,
    Lattice,
    LatticeError,
    OppositeLattice,
    Transformer,
    UnsupportedDual,
    check_kleene_witness,
    check_kt_witness,
    is_conclusive_kleene,
    is_conclusive_kt,
    is_kleene_sequence,
    is_kt_sequence,
    kt_order_leq,
)
from .mdp import EpsValue, MDPModel, bellman, pdr_ibmdp, solve_decide_lp
from .mrm import MRMModel, pdr_mrm, reward_bellman
from .oracles import (
    NoConvergence,
    OracleResult,
    bfs_safe,
    initial_chain,
    vi_expected_reward,
    vi_max_reach,
)
from .simplex import Infeasible, Unbounded, simplex_min

__version__ = "0.1.0"
