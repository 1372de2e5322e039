"""The generic PDR engines and their rewrite rules.

Three engines share the rule vocabulary:

* ``run_combined`` -- the full engine, interleaving frame strengthening with
  obligation-driven counterexample search (rules Valid, Unfold, Induction,
  Candidate, Model, Decide, Conflict);
* ``run_positive`` -- frames only (Valid, Unfold, Induction); can answer True
  or exhaust its budget, never False;
* ``run_negative`` -- obligations only (Candidate, Model, Decide); can answer
  False, get Stuck, or exhaust its budget, never True.

All rules are pure config-to-config steps; the runners add scheduling,
budgeting, statistics, optional per-step invariant checking (``debug=True``)
and an optional trace sink.  Heuristic outputs are always re-verified against
their contracts; instance code is never trusted.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Optional

from .lattice import (
    InvolutionViolation,
    KTSequence,
    KleeneSequence,
    Lattice,
    OppositeLattice,
    Transformer,
    check_kleene_witness,
    check_kt_witness,
    is_conclusive_kt,
    is_kleene_sequence,
    is_kt_sequence,
)


class HeuristicViolation(Exception):
    """An instance heuristic returned a value breaking its contract."""


class ContractFailure(Exception):
    """A heuristic was invoked with its stated precondition violated."""


class EngineInvariantError(Exception):
    """A rule application produced an invalid configuration (engine bug)."""


class Verdict(Enum):
    TRUE = "True"
    FALSE = "False"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    STUCK = "Stuck"


@dataclass
class RunStats:
    rule_counts: dict[str, int] = field(default_factory=dict)
    steps: int = 0
    frame_count: int = 0
    wall_time: float = 0.0

    def count(self, rule: str) -> None:
        self.rule_counts[rule] = self.rule_counts.get(rule, 0) + 1


@dataclass(frozen=True)
class PDRAnswer:
    verdict: Verdict
    kt_witness: Optional[KTSequence] = None
    kleene_witness: Optional[KleeneSequence] = None
    stats: Optional[RunStats] = None


@dataclass(frozen=True)
class PDRConfig:
    """Engine state: the frame chain plus the pending obligation chain."""

    frames: KTSequence
    obligations: KleeneSequence


@dataclass(frozen=True)
class HeuristicsBundle:
    """Instance-supplied choice functions for the combined engine.

    Each function may return None ("no choice available"); any returned
    element is re-verified by the engine and a violation aborts the run.
    ``choose_decide``/``choose_conflict`` receive ``F(X_{i-1})`` precomputed.
    """

    choose_candidate: Callable[[Any, Any, Any], Optional[Any]]
    choose_decide: Callable[[Any, Any, Any], Optional[Any]]
    choose_conflict: Callable[[Any, Any, Any], Optional[Any]]
    choose_induction: Optional[Callable[[KTSequence], Optional[tuple[int, Any]]]] = None


@dataclass(frozen=True)
class NegativeHeuristics:
    """Choice functions for the one-sided negative engine.

    Candidate here is unconstrained by frames: any ``x`` not below alpha.
    Decide must produce ``x`` with ``C_head <= F(x)``.
    """

    choose_candidate: Callable[[Any], Optional[Any]]
    choose_decide: Callable[[Any], Optional[Any]]


def _empty_obligations(n: int) -> KleeneSequence:
    return KleeneSequence((), n)


def initial_config(F: Transformer) -> PDRConfig:
    bot = F.lattice.bot
    return PDRConfig(KTSequence((bot, F(bot))), _empty_obligations(2))


# ---------------------------------------------------------------------------
# Rules (pure).  Each returns the successor config / answer, or None when its
# guard does not hold.


def rule_valid(cfg: PDRConfig, F: Transformer, alpha) -> Optional[PDRAnswer]:
    j = is_conclusive_kt(cfg.frames, F.lattice)
    if j is None:
        return None
    return PDRAnswer(Verdict.TRUE, kt_witness=cfg.frames)


def rule_unfold(cfg: PDRConfig, F: Transformer, alpha) -> Optional[PDRConfig]:
    lat = F.lattice
    xs = cfg.frames.elements
    if not lat.leq(xs[-1], alpha):
        return None
    frames = KTSequence(xs + (lat.top,))
    return PDRConfig(frames, _empty_obligations(len(frames)))


def rule_induction(cfg: PDRConfig, F: Transformer, alpha, k: int, x) -> Optional[PDRConfig]:
    lat = F.lattice
    xs = cfg.frames.elements
    if not 2 <= k <= len(xs) - 1:
        return None
    if lat.leq(xs[k], x):
        return None
    if not lat.leq(F(lat.meet(xs[k - 1], x)), x):
        return None
    strengthened = tuple(
        lat.meet(e, x) if 2 <= j <= k else e for j, e in enumerate(xs)
    )
    return PDRConfig(KTSequence(strengthened), cfg.obligations)


def rule_candidate(cfg: PDRConfig, F: Transformer, alpha,
                   heuristics: HeuristicsBundle) -> Optional[PDRConfig]:
    lat = F.lattice
    if not cfg.obligations.empty:
        return None
    last = cfg.frames.elements[-1]
    ok, info = lat.leq_info(last, alpha)
    if ok:
        return None
    x = heuristics.choose_candidate(last, alpha, info)
    if x is None:
        return None
    if not lat.leq(x, last) or lat.leq(x, alpha):
        raise HeuristicViolation("candidate output must satisfy x <= X_{n-1} and x !<= alpha")
    n = len(cfg.frames)
    return PDRConfig(cfg.frames, KleeneSequence((x,), n - 1))


def rule_model(cfg: PDRConfig, F: Transformer, alpha) -> Optional[PDRAnswer]:
    ob = cfg.obligations
    if ob.empty or ob.start_index != 1:
        return None
    witness = KleeneSequence((F.lattice.bot,) + ob.elements, 0)
    return PDRAnswer(Verdict.FALSE, kleene_witness=witness)


def rule_decide(cfg: PDRConfig, F: Transformer, alpha,
                heuristics: HeuristicsBundle) -> Optional[PDRConfig]:
    lat = F.lattice
    ob = cfg.obligations
    if ob.empty:
        return None
    i = ob.start_index
    head = ob.elements[0]
    x_prev = cfg.frames.elements[i - 1]
    fx = F(x_prev)
    if not lat.leq(head, fx):
        return None
    x = heuristics.choose_decide(x_prev, head, fx)
    if x is None:
        return None
    if not lat.leq(x, x_prev) or not lat.leq(head, F(x)):
        raise HeuristicViolation("decide output must satisfy x <= X_{i-1} and C_i <= F(x)")
    return PDRConfig(cfg.frames, KleeneSequence((x,) + ob.elements, i - 1))


def rule_conflict(cfg: PDRConfig, F: Transformer, alpha,
                  heuristics: HeuristicsBundle) -> Optional[PDRConfig]:
    lat = F.lattice
    ob = cfg.obligations
    if ob.empty:
        return None
    i = ob.start_index
    head = ob.elements[0]
    x_prev = cfg.frames.elements[i - 1]
    fx = F(x_prev)
    if lat.leq(head, fx):
        return None
    x = heuristics.choose_conflict(x_prev, head, fx)
    if x is None:
        return None
    if lat.leq(head, x) or not lat.leq(F(lat.meet(x_prev, x)), x):
        raise HeuristicViolation(
            "conflict output must satisfy C_i !<= x and F(X_{i-1} /\\ x) <= x")
    xs = cfg.frames.elements
    strengthened = tuple(
        lat.meet(e, x) if 2 <= j <= i else e for j, e in enumerate(xs)
    )
    return PDRConfig(KTSequence(strengthened), KleeneSequence(ob.elements[1:], i + 1))


# ---------------------------------------------------------------------------
# Per-step invariant checking (debug mode).


class _InvariantChecker:
    def __init__(self, F: Transformer, alpha, combined: bool):
        self.F = F
        self.alpha = alpha
        self.combined = combined
        self.chain = [F.lattice.bot]  # iterates of F from bottom

    def check(self, cfg: PDRConfig) -> None:
        F, lat = self.F, self.F.lattice
        frames, ob = cfg.frames, cfg.obligations
        n = len(frames)
        if not is_kt_sequence(frames, F, self.alpha):
            raise EngineInvariantError("frame chain invariant broken")
        if not is_kleene_sequence(ob, F, self.alpha):
            raise EngineInvariantError("obligation chain invariant broken")
        if not ob.empty:
            if ob.start_index + len(ob) != n:
                raise EngineInvariantError("obligation indexing out of sync with frames")
            for off, c in enumerate(ob.elements):
                if not lat.leq(c, frames[ob.start_index + off]):
                    raise EngineInvariantError("obligation not admissible (C_j !<= X_j)")
        if self.combined:
            if not lat.eq(frames[0], lat.bot) or not lat.eq(frames[1], F(lat.bot)):
                raise EngineInvariantError("frame prefix (bot, F bot) not preserved")
        while len(self.chain) < n:
            self.chain.append(F(self.chain[-1]))
        for i in range(n):
            if not lat.leq(self.chain[i], frames[i]):
                raise EngineInvariantError("frames no longer over-approximate F^i(bot)")


# ---------------------------------------------------------------------------
# Runners.


def _finalize(answer: PDRAnswer, stats: RunStats, F: Transformer, alpha,
              started: float, frames_len: int) -> PDRAnswer:
    stats.wall_time = time.perf_counter() - started
    stats.frame_count = frames_len
    lat = F.lattice
    if answer.verdict is Verdict.TRUE:
        j = is_conclusive_kt(answer.kt_witness, lat)
        if j is None or not check_kt_witness(answer.kt_witness[j], F, alpha):
            raise EngineInvariantError("True answer without a valid positive certificate")
    elif answer.verdict is Verdict.FALSE:
        if not check_kleene_witness(answer.kleene_witness, F, alpha):
            raise EngineInvariantError("False answer without a valid negative certificate")
    return replace(answer, stats=stats)


def _emit(trace, step: int, rule: str, cfg: PDRConfig) -> None:
    if trace is not None:
        trace(f"step={step} rule={rule} frames={len(cfg.frames)} "
              f"obligations={len(cfg.obligations)}")


def run_combined(F: Transformer, alpha, heuristics: HeuristicsBundle, *,
                 schedule: str = "default", budget: int = 100000,
                 seed: Optional[int] = None, debug: bool = False,
                 trace: Optional[Callable[[str], None]] = None) -> PDRAnswer:
    """Run the full engine from the initial config (bot <= F(bot); ()).

    The default schedule applies, in order: Valid, Model, then Unfold or
    Candidate when no obligations are pending (by the bound check on the last
    frame), else Decide or Conflict by their complementary guard.  A supplied
    induction proposer is tried opportunistically after Valid/Model.  The
    fuzz schedule picks uniformly among rules whose guards hold, with
    Valid/Model always pre-empting.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    lat = F.lattice
    cfg = initial_config(F)
    stats = RunStats()
    started = time.perf_counter()
    rng = random.Random(seed) if schedule == "fuzz" else None
    checker = _InvariantChecker(F, alpha, combined=True) if debug else None
    if checker:
        checker.check(cfg)

    for step in range(1, budget + 1):
        stats.steps = step
        ans = rule_valid(cfg, F, alpha)
        if ans is not None:
            stats.count("valid")
            _emit(trace, step, "valid", cfg)
            return _finalize(ans, stats, F, alpha, started, len(cfg.frames))
        ans = rule_model(cfg, F, alpha)
        if ans is not None:
            stats.count("model")
            _emit(trace, step, "model", cfg)
            return _finalize(ans, stats, F, alpha, started, len(cfg.frames))

        applied = None
        if heuristics.choose_induction is not None:
            prop = heuristics.choose_induction(cfg.frames)
            if prop is not None:
                nxt = rule_induction(cfg, F, alpha, prop[0], prop[1])
                if nxt is not None:
                    cfg, applied = nxt, "induction"

        if applied is None and rng is None:
            if cfg.obligations.empty:
                nxt = rule_unfold(cfg, F, alpha)
                if nxt is not None:
                    cfg, applied = nxt, "unfold"
                else:
                    nxt = rule_candidate(cfg, F, alpha, heuristics)
                    if nxt is not None:
                        cfg, applied = nxt, "candidate"
            else:
                nxt = rule_decide(cfg, F, alpha, heuristics)
                if nxt is not None:
                    cfg, applied = nxt, "decide"
                else:
                    nxt = rule_conflict(cfg, F, alpha, heuristics)
                    if nxt is not None:
                        cfg, applied = nxt, "conflict"
        elif applied is None:
            candidates = []
            if cfg.obligations.empty:
                if lat.leq(cfg.frames.elements[-1], alpha):
                    candidates.append(("unfold", lambda c: rule_unfold(c, F, alpha)))
                else:
                    candidates.append(
                        ("candidate", lambda c: rule_candidate(c, F, alpha, heuristics)))
            else:
                if lat.leq(cfg.frames.elements[-1], alpha):
                    candidates.append(("unfold", lambda c: rule_unfold(c, F, alpha)))
                candidates.append(("decide", lambda c: rule_decide(c, F, alpha, heuristics)))
                candidates.append(("conflict", lambda c: rule_conflict(c, F, alpha, heuristics)))
            rng.shuffle(candidates)
            for name, apply_rule in candidates:
                nxt = apply_rule(cfg)
                if nxt is not None:
                    cfg, applied = nxt, name
                    break

        if applied is None:
            stats.wall_time = time.perf_counter() - started
            stats.frame_count = len(cfg.frames)
            return PDRAnswer(Verdict.STUCK, stats=stats)
        stats.count(applied)
        _emit(trace, step, applied, cfg)
        if checker:
            checker.check(cfg)

    stats.wall_time = time.perf_counter() - started
    stats.frame_count = len(cfg.frames)
    return PDRAnswer(Verdict.BUDGET_EXHAUSTED, stats=stats)


def run_positive(F: Transformer, alpha,
                 induction_proposer: Optional[Callable[[KTSequence], Optional[tuple[int, Any]]]],
                 *, budget: int = 100000, debug: bool = False,
                 trace: Optional[Callable[[str], None]] = None) -> PDRAnswer:
    """One-sided engine: Valid, Unfold and Induction only; never answers False.

    When no rule fires the step is still consumed, so an unprovable instance
    exhausts its budget instead of concluding.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    lat = F.lattice
    cfg = initial_config(F)
    stats = RunStats()
    started = time.perf_counter()
    checker = _InvariantChecker(F, alpha, combined=False) if debug else None

    for step in range(1, budget + 1):
        stats.steps = step
        ans = rule_valid(cfg, F, alpha)
        if ans is not None:
            stats.count("valid")
            _emit(trace, step, "valid", cfg)
            return _finalize(ans, stats, F, alpha, started, len(cfg.frames))
        nxt = rule_unfold(cfg, F, alpha)
        if nxt is not None:
            cfg = nxt
            stats.count("unfold")
            _emit(trace, step, "unfold", cfg)
        else:
            prop = induction_proposer(cfg.frames) if induction_proposer else None
            nxt = rule_induction(cfg, F, alpha, prop[0], prop[1]) if prop else None
            if nxt is not None:
                cfg = nxt
                stats.count("induction")
                _emit(trace, step, "induction", cfg)
            else:
                stats.count("noop")
                continue
        if checker:
            checker.check(cfg)

    stats.wall_time = time.perf_counter() - started
    stats.frame_count = len(cfg.frames)
    return PDRAnswer(Verdict.BUDGET_EXHAUSTED, stats=stats)


def run_negative(F: Transformer, alpha, heuristics: NegativeHeuristics, *,
                 budget: int = 100000, debug: bool = False,
                 trace: Optional[Callable[[str], None]] = None) -> PDRAnswer:
    """One-sided engine: Candidate, Model and Decide only; never answers True.

    A failed Decide falls back to a fresh Candidate (resetting the chain);
    Stuck is reported only when no candidate exists at all (alpha = top).
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    lat = F.lattice
    elements: tuple = ()
    stats = RunStats()
    started = time.perf_counter()

    def restart(step: int) -> bool:
        nonlocal elements
        x = heuristics.choose_candidate(alpha)
        if x is None:
            return False
        if lat.leq(x, alpha):
            raise HeuristicViolation("negative candidate must not be below alpha")
        elements = (x,)
        stats.count("candidate")
        if trace is not None:
            trace(f"step={step} rule=candidate frames=0 obligations=1")
        return True

    for step in range(1, budget + 1):
        stats.steps = step
        if elements and lat.eq(elements[0], lat.bot):
            stats.count("model")
            if trace is not None:
                trace(f"step={step} rule=model frames=0 obligations={len(elements)}")
            witness = KleeneSequence(elements, 0)
            ans = PDRAnswer(Verdict.FALSE, kleene_witness=witness)
            return _finalize(ans, stats, F, alpha, started, 0)
        if not elements:
            if not restart(step):
                stats.wall_time = time.perf_counter() - started
                return PDRAnswer(Verdict.STUCK, stats=stats)
            continue
        x = heuristics.choose_decide(elements[0])
        if x is not None:
            if not lat.leq(elements[0], F(x)):
                raise HeuristicViolation("negative decide must satisfy C_0 <= F(x)")
            elements = (x,) + elements
            stats.count("decide")
            if trace is not None:
                trace(f"step={step} rule=decide frames=0 obligations={len(elements)}")
            if debug and not is_kleene_sequence(KleeneSequence(elements, 0), F, alpha):
                raise EngineInvariantError("obligation chain invariant broken")
        else:
            if not restart(step):
                stats.wall_time = time.perf_counter() - started
                return PDRAnswer(Verdict.STUCK, stats=stats)

    stats.wall_time = time.perf_counter() - started
    return PDRAnswer(Verdict.BUDGET_EXHAUSTED, stats=stats)


# ---------------------------------------------------------------------------
# Generic heuristics and dualization.


def canonical_heuristics(F: Transformer) -> HeuristicsBundle:
    """Lattice-agnostic choices: Candidate x := X_{n-1}, Decide x := X_{i-1},
    Conflict x := F(X_{i-1}).  Always contract-valid, never generalizing."""

    def candidate(last, alpha, info):
        return last

    def decide(x_prev, head, fx):
        return x_prev

    def conflict(x_prev, head, fx):
        return fx

    return HeuristicsBundle(candidate, decide, conflict)


def join_induction_proposer(F: Transformer):
    """Propose x := X_{k-1} v F(X_{k-1}) at the first index where it
    strengthens; needs a join on the instance lattice."""
    lat = F.lattice

    def propose(frames: KTSequence) -> Optional[tuple[int, Any]]:
        xs = frames.elements
        for k in range(2, len(xs)):
            x = lat.join(xs[k - 1], F(xs[k - 1]))
            if not lat.leq(xs[k], x):
                return (k, x)
        return None

    return propose


def dualize(F: Transformer, alpha) -> tuple[Transformer, Any]:
    """Wrap the instance in its opposite lattice so that running the engine
    answers the dual under-approximation question ``alpha <= nu F``.

    Requires a join on the instance lattice (it realizes the dual meet).
    """
    lat = F.lattice
    lat.join(lat.bot, lat.bot)  # probe; raises UnsupportedDual if absent
    return Transformer(OppositeLattice(lat), F.fn), alpha


def involution_reduce(F_core: Transformer, iota, alpha, neg) -> tuple[Transformer, Any]:
    """Turn the under-approximation problem ``iota <= nu x. alpha /\\ F_core(x)``
    into an equivalent least-fixed-point bound via an order-reversing
    self-inverse ``neg``, yielding ``(x -> neg(alpha /\\ F_core(neg x)), neg iota)``.
    """
    lat = F_core.lattice
    for sample in (lat.bot, lat.top, iota, alpha):
        if not lat.eq(neg(neg(sample)), sample):
            raise InvolutionViolation("neg is not self-inverse on sampled elements")

    def fn(x):
        return neg(lat.meet(alpha, F_core(neg(x))))

    return Transformer(lat, fn), neg(iota)
