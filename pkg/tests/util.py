"""Shared helpers for the test suite: random model generators and a
vertex-enumeration oracle for small linear programs."""

from __future__ import annotations

import itertools
import math
import random

import numpy as np

from ltpdr.kripke import KripkeStructure
from ltpdr.mdp import MDPModel
from ltpdr.mrm import MRMModel


def random_kripke(rng: random.Random, max_states: int = 8) -> KripkeStructure:
    n = rng.randint(1, max_states)
    density = rng.choice([0.1, 0.2, 0.3, 0.4, 0.5])
    transitions = frozenset(
        (a, b) for a in range(n) for b in range(n) if rng.random() < density)
    full = (1 << n) - 1
    initial = rng.randint(0, full)
    safe = rng.randint(0, full)
    return KripkeStructure(n, transitions, initial, safe)


def _random_distribution(rng: random.Random, n: int):
    support = rng.sample(range(n), rng.randint(1, min(n, 3)))
    weights = [rng.randint(1, 9) for _ in support]
    total = sum(weights)
    return tuple((t, w / total) for t, w in zip(support, weights))


def random_mdp(rng: random.Random, max_states: int = 6,
               max_actions: int = 2) -> MDPModel:
    n = rng.randint(2, max_states)
    m = rng.randint(1, max_actions)
    delta = []
    for s in range(n):
        row = []
        for a in range(m):
            if a == 0 or rng.random() < 0.7:
                row.append(_random_distribution(rng, n))
            else:
                row.append(None)
        delta.append(tuple(row))
    safe = frozenset(s for s in range(n) if rng.random() < 0.8)
    initial = rng.randrange(n)
    return MDPModel(n, m, tuple(delta), initial, 0.5, safe)


def random_mrm(rng: random.Random, max_states: int = 5) -> MRMModel:
    n = rng.randint(2, max_states)
    delta = []
    for s in range(n):
        dist = _random_distribution(rng, n)
        delta.append(tuple(((rng.randint(0, 3), t), p) for t, p in dist))
    # keep at least one unsafe state so rewards cannot accumulate forever
    # on every run (divergent instances are exercised separately)
    unsafe = rng.sample(range(n), rng.randint(1, n))
    safe = frozenset(s for s in range(n) if s not in unsafe)
    return MRMModel(n, tuple(delta), rng.randrange(n), 1.0, safe)


def lp_vertex_min(costs, constraints, bounds, tol: float = 1e-9):
    """Brute-force LP reference: enumerate candidate vertices as
    intersections of n active facets (constraints or box faces), keep the
    feasible ones, return the best objective value, or None if infeasible."""
    n = len(costs)
    planes = []
    for coeffs, rhs in constraints:
        planes.append((list(coeffs), rhs))
    for j, (lo, hi) in enumerate(bounds):
        row = [0.0] * n
        row[j] = 1.0
        planes.append((row, lo))
        if math.isfinite(hi):
            planes.append((row, hi))

    def feasible(x):
        for coeffs, rhs in constraints:
            if sum(c * v for c, v in zip(coeffs, x)) < rhs - tol:
                return False
        for v, (lo, hi) in zip(x, bounds):
            if v < lo - tol or v > hi + tol:
                return False
        return True

    best = None
    for combo in itertools.combinations(range(len(planes)), n):
        A = np.array([planes[i][0] for i in combo], dtype=float)
        b = np.array([planes[i][1] for i in combo], dtype=float)
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        x = np.linalg.solve(A, b)
        if feasible(x):
            value = float(np.dot(costs, x))
            if best is None or value < best:
                best = value
    return best
