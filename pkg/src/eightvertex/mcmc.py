"""Cycle-flip Metropolis chain on even orientations.

States live in the coset of the cycle space: a state is the reference even
orientation xor a subset of basis cycles, so every reachable state is even
by construction and single-basis-cycle flips make the chain irreducible.
Proposal weights are evaluated locally over the vertices a flip touches.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Sequence

import numpy as np

from .graphs import LabeledGraph
from .states import (
    CLASS_BY_MASK,
    Bits,
    cycle_basis,
    face_two_coloring,
    in_masks,
    orientation_classes,
    reference_even_orientation,
)

DIAGNOSTIC_DIM_CAP = 12
CONSISTENCY_PERIOD = 1 << 16


@dataclass(frozen=True)
class ChainConfig:
    seed: int
    laziness: Fraction = Fraction(1, 2)
    proposal: str = "basis-cycle"  # or "face" (rotation systems only)
    burn_in: int = 0
    thinning: int = 1

    def __post_init__(self):
        if not 0 < self.laziness < 1:
            raise ValueError("laziness must lie strictly between 0 and 1")
        if self.proposal not in ("basis-cycle", "face"):
            raise ValueError(f"unknown proposal kind {self.proposal!r}")
        if self.thinning < 1:
            raise ValueError("thinning must be at least 1")


def gibbs_weight(graph: LabeledGraph, orientation: Sequence[int], params) -> Fraction:
    """Product over vertices of the class weight; requires positive parameters."""
    p = tuple(Fraction(x) for x in params)
    if any(x <= 0 for x in p):
        raise ValueError("chain weights need strictly positive parameters")
    w = Fraction(1)
    for cls in orientation_classes(graph, orientation):
        w *= p[cls]
    return w


def _move_sets(graph: LabeledGraph, proposal: str) -> list[frozenset[int]]:
    if proposal == "basis-cycle":
        return list(cycle_basis(graph).elements)
    fc = face_two_coloring(graph)
    moves = []
    for face in fc.faces:
        edge_multiplicity: dict[int, int] = {}
        for dart in face:
            eid = dart // 2
            edge_multiplicity[eid] = edge_multiplicity.get(eid, 0) + 1
        odd = frozenset(e for e, k in edge_multiplicity.items() if k % 2)
        if odd:
            moves.append(odd)
    return moves


class _ChainSpace:
    """Precomputed flip incidence and weight tables for one (graph, params)."""

    def __init__(self, graph: LabeledGraph, params, proposal: str = "basis-cycle"):
        self.graph = graph
        self.params = tuple(Fraction(x) for x in params)
        if any(x <= 0 for x in self.params):
            raise ValueError("chain weights need strictly positive parameters")
        self.is_basis = proposal == "basis-cycle"
        self.moves = _move_sets(graph, proposal)
        if not self.moves:
            raise ValueError("no proposal moves available on this graph")
        self.touch: list[list[tuple[int, int]]] = []
        for element in self.moves:
            agg: dict[int, int] = {}
            for eid in element:
                e = graph.edges[eid]
                agg[e.u] = agg.get(e.u, 0) ^ (1 << (e.label_u - 1))
                agg[e.v] = agg.get(e.v, 0) ^ (1 << (e.label_v - 1))
            self.touch.append([(v, xm) for v, xm in sorted(agg.items()) if xm])
        self.reference = reference_even_orientation(graph)
        self.class_weight = [float(self.params[i]) for i in range(4)]
        # ratio[new][old] = w_new / w_old
        self.ratio = [
            [self.class_weight[a] / self.class_weight[b] for b in range(4)]
            for a in range(4)
        ]

    def set_params(self, params):
        """Retarget the stationary distribution (used by annealing stages)."""
        self.params = tuple(Fraction(x) for x in params)
        if any(x <= 0 for x in self.params):
            raise ValueError("chain weights need strictly positive parameters")
        self.class_weight = [float(self.params[i]) for i in range(4)]
        self.ratio = [
            [self.class_weight[a] / self.class_weight[b] for b in range(4)]
            for a in range(4)
        ]


@dataclass
class ChainState:
    """Mutable chain state: the orientation plus exact per-vertex class caches."""

    space: _ChainSpace
    coords: int  # subset of basis cycles xored onto the reference orientation
    bits: list[int]
    masks: list[int]
    classes: list[int]
    class_counts: list[int]
    steps_taken: int = 0

    @classmethod
    def initial(cls, space: _ChainSpace) -> "ChainState":
        bits = list(space.reference)
        masks = in_masks(space.graph, bits)
        classes = [CLASS_BY_MASK[m] for m in masks]
        counts = [0, 0, 0, 0]
        for c in classes:
            counts[c] += 1
        return cls(space, 0, bits, masks, classes, counts)

    def orientation(self) -> Bits:
        return tuple(self.bits)

    def log_weight(self) -> float:
        w = self.space.class_weight
        return sum(self.class_counts[i] * math.log(w[i]) for i in range(4))

    def exact_weight(self) -> Fraction:
        w = Fraction(1)
        for i in range(4):
            w *= self.space.params[i] ** self.class_counts[i]
        return w

    def _check_consistency(self):
        masks = in_masks(self.space.graph, self.bits)
        if masks != self.masks:
            raise AssertionError("chain cache drifted from the orientation")

    def apply_flip(self, move: int):
        table = CLASS_BY_MASK
        for v, xm in self.space.touch[move]:
            old = self.classes[v]
            self.masks[v] ^= xm
            new = table[self.masks[v]]
            self.classes[v] = new
            self.class_counts[old] -= 1
            self.class_counts[new] += 1
        for eid in self.space.moves[move]:
            self.bits[eid] ^= 1
        if self.space.is_basis:  # basis moves map to coordinate bits
            self.coords ^= 1 << move


def proposal_ratio(state: ChainState, move: int) -> float:
    """Gibbs weight ratio of the flipped state to the current one."""
    table = CLASS_BY_MASK
    ratio = state.space.ratio
    out = 1.0
    for v, xm in state.space.touch[move]:
        old = state.classes[v]
        new = table[state.masks[v] ^ xm]
        out *= ratio[new][old]
    return out


def step(state: ChainState, cfg: ChainConfig, rng: Random) -> ChainState:
    """One lazy Metropolis step; mutates and returns the state.

    Draw order is fixed (laziness, move, acceptance) so runs are
    reproducible for a given seed.
    """
    state.steps_taken += 1
    if state.steps_taken % CONSISTENCY_PERIOD == 0:
        state._check_consistency()
    if rng.random() < cfg.laziness:
        return state
    move = rng.randrange(len(state.space.moves))
    ratio = proposal_ratio(state, move)
    if ratio >= 1.0 or rng.random() < ratio:
        state.apply_flip(move)
    return state


def sample(
    graph: LabeledGraph,
    params,
    cfg: ChainConfig,
    n_samples: int,
) -> list[Bits]:
    """Burn in, then record an orientation every ``thinning`` steps."""
    if n_samples < 0:
        raise ValueError("sample count must be nonnegative")
    if n_samples == 0:
        return []
    space = _ChainSpace(graph, params, cfg.proposal)
    state = ChainState.initial(space)
    rng = Random(cfg.seed)
    for _ in range(cfg.burn_in):
        step(state, cfg, rng)
    out = []
    for _ in range(n_samples):
        for _ in range(cfg.thinning):
            step(state, cfg, rng)
        out.append(state.orientation())
    return out


# ----------------------------------------------------------------------
# exact diagnostics on small state spaces


@dataclass(frozen=True)
class ChainDiagnostics:
    states: int
    detailed_balance: bool
    stationary_exact: bool
    rows_sum_one: bool
    tv_curve: tuple[tuple[int, float], ...]
    steps_to_threshold: int | None
    tv_threshold: float


def _state_weights(space: _ChainSpace) -> list[Fraction]:
    """Exact Gibbs weight per cycle-space coordinate, via Gray enumeration."""
    k = len(space.moves)
    masks = in_masks(space.graph, list(space.reference))
    classes = [CLASS_BY_MASK[m] for m in masks]
    counts = [0, 0, 0, 0]
    for c in classes:
        counts[c] += 1
    weights: list[Fraction | None] = [None] * (1 << k)

    def weight() -> Fraction:
        w = Fraction(1)
        for i in range(4):
            w *= space.params[i] ** counts[i]
        return w

    coords = 0
    weights[0] = weight()
    table = CLASS_BY_MASK
    for i in range(1, 1 << k):
        j = (i & -i).bit_length() - 1
        for v, xm in space.touch[j]:
            old = classes[v]
            masks[v] ^= xm
            new = table[masks[v]]
            classes[v] = new
            counts[old] -= 1
            counts[new] += 1
        coords ^= 1 << j
        weights[coords] = weight()
    return weights  # type: ignore[return-value]


def exact_chain_diagnostics(
    graph: LabeledGraph,
    params,
    cfg: ChainConfig,
    dim_cap: int = DIAGNOSTIC_DIM_CAP,
    tv_threshold: float = 0.01,
    max_steps: int = 200_000,
) -> ChainDiagnostics:
    """Exact transition matrix,  detailed balance, and TV decay to stationarity.

    Rational arithmetic for the matrix checks; the TV curve (from the
    reference-orientation start) is tracked in floating point.  Only
    basis-cycle proposals index the coset directly, so that proposal kind
    is required here.
    """
    if cfg.proposal != "basis-cycle":
        raise ValueError("exact diagnostics require the basis-cycle proposal")
    space = _ChainSpace(graph, params, cfg.proposal)
    k = len(space.moves)
    if k > dim_cap:
        raise ValueError(f"state space 2^{k} exceeds diagnostic cap 2^{dim_cap}")
    size = 1 << k
    weights = _state_weights(space)
    lazy = Fraction(cfg.laziness)
    move_prob = (1 - lazy) / k

    # sparse transition rows: P[x][x ^ bit_j] = move_prob * min(1, w_y/w_x)
    accept: list[list[Fraction]] = [[Fraction(0)] * k for _ in range(size)]
    for x in range(size):
        for j in range(k):
            y = x ^ (1 << j)
            r = weights[y] / weights[x]
            accept[x][j] = move_prob * (r if r < 1 else Fraction(1))

    rows_sum_one = True
    detailed_balance = True
    for x in range(size):
        stay = Fraction(1) - sum(accept[x])
        if stay < lazy:  # stay includes laziness plus rejected proposals
            rows_sum_one = False
        for j in range(k):
            y = x ^ (1 << j)
            if weights[x] * accept[x][j] != weights[y] * accept[y][j]:
                detailed_balance = False

    total = sum(weights)
    pi = [w / total for w in weights]
    # stationarity: sum_x pi[x] P[x][y] == pi[y]
    stationary = [Fraction(0)] * size
    for x in range(size):
        stay = Fraction(1) - sum(accept[x])
        stationary[x] += pi[x] * stay
        for j in range(k):
            stationary[x ^ (1 << j)] += pi[x] * accept[x][j]
    stationary_exact = stationary == pi

    # float TV decay from the deterministic start state
    acc = np.array([[float(a) for a in row] for row in accept])
    stay_f = 1.0 - acc.sum(axis=1)
    pi_f = np.array([float(p) for p in pi])
    mu = np.zeros(size)
    mu[0] = 1.0
    curve = []
    steps_to_threshold = None
    idx = np.arange(size)
    flipped = [idx ^ (1 << j) for j in range(k)]
    for t in range(1, max_steps + 1):
        nxt = mu * stay_f
        for j in range(k):
            nxt[flipped[j]] += mu * acc[:, j]
        mu = nxt
        tv = 0.5 * float(np.abs(mu - pi_f).sum())
        curve.append((t, tv))
        if tv < tv_threshold:
            steps_to_threshold = t
            break
    return ChainDiagnostics(
        states=size,
        detailed_balance=detailed_balance,
        stationary_exact=stationary_exact,
        rows_sum_one=rows_sum_one,
        tv_curve=tuple(curve),
        steps_to_threshold=steps_to_threshold,
        tv_threshold=tv_threshold,
    )


def reachability_closure(graph: LabeledGraph, dim_cap: int = DIAGNOSTIC_DIM_CAP) -> bool:
    """Every even orientation is reachable from every other by basis flips."""
    k = cycle_basis(graph).dimension
    if k > dim_cap:
        raise ValueError(f"state space 2^{k} exceeds cap 2^{dim_cap}")
    size = 1 << k
    seen = [False] * size
    seen[0] = True
    stack = [0]
    while stack:
        x = stack.pop()
        for j in range(k):
            y = x ^ (1 << j)
            if not seen[y]:
                seen[y] = True
                stack.append(y)
    return all(seen)
