"""Annealed product-of-ratios estimation of the partition function.

The anchor is the uniform point (1,1,1,1), where the partition function is
exactly 2^(m - n + components).  A geometric schedule walks from there to
the target; each stage's ratio of consecutive Gibbs weights is estimated
from warm-started chains, and a median over independent chain groups
controls the failure probability.  Composed with the transform planner
this evaluates parameters far outside the rapidly-mixing region.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Sequence

from .exact import ParamVec, as_params, census_8v
from .graphs import LabeledGraph
from .mcmc import ChainConfig, _move_sets
from .states import CLASS_BY_MASK, cycle_basis, face_two_coloring, in_masks, reference_even_orientation
from .transforms import TransformPlan, in_yz, plan_report, plan_transform

UNIFORM = (Fraction(1), Fraction(1), Fraction(1), Fraction(1))
MIN_GROUPS = 12
MIN_SAMPLES_PER_GROUP = 16
MAX_SUBDIVISIONS = 6  # at most 2^6 = 64x refinement of the stage count
EXACT_FALLBACK_DIM = 24


class PipelineError(RuntimeError):
    pass


def anchor_z(graph: LabeledGraph) -> int:
    """Partition function at the uniform point: the even-orientation count."""
    basis = cycle_basis(graph)
    return 1 << basis.dimension


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric stage parameters from the uniform point to the target.

    ``params[t][i]`` is the class-i weight at stage t; ``inside_yz[t]``
    flags membership of stage t in the rapidly-mixing region.  When the
    direct geometric path exits the region the stage count is doubled a few
    times; if that never helps, ``warning`` is set and the schedule is used
    anyway (stationarity does not depend on the region, only the mixing
    rationale weakens).
    """

    target: ParamVec
    stage_count: int
    params: tuple[tuple[float, float, float, float], ...]
    class_ratios: tuple[float, float, float, float]
    inside_yz: tuple[bool, ...]
    warning: bool

    @property
    def all_inside(self) -> bool:
        return all(self.inside_yz)


def _geometric_stages(target: ParamVec, q: int):
    ratios = tuple(float(t) ** (1.0 / q) for t in target)
    stages = [(1.0, 1.0, 1.0, 1.0)]
    for _ in range(q):
        prev = stages[-1]
        stages.append(tuple(p * r for p, r in zip(prev, ratios)))
    return ratios, tuple(stages)


def _stage_flags(stages) -> tuple[bool, ...]:
    return tuple(
        in_yz(tuple(Fraction(x) for x in stage)) for stage in stages
    )


def default_stage_count(graph: LabeledGraph, target: ParamVec) -> int:
    spread = max(abs(math.log(float(t))) for t in target)
    return max(1, math.ceil(8 * graph.vertex_count * spread))


def build_schedule(graph: LabeledGraph, target: Sequence, q: int | None = None) -> AnnealSchedule:
    t = as_params(target)
    if any(x <= 0 for x in t):
        raise ValueError("anneal target must be strictly positive")
    if q is None:
        q = default_stage_count(graph, t)
    ratios, stages = _geometric_stages(t, q)
    flags = _stage_flags(stages)
    warning = False
    if not all(flags):
        for _ in range(MAX_SUBDIVISIONS):
            q *= 2
            ratios, stages = _geometric_stages(t, q)
            flags = _stage_flags(stages)
            if all(flags):
                break
        else:
            warning = True
    return AnnealSchedule(t, q, stages, ratios, flags, warning)


@dataclass(frozen=True)
class Estimate:
    value: float
    relative_error_target: float
    failure_probability: float
    stages: int
    groups: int
    samples_per_stage: int
    diagnostics: dict = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        return {
            "value": self.value,
            "eps": self.relative_error_target,
            "delta": self.failure_probability,
            "stages": self.stages,
            "groups": self.groups,
            "samples_per_stage": self.samples_per_stage,
            "diagnostics": self.diagnostics,
        }


_CLASS16 = tuple(CLASS_BY_MASK.get(m, -1) for m in range(16))
_RECOUNT_PERIOD = 1 << 16


class _LightChain:
    """Minimal Metropolis chain for the annealer: class caches only.

    Orientation bits are never materialized (the estimator needs only the
    class counts); masks and classes stay exact integers, so there is no
    float drift to correct, but the counts are still re-derived
    periodically as a cheap self-check.
    """

    def __init__(self, graph: LabeledGraph, proposal: str, rng: Random):
        self.rng = rng
        self.touch: list[list[tuple[int, int]]] = []
        for element in _move_sets(graph, proposal):
            agg: dict[int, int] = {}
            for eid in element:
                e = graph.edges[eid]
                agg[e.u] = agg.get(e.u, 0) ^ (1 << (e.label_u - 1))
                agg[e.v] = agg.get(e.v, 0) ^ (1 << (e.label_v - 1))
            self.touch.append([(v, xm) for v, xm in sorted(agg.items()) if xm])
        self.masks = in_masks(graph, reference_even_orientation(graph))
        self.classes = [_CLASS16[m] for m in self.masks]
        self.counts = [0, 0, 0, 0]
        for c in self.classes:
            self.counts[c] += 1
        self.ratio = [[1.0] * 4 for _ in range(4)]
        self.steps = 0

    def set_params(self, weights: Sequence[float]):
        self.ratio = [[weights[a] / weights[b] for b in range(4)] for a in range(4)]

    def advance(self, steps: int, laziness: float):
        table = _CLASS16
        masks, classes, counts = self.masks, self.classes, self.counts
        touch, ratio_table = self.touch, self.ratio
        nmoves = len(touch)
        random, randrange = self.rng.random, self.rng.randrange
        for _ in range(steps):
            if random() < laziness:
                continue
            flips = touch[randrange(nmoves)]
            ratio = 1.0
            for v, xm in flips:
                ratio *= ratio_table[table[masks[v] ^ xm]][classes[v]]
            if ratio >= 1.0 or random() < ratio:
                for v, xm in flips:
                    old = classes[v]
                    m2 = masks[v] ^ xm
                    masks[v] = m2
                    new = table[m2]
                    classes[v] = new
                    counts[old] -= 1
                    counts[new] += 1
        self.steps += steps
        if self.steps >= _RECOUNT_PERIOD:
            self.steps = 0
            recount = [0, 0, 0, 0]
            for c in classes:
                recount[c] += 1
            if recount != counts:
                raise AssertionError("chain class cache drifted")


def _median_failure(groups: int) -> float:
    """P[at least half of the groups miss], each missing w.p. <= 1/4."""
    tail = 0.0
    threshold = (groups + 1) // 2
    for k in range(threshold, groups + 1):
        tail += math.comb(groups, k) * 0.25**k * 0.75 ** (groups - k)
    return tail


def _group_count(delta: float) -> int:
    g = MIN_GROUPS
    while _median_failure(g) > delta and g < 200:
        g += 2
    return g


def _samples_per_group(q: int, n: int, target: ParamVec, eps: float) -> int:
    """Chebyshev count from the range bound on one stage's weight ratio.

    Per stage the state ratio lies in an interval of multiplicative width
    (max/min parameter)^(n/q); a bounded-variable bound then caps the
    relative variance, and relvar(group product) <= eps^2/4 gives each
    group success probability 3/4.
    """
    hi = max(float(t) for t in target)
    lo = min(float(t) for t in target)
    width = (hi / lo) ** (n / q)
    relvar = (width - 1.0) ** 2 / 4.0
    need = math.ceil(4.0 * q * relvar / (eps * eps))
    return max(MIN_SAMPLES_PER_GROUP, need)


def anneal_estimate(
    graph: LabeledGraph,
    target: Sequence,
    eps: float,
    delta: float,
    cfg: ChainConfig,
) -> Estimate:
    """Estimate the partition function at a strictly positive target in Y and Z.

    The result is ``anchor * prod_t E[w_{t+1}/w_t]`` with the expectations
    replaced by chain averages; the median over independent chain groups
    meets the (eps, delta) contract under the range-based variance model.
    Deterministic for a fixed seed.
    """
    t = as_params(target)
    if any(x <= 0 for x in t):
        raise ValueError("anneal target must be strictly positive")
    if not in_yz(t):
        raise ValueError(
            "target outside the rapidly-mixing region; plan a transform first"
        )
    anchor = anchor_z(graph)
    if t == UNIFORM:
        return Estimate(
            value=float(anchor),
            relative_error_target=eps,
            failure_probability=delta,
            stages=0,
            groups=0,
            samples_per_stage=0,
            diagnostics={"exact_anchor": True, "anchor": anchor},
        )

    schedule = build_schedule(graph, t)
    q = schedule.stage_count
    n = graph.vertex_count
    k = cycle_basis(graph).dimension
    groups = _group_count(delta)
    s_g = _samples_per_group(q, n, t, eps)
    thinning = max(1, (k + 1) // 2)
    stage_burn_in = 2 * k
    laziness = float(cfg.laziness)

    # per-class ratio powers, indexed [class][count]
    pow_table = [
        [schedule.class_ratios[cls] ** cnt for cnt in range(n + 1)]
        for cls in range(4)
    ]

    # chain seeds come from a master generator: xoring the chain index onto
    # the raw seed would make nearby seeds share chain-seed multisets
    master = Random(cfg.seed)
    chains = [
        _LightChain(graph, cfg.proposal, Random(master.getrandbits(64)))
        for _ in range(groups)
    ]
    initial_burn = max(cfg.burn_in, 10 * k)
    for chain in chains:
        chain.advance(initial_burn, laziness)

    log_products = [0.0] * groups
    stage_relvars = []
    p0, p1, p2, p3 = pow_table
    for stage_index in range(q):
        stage_params = schedule.params[stage_index]
        stage_means = []
        for c, chain in enumerate(chains):
            chain.set_params(stage_params)
            chain.advance(stage_burn_in, laziness)
            counts = chain.counts
            acc = 0.0
            acc_sq = 0.0
            for _ in range(s_g):
                chain.advance(thinning, laziness)
                ratio = p0[counts[0]] * p1[counts[1]] * p2[counts[2]] * p3[counts[3]]
                acc += ratio
                acc_sq += ratio * ratio
            mean = acc / s_g
            log_products[c] += math.log(mean)
            stage_means.append((mean, acc_sq / s_g))
        grand = sum(m for m, _ in stage_means) / groups
        second = sum(sq for _, sq in stage_means) / groups
        stage_relvars.append(max(0.0, second / (grand * grand) - 1.0))

    ordered = sorted(log_products)
    mid = groups // 2
    if groups % 2:
        log_median = ordered[mid]
    else:
        log_median = 0.5 * (ordered[mid - 1] + ordered[mid])
    value = anchor * math.exp(log_median)
    return Estimate(
        value=value,
        relative_error_target=eps,
        failure_probability=delta,
        stages=q,
        groups=groups,
        samples_per_stage=groups * s_g,
        diagnostics={
            "anchor": anchor,
            "schedule_warning": schedule.warning,
            "stages_inside_yz": sum(schedule.inside_yz),
            "stage_ratio_relvar_max": max(stage_relvars) if stage_relvars else 0.0,
            "thinning": thinning,
            "stage_burn_in": stage_burn_in,
            "group_log_estimates": log_products,
        },
    )


def _check_graph_class(graph: LabeledGraph, graph_class: str):
    if graph_class == "planar":
        try:
            face_two_coloring(graph)
        except ValueError as exc:
            raise PipelineError(
                f"planar pipeline needs a face-2-colorable rotation system: {exc}"
            ) from exc
    elif graph_class == "bipartite":
        if graph.bipartition is None:
            raise PipelineError("bipartite pipeline needs a bipartition")
        left, _ = graph.bipartition
        for eid, e in enumerate(graph.edges):
            if (e.u in left) == (e.v in left):
                raise PipelineError(f"edge {eid} does not join the two sides")
    else:
        raise ValueError(f"unknown graph class {graph_class!r}")


def estimate_z8v(
    graph: LabeledGraph,
    params: Sequence,
    graph_class: str,
    eps: float,
    delta: float,
    cfg: ChainConfig,
) -> tuple[Estimate, TransformPlan]:
    """Plan a transform into Y and Z, then run the annealed estimator there.

    No correction factor is applied: the planned transform preserves the
    partition function exactly.  Planned images with zero entries cannot be
    annealed; small instances fall back to the exact census (flagged in the
    diagnostics), larger ones raise.
    """
    p = as_params(params)
    _check_graph_class(graph, graph_class)
    plan = plan_transform(p, graph_class)
    if plan is None:
        report = plan_report(p, graph_class)
        raise PipelineError(
            f"no group element maps {tuple(map(str, p))} into the rapidly-mixing "
            f"region; per-element diagnostics: {report}"
        )
    if any(x == 0 for x in plan.image):
        k = cycle_basis(graph).dimension
        if k > EXACT_FALLBACK_DIM:
            raise PipelineError(
                "planned image has zero entries and the graph is too large for "
                "the exact fallback"
            )
        value = census_8v(graph).evaluate(plan.image)
        estimate = Estimate(
            value=float(value),
            relative_error_target=eps,
            failure_probability=delta,
            stages=0,
            groups=0,
            samples_per_stage=0,
            diagnostics={
                "exact_fallback_zero_params": True,
                "exact_value": str(value),
            },
        )
        return estimate, plan
    estimate = anneal_estimate(graph, plan.image, eps, delta, cfg)
    return estimate, plan
