from fractions import Fraction
from random import Random

import pytest

from eightvertex.exact import census_8v
from eightvertex.graphs import gen_torus
from eightvertex.mcmc import (
    ChainConfig,
    ChainState,
    _ChainSpace,
    exact_chain_diagnostics,
    gibbs_weight,
    proposal_ratio,
    reachability_closure,
    sample,
    step,
)
from eightvertex.states import (
    VertexClass,
    canonical_bipartite_orientation,
    canonical_planar_orientation,
    face_two_coloring,
    is_even_orientation,
    orientation_classes,
)

YZ_POINTS = [
    (1, 1, 1, 1),
    (2, 2, 3, 1),
    (3, 3, 3, 1),
    (2, 2, 2, 1),
    (1, 1, 1, Fraction(1, 2)),
]


def test_gibbs_weight_examples(octahedron, k44):
    tau = canonical_bipartite_orientation(k44)
    assert gibbs_weight(k44, tau, (1, 1, 1, 2)) == 256
    tau = canonical_planar_orientation(octahedron, face_two_coloring(octahedron))
    assert gibbs_weight(octahedron, tau, (1, 1, 3, 1)) == 729
    any_tau = tau
    assert gibbs_weight(octahedron, any_tau, (1, 1, 1, 1)) == 1
    with pytest.raises(ValueError, match="positive"):
        gibbs_weight(octahedron, tau, (1, 1, 0, 1))


def test_config_validation():
    with pytest.raises(ValueError, match="laziness"):
        ChainConfig(seed=0, laziness=Fraction(0))
    with pytest.raises(ValueError, match="proposal"):
        ChainConfig(seed=0, proposal="teleport")


def test_steps_preserve_evenness(octahedron):
    space = _ChainSpace(octahedron, (1, 2, 3, 1))
    state = ChainState.initial(space)
    cfg = ChainConfig(seed=9)
    rng = Random(cfg.seed)
    for _ in range(500):
        step(state, cfg, rng)
        assert is_even_orientation(octahedron, state.bits)
    # cached classes stay consistent with the orientation
    assert orientation_classes(octahedron, state.bits) == state.classes


def test_uniform_point_accepts_every_proposal(torus22):
    space = _ChainSpace(torus22, (1, 1, 1, 1))
    state = ChainState.initial(space)
    for move in range(len(space.moves)):
        assert proposal_ratio(state, move) == 1.0


def test_known_acceptance_ratio(torus22):
    # a flip that turns two class-C vertices into class D at (1,1,1,2) has
    # local weight ratio (2*2)/(1*1) = 4; find one and check the value
    from eightvertex.states import CLASS_BY_MASK

    space = _ChainSpace(torus22, (1, 1, 1, 2))
    found = False
    for coords in range(1 << len(space.moves)):
        state = ChainState.initial(space)
        for j in range(len(space.moves)):
            if coords >> j & 1:
                state.apply_flip(j)
        for move in range(len(space.moves)):
            touched = space.touch[move]
            before = [state.classes[v] for v, _ in touched]
            after = [CLASS_BY_MASK[state.masks[v] ^ xm] for v, xm in touched]
            if before == [VertexClass.C] * 2 and after == [VertexClass.D] * 2:
                assert proposal_ratio(state, move) == 4.0
                found = True
    assert found


def test_sampling_deterministic_and_sized(octahedron):
    cfg = ChainConfig(seed=123, burn_in=50, thinning=3)
    a = sample(octahedron, (1, 1, 1, 2), cfg, 200)
    b = sample(octahedron, (1, 1, 1, 2), cfg, 200)
    assert a == b
    assert len(a) == 200
    assert sample(octahedron, (1, 1, 1, 1), cfg, 0) == []
    different = sample(octahedron, (1, 1, 1, 2), ChainConfig(seed=124, burn_in=50, thinning=3), 200)
    assert a != different


def test_empirical_class_frequencies_match_census(octahedron):
    census = census_8v(octahedron)
    p = (1, 1, 1, 2)
    total = census.evaluate(p)
    # exact mean and variance of the class-D count under the Gibbs law
    mean_d = sum(
        nd * count * Fraction(1) ** (na + nb + nc) * Fraction(2) ** nd
        for (na, nb, nc, nd), count in census.counts.items()
    ) / total
    second = sum(
        nd * nd * count * Fraction(2) ** nd
        for (na, nb, nc, nd), count in census.counts.items()
    ) / total
    var_d = second - mean_d * mean_d

    n_samples = 10_000
    cfg = ChainConfig(seed=2024, burn_in=500, thinning=14)
    draws = sample(octahedron, p, cfg, n_samples)
    counts = [
        sum(1 for c in orientation_classes(octahedron, tau) if c == VertexClass.D)
        for tau in draws
    ]
    observed = sum(counts) / n_samples
    sigma = (float(var_d) / n_samples) ** 0.5
    assert abs(observed - float(mean_d)) < 3 * sigma


@pytest.mark.parametrize("params", YZ_POINTS)
def test_exact_diagnostics_octahedron(octahedron, params):
    diag = exact_chain_diagnostics(octahedron, params, ChainConfig(seed=0))
    assert diag.states == 128
    assert diag.detailed_balance
    assert diag.stationary_exact
    assert diag.rows_sum_one
    assert diag.steps_to_threshold is not None
    assert diag.tv_curve[-1][1] < 0.01


def test_exact_diagnostics_k44(k44):
    diag = exact_chain_diagnostics(k44, (2, 2, 3, 1), ChainConfig(seed=0))
    assert diag.states == 512
    assert diag.detailed_balance and diag.stationary_exact
    assert diag.steps_to_threshold is not None


def test_diagnostics_cap(torus44):
    with pytest.raises(ValueError, match="cap"):
        exact_chain_diagnostics(torus44, (1, 1, 1, 1), ChainConfig(seed=0))


def test_reachability(octahedron, k44):
    assert reachability_closure(octahedron)
    assert reachability_closure(k44)


def test_face_proposal_runs_on_planar_graphs(octahedron):
    cfg = ChainConfig(seed=5, proposal="face", burn_in=20, thinning=2)
    draws = sample(octahedron, (1, 1, 2, 1), cfg, 50)
    assert len(draws) == 50
    for tau in draws:
        assert is_even_orientation(octahedron, tau)


def test_face_proposal_needs_rotation_system(k44):
    cfg = ChainConfig(seed=5, proposal="face")
    with pytest.raises(ValueError, match="rotation"):
        sample(k44, (1, 1, 1, 1), cfg, 1)
