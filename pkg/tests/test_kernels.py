import json
import random
from fractions import Fraction

import pytest

from layerchain.algebra import ONE, P, Polynomial
from layerchain.graphs import cycle, path
from layerchain.kernels import (
    BondConfig,
    PolyMatrix,
    bridge_reach,
    build_full_kernel,
    build_lumped_kernel,
    build_reduced_kernel,
    config_weights,
    core_partitions,
    step_pattern,
    successor_table,
)
from layerchain.patterns import (
    DAGGER,
    Pattern,
    STAR,
    all_connected_pattern,
    all_singletons_pattern,
    delete_infection,
    enumerate_patterns,
    is_infected,
)

OMP = Polynomial((1, -1))  # 1 - p

HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# Bond configurations and layer stepping.
# ---------------------------------------------------------------------------


def test_bond_config_counts():
    cfg = BondConfig(0b1011, 5)
    assert cfg.open_count == 3
    assert cfg.closed_count == 2
    assert cfg.is_open(0) and not cfg.is_open(2)
    with pytest.raises(ValueError):
        BondConfig(1 << 5, 5)


def test_step_all_open_keeps_everything_connected():
    g = cycle(3)
    star = all_connected_pattern(3)
    assert step_pattern(g, star, BondConfig.all_open(g.bond_count)) == star


def test_step_all_closed_gives_isolated_pattern():
    g = cycle(3)
    isolated = all_singletons_pattern(3)
    for source in enumerate_patterns(g):
        assert step_pattern(g, source, 0) == isolated


def test_step_vertical_only_transfers_connectivity_through_lower_layer():
    # two-vertex graph, source fully infected, both verticals open and the
    # horizontal closed: both upper vertices infect through the lower block
    # and stay connected through it, so the successor is fully connected.
    g = cycle(2)
    star = all_connected_pattern(2)
    vertical_only = BondConfig(0b110, 3)
    assert step_pattern(g, star, vertical_only) == star


def test_step_single_vertical_from_full_pattern():
    g = cycle(2)
    star = all_connected_pattern(2)
    assert step_pattern(g, star, 0b010) == Pattern([(STAR, 0), (1,)])
    assert step_pattern(g, star, 0b100) == Pattern([(STAR, 1), (0,)])


def test_step_horizontal_only_connects_without_infection():
    g = cycle(2)
    star = all_connected_pattern(2)
    assert step_pattern(g, star, 0b001) == Pattern([(STAR,), (0, 1)])


def test_successor_table_matches_step_pattern():
    rng = random.Random(5)
    for g in (cycle(2), cycle(3), path(3)):
        patterns = enumerate_patterns(g)
        sample = rng.sample(patterns, min(6, len(patterns)))
        table = successor_table(g, sample)
        for row, source in zip(table, sample):
            for _ in range(40):
                z = rng.randrange(1 << g.bond_count)
                assert row[z] == step_pattern(g, source, z)


# ---------------------------------------------------------------------------
# Kernel fixtures from the two-vertex chain.
# ---------------------------------------------------------------------------


def test_full_kernel_two_vertex_entries(c2):
    kernel = build_full_kernel(c2)
    isolated = all_singletons_pattern(2)
    assert kernel.entry(isolated, isolated) == OMP


def test_reduced_kernel_two_vertex_matrix(c2):
    kernel = build_reduced_kernel(c2)
    isolated = all_singletons_pattern(2)
    connected = Pattern([(STAR,), (0, 1)])
    assert kernel.size == 2
    assert kernel.entry(isolated, isolated) == OMP
    assert kernel.entry(isolated, connected) == P
    assert kernel.entry(connected, isolated) == OMP * Polynomial((1, 0, -1))
    assert kernel.entry(connected, connected) == P * Polynomial((1, 1, -1))


def test_lumped_kernel_two_vertex_matrix(c2):
    kernel = build_lumped_kernel(c2)
    star = all_connected_pattern(2)
    first = Pattern([(STAR, 0), (1,)])
    second = Pattern([(STAR, 1), (0,)])
    assert kernel.size == 4
    assert kernel.states[0] is DAGGER
    assert kernel.entry(DAGGER, DAGGER) == ONE
    for state in (first, second, star):
        assert kernel.entry(DAGGER, state).is_zero
    assert kernel.entry(first, DAGGER) == OMP
    assert kernel.entry(first, first) == P * OMP
    assert kernel.entry(first, second).is_zero
    assert kernel.entry(first, star) == P * P
    assert kernel.entry(second, DAGGER) == OMP
    assert kernel.entry(second, second) == P * OMP
    assert kernel.entry(second, first).is_zero
    assert kernel.entry(second, star) == P * P
    assert kernel.entry(star, DAGGER) == OMP * OMP
    assert kernel.entry(star, first) == P * OMP * OMP
    assert kernel.entry(star, second) == P * OMP * OMP
    assert kernel.entry(star, star) == Polynomial((0, 0, 3, -2))


# ---------------------------------------------------------------------------
# Structural invariants.
# ---------------------------------------------------------------------------


def test_row_sums_are_one():
    for g in (cycle(2), cycle(3), path(3)):
        for kernel in (build_full_kernel(g), build_reduced_kernel(g), build_lumped_kernel(g)):
            assert all(total == ONE for total in kernel.row_sums())


def test_uninfected_rows_never_reach_infected():
    for g in (cycle(2), cycle(3)):
        kernel = build_full_kernel(g)
        for source in kernel.states:
            if is_infected(source):
                continue
            for target in kernel.states:
                if is_infected(target):
                    assert kernel.entry(source, target).is_zero


def test_self_loops_and_extinction_positive_at_half():
    for g in (cycle(2), cycle(3)):
        kernel = build_full_kernel(g)
        isolated = all_singletons_pattern(g.vertex_count)
        for state in kernel.states:
            assert kernel.entry(state, state)(HALF) > 0
            assert kernel.entry(state, isolated)(HALF) > 0


def test_positivity_structure_is_p_independent():
    kernel = build_lumped_kernel(cycle(3))
    for row in kernel.entries:
        for entry in row:
            first = entry(Fraction(1, 3)) > 0
            second = entry(Fraction(2, 3)) > 0
            assert first == second == (not entry.is_zero)


def test_entries_are_probabilities():
    for g in (cycle(2), cycle(3)):
        kernel = build_lumped_kernel(g)
        assert kernel.max_degree() <= g.bond_count
        for at in (Fraction(1, 7), HALF, Fraction(9, 10)):
            for row in kernel.evaluate(at):
                for value in row:
                    assert 0 <= value <= 1


def test_lumping_consistency_identity():
    """Projecting the target of a full-kernel row onto uninfected patterns
    agrees with the uninfected row of the projected source, exactly."""
    for g in (cycle(2), cycle(3)):
        kernel = build_full_kernel(g)
        uninfected = [x for x in kernel.states if not is_infected(x)]
        for source in kernel.states:
            projected_source = delete_infection(source)
            for target in uninfected:
                total = Polynomial()
                for state in kernel.states:
                    if delete_infection(state) == target:
                        total = total + kernel.entry(source, state)
                assert total == kernel.entry(projected_source, target)


def test_core_partitions_context():
    assert len(core_partitions(cycle(2))) == 2
    assert len(core_partitions(cycle(3))) == 5
    # opposite-corner pairing in a 4-cycle needs crossing paths: unreachable
    crossing = Pattern([(STAR,), (0, 2), (1, 3)])
    core4 = core_partitions(cycle(4))
    assert len(core4) == 14
    assert crossing not in core4


def test_lumped_states_of_four_cycle():
    kernel = build_lumped_kernel(cycle(4))
    assert kernel.size == 36


# ---------------------------------------------------------------------------
# Matrix algebra and serialization.
# ---------------------------------------------------------------------------


def test_matrix_multiply_matches_evaluation():
    kernel = build_lumped_kernel(cycle(2))
    square = kernel @ kernel
    at = Fraction(2, 5)
    base = kernel.evaluate(at)
    expected = [
        [sum(base[i][k] * base[k][j] for k in range(kernel.size)) for j in range(kernel.size)]
        for i in range(kernel.size)
    ]
    assert square.evaluate(at) == expected


def test_matrix_json_round_trip():
    kernel = build_reduced_kernel(cycle(3))
    data = json.loads(json.dumps(kernel.to_dict()))
    assert PolyMatrix.from_dict(data) == kernel


def test_config_weights_sum_to_one():
    from layerchain.algebra import poly_sum
    from math import comb

    width = 4
    weights = config_weights(width)
    total = poly_sum(comb(width, k) * weights[k] for k in range(width + 1))
    assert total == ONE


def test_bridge_reach_basic():
    g = cycle(2)
    infected = Pattern([(STAR, 0), (1,)])
    upper = Pattern([(STAR,), (0, 1)])
    # no verticals: only the infected block itself
    assert bridge_reach(g, infected, upper, 0) == 0b01
    # verticals at both: the upper block joins 0 and 1
    assert bridge_reach(g, infected, upper, 0b11) == 0b11
    # vertical only at 1: upper layer disconnected from the infection
    assert bridge_reach(g, infected, upper, 0b10) == 0b01


def test_projection_commutes_with_stepping():
    """Deleting the infection before or after one layer step is the same map;
    this is the deterministic core of the lumping identity."""
    rng = random.Random(23)
    for g in (cycle(2), cycle(3), path(3)):
        patterns = enumerate_patterns(g)
        for _ in range(60):
            source = rng.choice(patterns)
            z = rng.randrange(1 << g.bond_count)
            stepped = step_pattern(g, source, z)
            projected = step_pattern(g, delete_infection(source), z)
            assert delete_infection(stepped) == projected


def test_full_and_lumped_chains_give_equal_distributions():
    """Dual route: evolving the exact initial distribution with the full
    kernel and with the lumped kernel gives identical infected-state weights."""
    from layerchain.analysis import initial_distribution, stationary_distribution
    from layerchain.algebra import poly_dot, poly_sum

    for g in (cycle(2), cycle(3)):
        full = build_full_kernel(g)
        lumped = build_lumped_kernel(g)
        stationary = stationary_distribution(build_reduced_kernel(g))
        initial = initial_distribution(stationary, g)
        full_weights = [
            initial.entry(state) if state in lumped.states[1:] else Polynomial()
            for state in full.states
        ]
        lumped_weights = list(initial.entries)
        for _ in range(3):
            full_cols = list(zip(*full.entries))
            full_weights = [poly_dot(full_weights, col) for col in full_cols]
            lumped_cols = list(zip(*lumped.entries))
            lumped_weights = [poly_dot(lumped_weights, col) for col in lumped_cols]
            for state, weight in zip(lumped.states, lumped_weights):
                if state is DAGGER:
                    uninfected_total = poly_sum(
                        w for s, w in zip(full.states, full_weights) if not is_infected(s)
                    )
                    assert weight == uninfected_total
                else:
                    assert weight == full_weights[full.index(state)]
