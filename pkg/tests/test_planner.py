import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabgrid.lattice import grid, path, tri_fixed
from stabgrid.optimizer import min_penalty_basis_exact
from stabgrid.planner import (
    MeasurementPattern,
    PlannerError,
    checkerboard_patterns,
    cover_matrix,
    first_cover,
    pattern_covers,
    pattern_penalty,
    plan_patterns,
    plan_penalty,
)
from stabgrid.stabilizer import PauliOperator, StabilizerSet, canonical_set, product_of_sites


def test_checkerboards_cover_canonical_exactly_once():
    g = grid(3, 3)
    a, b = checkerboard_patterns(g)
    for s in canonical_set(g):
        assert pattern_covers(a, s) != pattern_covers(b, s)
    assert a.ascii(g) == "X Z X\nZ X Z\nX Z X"


def test_checkerboard_small_cases():
    a, _ = checkerboard_patterns(grid(1, 1))
    assert a.basis == ("X",)
    assert pattern_covers(a, canonical_set(grid(1, 1))[0])
    g = grid(2, 3)
    a, b = checkerboard_patterns(g)
    assert all(pattern_covers(a, s) or pattern_covers(b, s) for s in canonical_set(g))


def test_checkerboard_needs_grid():
    with pytest.raises(PlannerError):
        checkerboard_patterns(path(3))


@pytest.mark.parametrize("rows", range(1, 7))
@pytest.mark.parametrize("cols", range(2, 7))
def test_canonical_plan_is_two_checkerboards(rows, cols):
    g = grid(rows, cols)
    plan = plan_patterns(canonical_set(g), order="checkerboard")
    assert len(plan) == 2
    assert set(plan) == set(checkerboard_patterns(g))
    assert plan_penalty(plan, g) == 2 * len(g.edges)


def test_pattern_penalty_examples():
    g = grid(3, 3)
    a, b = checkerboard_patterns(g)
    assert pattern_penalty(a, g) == pattern_penalty(b, g) == 12
    assert pattern_penalty(MeasurementPattern.uniform(9, "X"), g) == 0
    centre = MeasurementPattern(tuple("ZZZZXZZZZ"))
    assert pattern_penalty(centre, g) == 4


def test_free_sites_resolve_to_z():
    p = MeasurementPattern(tuple("X..Y"))
    assert p.resolved == ("X", "Z", "Z", "Y")
    assert p.to_dict() == {"basis": "X..Y", "resolved": "XZZY"}
    assert MeasurementPattern.from_dict(p.to_dict()) == p
    assert pattern_penalty(p, path(4)) == 2


def test_cover_rules():
    g = grid(3, 3)
    s = canonical_set(g)
    assert not any(pattern_covers(MeasurementPattern.uniform(9, "Z"), op) for op in s)
    diamond = product_of_sites(g, 0b010101010)
    assert pattern_covers(MeasurementPattern.uniform(9, "X"), diamond)
    y_op = PauliOperator.from_string("YZI")
    assert not pattern_covers(MeasurementPattern(tuple("XZZ")), y_op)
    assert pattern_covers(MeasurementPattern(tuple("YZX")), y_op)


def test_hctfs_need_one_pattern():
    g = grid(3, 3)
    hctfs = StabilizerSet(tuple(product_of_sites(g, b) for b in (0b100010001, 0b001010100, 0b010101010)), g)
    plan = plan_patterns(hctfs)
    assert [p.resolved for p in plan] == [("X",) * 9]


def test_optimized_plan():
    g = grid(3, 3)
    opt = min_penalty_basis_exact(g).set
    plan = plan_patterns(opt)
    assert len(plan) >= 3
    assert plan_penalty(plan, g) < 24
    assert all(first_cover(plan, s) is not None for s in opt)


def test_optimized_plus_canonical_targets():
    g = grid(3, 3)
    targets = StabilizerSet(tuple(min_penalty_basis_exact(g).set) + tuple(canonical_set(g)), g)
    assert len(plan_patterns(targets)) >= 3


def test_orders():
    g = grid(3, 3)
    s = canonical_set(g)
    for order in ("given", "penalty-ascending", "random-seeded"):
        plan = plan_patterns(s, order=order, seed=7)
        assert all(any(row) for row in zip(*cover_matrix(plan, s)))
    assert plan_patterns(s, "random-seeded", seed=3) == plan_patterns(s, "random-seeded", seed=3)
    with pytest.raises(PlannerError):
        plan_patterns(s, order="sideways")
    with pytest.raises(PlannerError):
        plan_patterns(StabilizerSet((), g))


lattices = st.sampled_from([grid(2, 3), grid(3, 3), tri_fixed(3, 3), path(6)])


@settings(max_examples=80)
@given(lattices.flatmap(lambda lat: st.tuples(st.just(lat), st.lists(
    st.integers(1, 2 ** lat.num_sites - 1), min_size=1, max_size=10))))
def test_every_target_is_covered(case):
    lat, masks = case
    stabs = StabilizerSet(tuple(product_of_sites(lat, m) for m in masks), lat)
    plan = plan_patterns(stabs)
    for s in stabs:
        assert any(pattern_covers(p, s) for p in plan)
    assert len(plan) <= len(stabs)
