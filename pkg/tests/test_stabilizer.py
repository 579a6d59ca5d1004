import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import cluster_state_from_stabilizers, expectation, normal_form_matrix, pauli_matrix
from stabgrid.lattice import grid, path, triangle
from stabgrid.stabilizer import (
    PauliOperator,
    StabilizerError,
    StabilizerSet,
    canonical_set,
    enumerate_group,
    gf2_rank,
    in_canonical_group,
    multiply,
    product_of_sites,
    support_stats,
    transform_set,
)

EXAMPLE_M = [
    [1, 1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 0, 1, 1, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 1],
    [0, 0, 0, 0, 0, 1],
]
EXAMPLE_SUPPORTS = ["YYZZZI", "ZXZIZI", "ZZXXZZ", "ZIIXZI", "IZZZYY", "IIZIZX"]


def _matrix(op):
    return normal_form_matrix(op.n, op.x_bits, op.z_bits, op.phase)


def test_canonical_grid_2x3_listing():
    texts = [str(s) for s in canonical_set(grid(2, 3))]
    assert texts == ["+XZIZII", "+ZXZIZI", "+IZXIIZ", "+ZIIXZI", "+IZIZXZ", "+IIZIZX"]


def test_canonical_small_cases():
    assert [str(s) for s in canonical_set(path(1))] == ["+X"]
    assert [str(s) for s in canonical_set(path(3))] == ["+XZI", "+ZXZ", "+IZX"]


@pytest.mark.parametrize("text", ["+XZIY", "-YYZ", "+iXZ", "-iZY", "+IIII", "Y"])
def test_normal_form_matches_dense_matrix(text):
    op = PauliOperator.from_string(text)
    assert np.allclose(_matrix(op), pauli_matrix(text if text[0] in "+-" else "+" + text))
    assert str(op).lstrip("+") == text.lstrip("+") or str(op) == text


letters = st.text(alphabet="IXYZ", min_size=1, max_size=4)
signs = st.sampled_from(["+", "-", "+i", "-i"])


@settings(max_examples=150)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.text(alphabet="IXYZ", min_size=n, max_size=n), st.text(alphabet="IXYZ", min_size=n, max_size=n),
    signs, signs)))
def test_multiply_matches_matrix_product(case):
    a, b, sa, sb = case
    p, q = PauliOperator.from_string(sa + a), PauliOperator.from_string(sb + b)
    assert np.allclose(_matrix(multiply(p, q)), pauli_matrix(sa + a) @ pauli_matrix(sb + b))


def test_product_example_and_involution():
    s = canonical_set(grid(2, 3))
    p = multiply(s[0], s[1])
    assert p.letters() == "YYZZZI"
    assert p.sign == 1
    for op in s:
        sq = op * op
        assert sq.x == 0 and sq.z == 0 and sq.phase == 0


def test_diag_times_antidiag_is_corners():
    g = grid(3, 3)
    diag = product_of_sites(g, 0b100010001)
    anti = product_of_sites(g, 0b001010100)
    prod = diag * anti
    assert prod.z == 0
    assert prod.x == 0b101000101


def test_transform_reproduces_example_supports():
    out = transform_set(canonical_set(grid(2, 3)), EXAMPLE_M)
    assert [op.letters() for op in out] == EXAMPLE_SUPPORTS
    assert all(op.sign == 1 for op in out)
    assert out.is_generating()


def test_transform_identity_and_singular():
    s = canonical_set(grid(2, 3))
    assert transform_set(s, np.eye(6, dtype=int)).ops == s.ops
    bad = np.eye(6, dtype=int)
    bad[1] = bad[0]
    with pytest.raises(StabilizerError, match="rank 5"):
        transform_set(s, bad)


@settings(max_examples=40)
@given(st.integers(0, 2 ** 32 - 1))
def test_transform_preserves_row_space(seed):
    rng = np.random.default_rng(seed)
    s = canonical_set(grid(2, 3))
    while True:
        m = rng.integers(0, 2, size=(6, 6))
        try:
            out = transform_set(s, m)
            break
        except StabilizerError:
            continue
    assert gf2_rank(out) == 6
    assert gf2_rank(list(out) + list(s)) == 6
    assert out.commuting() and out.in_canonical_group()


def test_gf2_rank_examples():
    g = grid(3, 3)
    assert gf2_rank(canonical_set(g)) == 9
    s = canonical_set(g)
    assert gf2_rank([s[0], s[0], s[1]]) == 2
    hctfs = [product_of_sites(g, b) for b in (0b100010001, 0b001010100, 0b010101010)]
    assert gf2_rank(hctfs) == 3


def test_enumerate_sizes():
    g = grid(3, 3)
    elems = list(enumerate_group(canonical_set(g)))
    assert len(elems) == 512
    assert len({(e.x, e.z) for e in elems}) == 512
    assert all(e.is_hermitian() for e in elems)
    s = canonical_set(path(2))
    assert len(list(enumerate_group(s))) == 4
    empty = StabilizerSet((), path(2))
    assert [str(e) for e in enumerate_group(empty)] == ["+II"]


def test_enumerate_limit():
    with pytest.raises(StabilizerError):
        list(enumerate_group(canonical_set(grid(3, 3)), limit=8))


def test_enumerate_partitions_concatenate():
    s = canonical_set(grid(2, 3))
    full = list(enumerate_group(s))
    chunks = [list(enumerate_group(s, start=a, stop=a + 16)) for a in range(0, 64, 16)]
    assert sum(chunks, []) == full


def test_every_group_element_has_unit_expectation():
    g = grid(2, 3)
    psi = cluster_state_from_stabilizers(g)
    for e in enumerate_group(canonical_set(g)):
        assert abs(expectation(psi, _matrix(e)) - 1) < 1e-10


def test_triangle_group_is_hermitian():
    for e in enumerate_group(canonical_set(triangle(4))):
        assert e.is_hermitian()


@settings(max_examples=60)
@given(st.tuples(*[st.integers(0, 2 ** 9 - 1)] * 3))
def test_multiply_associative_commutative(masks):
    g = grid(3, 3)
    a, b, c = (product_of_sites(g, m) for m in masks)
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
    assert multiply(a, b) == multiply(b, a)
    assert multiply(a, b).is_hermitian()
    assert in_canonical_group(multiply(a, b), g)


def test_support_stats():
    g = grid(3, 3)
    assert support_stats(product_of_sites(g, 0b100010001)) == (3, 1, True)
    assert support_stats(PauliOperator.identity(4)) == (0, 0, True)
    assert support_stats(canonical_set(grid(2, 3))[0]) == (3, 1, False)


def test_group_membership_tracks_sign():
    g = grid(2, 3)
    s = canonical_set(g)[0]
    neg = PauliOperator(s.n, s.x, s.z, s.phase + 2)
    assert in_canonical_group(s, g)
    assert not in_canonical_group(neg, g)


def test_json_round_trip():
    s = transform_set(canonical_set(grid(2, 3)), EXAMPLE_M)
    again = StabilizerSet.from_dict(s.to_dict())
    assert again.ops == s.ops
    assert again.lattice == s.lattice
    d = s[0].to_dict()
    assert d == {"x": "110000", "z": "111110", "phase": 2, "text": "+YYZZZI"}


def test_length_mismatch():
    with pytest.raises(StabilizerError):
        multiply(PauliOperator.identity(2), PauliOperator.identity(3))
