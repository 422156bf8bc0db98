import itertools

import pytest

from hybrix.algebra import (
    FiniteBAO,
    HybridStructure,
    Kind,
    all_baos,
    all_hybrid,
    bits,
    canonical_at_rows,
    check_at_axioms,
    degenerate,
    grounded,
    hybrid,
    is_permeated,
    isomorphic,
    map_element,
    nom_schema_holds,
    nom_schema_violation,
    orthodox,
    pair,
    product,
    structure_from_json,
    structure_to_json,
    unpair,
)
from hybrix.errors import AlgebraMismatch, KindError, NotDesignated, StructureError


def diamond_by_relation(bao, a):
    """Oracle: x is below diamond(a) iff x R y for some y in a."""
    rel = bao.relation()
    return sum(1 << x for x in range(bao.k) if any((x, y) in rel for y in bits(a)))


@pytest.mark.parametrize("k, count", [(1, 2), (2, 16), (3, 512)])
def test_bao_enumeration_count(k, count):
    assert sum(1 for _ in all_baos(k)) == count


@pytest.mark.parametrize("k", [1, 2, 3])
def test_operators_match_relational_oracle(k):
    for bao in all_baos(k):
        for a in bao.elements():
            assert bao.diamond(a) == diamond_by_relation(bao, a)
            conv = sum(1 << y for y in range(k) if any((x, y) in bao.relation() for x in bits(a)))
            assert bao.diamond_inv(a) == conv
            assert bao.box(a) == bao.top ^ bao.diamond(bao.top ^ a)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_adjunctions(k):
    for bao in all_baos(k):
        for a, b in itertools.product(bao.elements(), repeat=2):
            assert bao.leq(bao.diamond_inv(a), b) == bao.leq(a, bao.box(b))
            assert bao.leq(bao.diamond(a), b) == bao.leq(a, bao.box_inv(b))


def test_power_horizon_covers_all_exponents():
    for bao in all_baos(2):
        tables = bao.power_tables()
        for n in range(12):
            assert tuple(bao.diamond_pow(a, n) for a in bao.elements()) in tables


def test_element_checks():
    bao = FiniteBAO.identity(2)
    with pytest.raises(AlgebraMismatch):
        bao.diamond(4)
    with pytest.raises(StructureError):
        FiniteBAO(2, (1,))


def test_structure_kinds():
    bao = FiniteBAO.identity(2)
    with pytest.raises(StructureError):
        HybridStructure(bao, frozenset(), Kind.HYBRID)
    with pytest.raises(StructureError):
        HybridStructure(bao, frozenset({0}), Kind.DEGENERATE)
    assert grounded(hybrid(bao, [1])).nominal_range() == [0, 2]
    assert grounded(grounded(hybrid(bao, [1]))) == grounded(hybrid(bao, [1]))
    assert degenerate(bao).nominal_range() == []


def test_product_encoding(two_element):
    ab = product(two_element, two_element)
    assert ab.kind is Kind.HYBRID and ab.bao.k == 2
    c = pair(two_element, 1, 0)
    assert unpair(two_element, c) == (1, 0)
    assert product(degenerate(two_element.bao), degenerate(two_element.bao)).kind is Kind.DEGENERATE
    # operations act componentwise
    for a, b in itertools.product(range(2), repeat=2):
        assert unpair(two_element, ab.bao.diamond(pair(two_element, a, b))) == (a, b)


def permeated_oracle(h):
    bao, xs = h.bao, h.designated_mask
    cond1 = all(b & xs for b in range(1, bao.size))
    cond2 = all(
        any(bao.diamond(1 << y) & (1 << x) for y in bits(a & xs))
        for x in h.designated for a in bao.elements() if bao.diamond(a) >> x & 1
    )
    return cond1 and cond2


@pytest.mark.parametrize("k", [1, 2, 3])
def test_permeation_matches_oracle(k):
    for h in all_hybrid(k):
        assert is_permeated(h).holds == permeated_oracle(h)


def test_permeation_witness():
    h = hybrid(FiniteBAO.identity(2), [0])
    r = is_permeated(h)
    assert not r.holds and r.condition == 1 and r.witness == (2,)
    with pytest.raises(KindError):
        is_permeated(degenerate(FiniteBAO.identity(1)))


def test_canonical_at_passes_axioms():
    for h in all_hybrid(2):
        assert check_at_axioms(h) == []


def test_non_canonical_at_row_rejected(two_element):
    bad = {1: (1, 1)}          # @_x bot = top breaks self-duality
    assert check_at_axioms(two_element, bad)


def test_at_table_requires_rows():
    bao = FiniteBAO.identity(2)
    h = hybrid(bao, [0, 1])
    with pytest.raises(StructureError):
        h.with_at_table({1: canonical_at_rows(h)[1]})
    with pytest.raises(NotDesignated):
        hybrid(bao, [0]).at(2, 3)


def nom_oracle(bao, s, horizon=8):
    for n, m in itertools.product(range(horizon), repeat=2):
        for a in bao.elements():
            if bao.diamond_pow(s & a, n) & ~bao.box_pow((bao.top ^ s) | a, m):
                return False
    return True


@pytest.mark.parametrize("k", [1, 2])
def test_nom_schema_matches_unrolled_oracle(k):
    for bao in all_baos(k):
        for s in bao.elements():
            assert (nom_schema_violation(bao, s) is None) == nom_oracle(bao, s)


def test_nom_schema_atoms_and_bottom_always_pass():
    for bao in all_baos(2):
        assert nom_schema_violation(bao, 0) is None
        for a in bao.atoms():
            assert nom_schema_violation(bao, a) is None


def test_orthodox_constants():
    bao = FiniteBAO.identity(1)
    h = orthodox(bao, {"j": 0})
    assert h.constant("j") == 0 and h.constant("i") == 1
    assert nom_schema_holds(h)
    with pytest.raises(KindError):
        hybrid(bao, [0]).constant("i")


def test_isomorphism_finds_permutation():
    a = hybrid(FiniteBAO.from_relation(2, [(0, 1)]), [0])
    b = hybrid(FiniteBAO.from_relation(2, [(1, 0)]), [1])
    perm = isomorphic(a, b)
    assert perm == (1, 0)
    for x in a.bao.elements():
        assert map_element(perm, a.bao.diamond(x)) == b.bao.diamond(map_element(perm, x))
    assert isomorphic(a, hybrid(b.bao, [0])) is None


def test_json_round_trip():
    bao = FiniteBAO.from_relation(2, [(0, 1), (1, 1)])
    for h in (hybrid(bao, [1]), degenerate(bao), orthodox(bao, {"i1": 1}, 2)):
        assert structure_from_json(structure_to_json(h)) == h
    h = orthodox(bao, {"i1": 1}, 2)
    h = h.with_at_table(canonical_at_rows(h))
    assert structure_from_json(structure_to_json(h)) == h
    with pytest.raises(StructureError):
        structure_from_json({"diamond": []})
