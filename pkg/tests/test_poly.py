import itertools

import pytest

from anabel.intlin import FgAbGroup
from anabel.poly import (
    Element,
    LambdaMorphism,
    PolysimplicialSet,
    automorphisms,
    box_product,
    canonical_index,
    check_index,
    compose,
    epi_mono_factor,
    identity,
    index_dim,
    lambda_hom,
    points,
    representable,
)
from anabel.poly_ops import (
    CellFunctor,
    PolyMorphism,
    box_extend,
    category_pi1,
    coequalizer,
    compose_poly,
    find_isomorphism,
    is_cospec_iso,
    quotient,
)


def test_index_validation():
    assert check_index((0,)) == (0,)
    assert check_index((2, 1)) == (2, 1)
    with pytest.raises(ValueError):
        check_index((0, 1))
    with pytest.raises(ValueError):
        check_index(())
    assert canonical_index((1, 3, 2)) == (3, 2, 1)
    assert index_dim((2, 1)) == 3
    assert index_dim((0,)) == 0


def test_lambda_hom_counts():
    assert len(lambda_hom((1,), (1,))) == 4
    assert len(lambda_hom((0,), (1,))) == 2
    assert len(lambda_hom((0,), (0,))) == 1
    # enumeration and dedup happen on induced functions
    maps = {g.mapping for g in lambda_hom((1,), (1,))}
    assert len(maps) == 4


def test_lambda_composition_closure():
    homs = {}
    idx = [(0,), (1,), (1, 1)]
    for a in idx:
        for b in idx:
            homs[(a, b)] = set(lambda_hom(a, b))
    for a in idx:
        for b in idx:
            for c in idx:
                for g1 in homs[(a, b)]:
                    for g2 in homs[(b, c)]:
                        assert compose(g2, g1) in homs[(a, c)]


def test_compose_identity_flip_constants():
    ident = identity((1,))
    flip = next(g for g in automorphisms((1,)) if g != ident)
    assert compose(ident, flip) == flip
    assert compose(flip, flip) == ident
    const0 = next(
        g for g in lambda_hom((1,), (1,))
        if not g.is_injective() and g.mapping[0] == (0,)
    )
    assert compose(const0, flip) == const0


def test_rejects_diagonal_function():
    # (pt) -> (pt, pt) reads one source coordinate twice: not in the category
    with pytest.raises(ValueError):
        LambdaMorphism((1,), (1, 1), [(0, 0), (1, 1)])


def test_epi_mono_factorization():
    for m, n in [((1,), (1,)), ((1, 1), (1,)), ((2, 1), (2, 1)), ((1,), (2, 1))]:
        for g in lambda_hom(m, n):
            epi, mono = epi_mono_factor(g)
            assert epi.is_surjective()
            assert mono.is_injective()
            assert compose(mono, epi) == g
            assert canonical_index(epi.target) == epi.target


def test_representable_cells():
    L1 = representable((1,))
    assert {k: len(v) for k, v in L1.nondegenerate_cells().items()} == {
        (0,): 2,
        (1,): 1,
    }
    L0 = representable((0,))
    assert {k: len(v) for k, v in L0.nondegenerate_cells().items()} == {(0,): 1}
    L11 = representable((1, 1))
    assert {k: len(v) for k, v in L11.nondegenerate_cells().items()} == {
        (0,): 4,
        (1,): 4,
        (1, 1): 1,
    }
    assert L11.is_interiorly_free()


def test_strata_poset_interval():
    L1 = representable((1,))
    le = L1.strata_order_pairs()
    cells = sorted(L1.cells)
    maxes = [c for c in cells if all((c, d) not in le or c == d for d in cells)]
    mins = [c for c in cells if all((d, c) not in le or c == d for d in cells)]
    assert len(maxes) == 1 and len(mins) == 2


def test_strata_poset_square():
    L11 = representable((1, 1))
    le = L11.strata_order_pairs()
    assert len(L11.cells) == 9
    top = [c for c in L11.cells if L11.cells[c] == (1, 1)][0]
    assert all((c, top) in le for c in L11.cells)
    # each edge dominates exactly two vertices
    for e in (c for c in L11.cells if L11.cells[c] == (1,)):
        below = [c for c in L11.cells if (c, e) in le and c != e]
        assert len(below) == 2


def test_disjoint_union_antichain():
    from anabel.poly import disjoint_union, poly_point

    two = disjoint_union(poly_point(), poly_point())
    le = two.strata_order_pairs()
    assert len(two.cells) == 2
    assert all(a == b for a, b in le)


def make_circle():
    L1 = representable((1,))
    P = representable((0,))
    f = PolyMorphism.from_cells(P, L1, {"s0": L1.cell_element("s0")})
    g = PolyMorphism.from_cells(P, L1, {"s0": L1.cell_element("s1")})
    return coequalizer(f, g).complex


def make_fold():
    L1 = representable((1,))
    flip = next(g for g in automorphisms((1,)) if g != identity((1,)))
    return quotient(
        L1,
        [
            (L1.cell_element("s0"), L1.cell_element("s1")),
            (L1.cell_element("s01"), Element("s01", flip)),
        ],
    ).complex


def test_coequalizer_circle():
    circle = make_circle()
    assert {k: len(v) for k, v in circle.nondegenerate_cells().items()} == {
        (0,): 1,
        (1,): 1,
    }
    assert circle.euler_characteristic() == 0
    assert circle.is_interiorly_free()


def test_coequalizer_trivial_cases():
    L1 = representable((1,))
    ident = PolyMorphism.identity_of(L1)
    res = coequalizer(ident, ident)
    assert sorted(res.complex.cells.values()) == sorted(L1.cells.values())
    assert find_isomorphism(res.complex, L1) is not None


def test_coequalizer_empty_source():
    L1 = representable((1,))
    empty = PolysimplicialSet({}, {}, {})
    none = PolyMorphism.from_cells(empty, L1, {})
    res = coequalizer(none, none)
    assert find_isomorphism(res.complex, L1) is not None


def test_coequalizer_projection_equalizes():
    L1 = representable((1,))
    P = representable((0,))
    f = PolyMorphism.from_cells(P, L1, {"s0": L1.cell_element("s0")})
    g = PolyMorphism.from_cells(P, L1, {"s0": L1.cell_element("s1")})
    res = coequalizer(f, g)
    proj = res.projection
    left = compose_poly(proj, f)
    right = compose_poly(proj, g)
    for c in P.cells:
        assert res.complex.elements_equal(left.cell_map[c], right.cell_map[c])


def test_fold_is_not_interiorly_free():
    fold = make_fold()
    assert {k: len(v) for k, v in fold.nondegenerate_cells().items()} == {
        (0,): 1,
        (1,): 1,
    }
    assert not fold.is_interiorly_free()


def test_box_product_representables():
    B = box_product(representable((1,)), representable((1,)))
    assert find_isomorphism(B, representable((1, 1))) is not None


def test_box_unit():
    from anabel.poly import poly_point

    L1 = representable((1,))
    assert find_isomorphism(box_product(L1, poly_point()), L1) is not None
    assert find_isomorphism(box_product(poly_point(), L1), L1) is not None


def test_box_euler_multiplicative():
    from anabel.poly import poly_point

    circle = make_circle()
    shapes = [
        representable((1,)),
        representable((2,)),
        representable((1, 1)),
        poly_point(),
        circle,
    ]
    pairs = list(itertools.product(range(len(shapes)), repeat=2))[:10]
    for i, j in pairs:
        A, B = shapes[i], shapes[j]
        P = box_product(A, B)
        assert (
            P.euler_characteristic()
            == A.euler_characteristic() * B.euler_characteristic()
        )


def test_box_extend_constant_singleton():
    L1 = representable((1,))
    E, _ = box_extend(L1, CellFunctor.constant(L1, 1))
    assert find_isomorphism(E, L1) is not None


def test_box_extend_constant_k_disjoint_copies():
    circle = make_circle()
    E, _ = box_extend(circle, CellFunctor.constant(circle, 3))
    counts = {k: len(v) for k, v in E.nondegenerate_cells().items()}
    assert counts == {(0,): 3, (1,): 3}


def test_box_extend_two_gon():
    L1 = representable((1,))
    vals = {"s01": [0, 1], "s0": [0], "s1": [0]}
    trans = {
        key: {v: 0 for v in vals[key[0]]} for key in L1.faces
    }
    acts = {
        (c, theta): {v: v for v in vals[c]}
        for c in L1.cells
        for theta in L1.stabs[c]
    }
    E, _ = box_extend(L1, CellFunctor(vals, trans, acts))
    counts = {k: len(v) for k, v in E.nondegenerate_cells().items()}
    assert counts == {(0,): 2, (1,): 2}
    pres = category_pi1(E, [c for c in E.cells if E.cells[c] == (1,)][0])
    assert pres.abelianization() == FgAbGroup(1)


def test_box_extend_strata_count():
    # |O(C box D)| = sum of fiber sizes over the strata of C
    L1 = representable((1,))
    vals = {"s01": [0, 1], "s0": [0], "s1": [0, 1, 2]}
    trans = {}
    for (c, iota), e in L1.faces.items():
        if e.cell == "s1":
            trans[(c, iota)] = {0: 0, 1: 1}
        else:
            trans[(c, iota)] = {v: 0 for v in vals[c]}
    acts = {
        (c, theta): {v: v for v in vals[c]}
        for c in L1.cells
        for theta in L1.stabs[c]
    }
    E, _ = box_extend(L1, CellFunctor(vals, trans, acts))
    assert len(E.cells) == sum(len(v) for v in vals.values())


def test_box_extend_rejects_nonfunctorial():
    # values shrink along one vertex but the other face map is missing
    L1 = representable((1,))
    vals = {"s01": [0, 1], "s0": [0], "s1": [0]}
    trans = {key: None for key in L1.faces}
    with pytest.raises(ValueError):
        box_extend(L1, CellFunctor(vals, {}, {}))


def test_category_pi1_representables_trivial():
    for n in [(1,), (2,), (1, 1)]:
        pres = category_pi1(
            representable(n),
            [c for c in representable(n).cells][0],
        )
        simplified = pres.simplify()
        assert simplified.rank() == 0 or simplified.abelianization().is_trivial
        assert pres.abelianization() == FgAbGroup(0)


def test_category_pi1_circle():
    circle = make_circle()
    pres = category_pi1(circle, sorted(circle.cells)[0])
    assert pres.abelianization() == FgAbGroup(1)
    simplified = pres.simplify()
    assert simplified.rank() == 1 and simplified.is_free_presentation()


def make_wedge():
    """Two circles glued at the base vertex."""
    from anabel.poly import disjoint_union

    circle = make_circle()
    two = disjoint_union(circle, circle)
    v = sorted(c for c in two.cells if two.cells[c] == (0,))
    assert len(v) == 2
    return quotient(
        two, [(two.cell_element(v[0]), two.cell_element(v[1]))]
    ).complex


def test_category_pi1_wedge():
    wedge = make_wedge()
    counts = {k: len(v) for k, v in wedge.nondegenerate_cells().items()}
    assert counts == {(0,): 1, (1,): 2}
    pres = category_pi1(wedge, sorted(wedge.cells)[0])
    assert pres.abelianization() == FgAbGroup(2)


def test_pi1_graph_complex_rank_formula():
    # chain of two edges with both endpoints glued pairwise: rank E - V + 1
    wedge = make_wedge()
    E = len([c for c in wedge.cells if wedge.cells[c] == (1,)])
    V = len([c for c in wedge.cells if wedge.cells[c] == (0,)])
    assert category_pi1(wedge, sorted(wedge.cells)[0]).abelianization() == FgAbGroup(
        E - V + 1
    )


def test_is_cospec_iso_identity():
    L11 = representable((1, 1))
    rep = is_cospec_iso(PolyMorphism.identity_of(L11))
    assert rep.is_iso and rep.inverse is not None


def test_is_cospec_iso_rejects_collapse():
    # collapse the edge of Lambda[(1)] onto the point
    from anabel.poly import poly_point

    L1 = representable((1,))
    P = poly_point()
    to_pt = {c: Element("s0", _epi_to_point(L1.cells[c])) for c in L1.cells}
    m = PolyMorphism.from_cells(L1, P, to_pt)
    rep = is_cospec_iso(m)
    assert not rep.is_iso
    assert "degenerate" in rep.reason


def _epi_to_point(n):
    from anabel.poly import LambdaMorphism, points

    return LambdaMorphism(n, (0,), [(0,)] * len(points(n)), _checked=True)


def test_is_cospec_iso_nonfree_target_report():
    circle = make_circle()
    fold = make_fold()
    cmap = {}
    for c, n in circle.cells.items():
        tgt = [d for d in fold.cells if fold.cells[d] == n][0]
        cmap[c] = fold.cell_element(tgt)
    m = PolyMorphism.from_cells(circle, fold, cmap)
    rep = is_cospec_iso(m)
    assert not rep.is_iso
    assert "interiorly free" in rep.reason


def test_iso_criterion_positive_direction():
    # strata-bijective + nondeg-preserving + free target => explicit inverse
    B = box_product(representable((1,)), representable((1,)))
    m = find_isomorphism(B, representable((1, 1)))
    assert m is not None
    rep = is_cospec_iso(m)
    assert rep.is_iso
    assert rep.inverse is not None
    back = compose_poly(m, rep.inverse)
    for c in m.target.cells:
        assert m.target.elements_equal(
            back.cell_map[c], m.target.cell_element(c)
        )
