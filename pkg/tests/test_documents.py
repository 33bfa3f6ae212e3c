from fractions import Fraction

import pytest

from anabel import documents
from anabel.documents import DocumentError, dump_graph, dump_monoid, dump_polysimplicial, load, parse, serialize
from anabel.graphs import BranchGraph, MetricGraph
from anabel.monoids import AffineMonoid
from anabel.poly import box_product, representable


def test_parse_serialize_roundtrip():
    text = "\n".join(
        [
            "kind = graph",
            "vertices = u v",
            "edge a = u v",
            "cusp z = u",
        ]
    )
    node = parse(text)
    assert serialize(node) == text


def test_graph_roundtrip():
    G = BranchGraph(["u", "v"], {"a": ("u", "v"), "z": ("u",)})
    kind, G2 = load(dump_graph(G))
    assert kind == "graph"
    assert G2.edges == G.edges and G2.vertices == G.vertices


def test_metric_graph_roundtrip():
    G = MetricGraph(
        ["u", "v"],
        {"a": ("u", "v"), "b": ("u", "v")},
        {"a": Fraction(3, 2), "b": Fraction(1)},
    )
    kind, G2 = load(dump_graph(G, kind="metric-graph"))
    assert kind == "metric-graph"
    assert G2.lengths == G.lengths


def test_metric_graph_requires_lengths():
    text = "\n".join(
        ["kind = metric-graph", "vertices = u v", "edge a = u v"]
    )
    with pytest.raises(DocumentError):
        load(text)


def test_monoid_roundtrip():
    P = AffineMonoid(2, [(1, 0), (1, 2)])
    kind, P2 = load(dump_monoid(P))
    assert kind == "monoid"
    assert P2 == P


def test_morphism_document():
    text = "\n".join(
        [
            "kind = morphism",
            "source:",
            "  kind = monoid",
            "  dim = 1",
            "  gen = 1",
            "target:",
            "  kind = monoid",
            "  dim = 2",
            "  gen = 1 0",
            "  gen = 0 1",
            "row = 1",
            "row = 1",
        ]
    )
    kind, phi = load(text)
    assert kind == "morphism"
    assert phi.apply((2,)) == (2, 2)


def test_morphism_document_validates_membership():
    text = "\n".join(
        [
            "kind = morphism",
            "source:",
            "  kind = monoid",
            "  dim = 1",
            "  gen = 1",
            "target:",
            "  kind = monoid",
            "  dim = 1",
            "  gen = 1",
            "row = -1",
        ]
    )
    with pytest.raises(ValueError):
        load(text)


def test_polysimplicial_roundtrip():
    for C in (representable((1,)), box_product(representable((1,)), representable((1,)))):
        kind, C2 = load(dump_polysimplicial(C))
        assert kind == "polysimplicial"
        assert C2.cells == C.cells
        assert C2.nondegenerate_cells() == C.nondegenerate_cells()
        from anabel.poly_ops import find_isomorphism

        assert find_isomorphism(C2, C) is not None


def test_polysimplicial_generating_set_closes():
    # keep only the codimension-1 face entries; loading must derive the rest
    from anabel.poly import index_dim

    C = representable((1, 1))
    node = documents.parse(dump_polysimplicial(C))
    kept = documents.Node()
    for key, val in node.entries:
        if key[0] != "face":
            kept.entries.append((key, val))
            continue
        cell = key[1]
        iota = documents._parse_morphism(val.one("along"))
        if index_dim(iota.source) == index_dim(C.cells[cell]) - 1:
            kept.entries.append((key, val))
    trimmed = documents.serialize(kept)
    assert trimmed != dump_polysimplicial(C)
    kind, C2 = load(trimmed)
    assert kind == "polysimplicial"
    assert C2.faces == C.faces


def test_polysimplicial_nongenerating_set_rejected():
    from anabel.poly import index_dim

    C = representable((1, 1))
    node = documents.parse(dump_polysimplicial(C))
    kept = documents.Node()
    for key, val in node.entries:
        if key[0] == "face":
            cell = key[1]
            iota = documents._parse_morphism(val.one("along"))
            if C.cells[cell] == (1, 1):
                continue  # drop every face of the top cell
        kept.entries.append((key, val))
    with pytest.raises(DocumentError) as err:
        load(documents.serialize(kept))
    assert "generate" in str(err.value)


def test_unknown_kind_rejected():
    with pytest.raises(DocumentError):
        load("kind = widget")


def test_error_reports_missing_entry():
    with pytest.raises(DocumentError) as err:
        load("kind = monoid")
    assert "dim" in str(err.value)
