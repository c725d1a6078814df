import json

import pytest

from lowterm.diagrams import (
    CHASES,
    CompatibilityError,
    Diagram,
    InfiniteNode,
    InvalidTarget,
    build_main_diagram,
    build_variant_diagram,
    canonical_variants,
    chase_left,
    chase_right,
    enumerate_chases,
    main_sign_table,
    stalk0_comparison,
    variant_data,
    verify,
)
from lowterm.fgab import FgAbGroup


@pytest.fixture(scope="module")
def lib1(library):
    S = library["LIB-1"].spectral()
    return S, build_main_diagram(S, "LIB-1")


def test_sign_table():
    table = main_sign_table()
    assert len(table) == 12
    assert [k for k, s in table.items() if s == -1] == [(3, 3)]


@pytest.mark.parametrize("name", ["LIB-0", "LIB-1", "LIB-2", "LIB-3"])
def test_main_diagram_verifies(library, name):
    S = library[name].spectral()
    rep = verify(build_main_diagram(S, name))
    assert rep.passed, [(c.kind, c.pos, c.detail) for c in rep.failures()]
    kinds = {c.kind for c in rep.checks}
    assert kinds == {"square", "exactness"}
    assert sum(c.kind == "square" for c in rep.checks) == 12
    sq33 = [c for c in rep.checks if c.kind == "square" and c.pos == [[3, 3], [4, 4]]]
    assert sq33[0].sign == -1


def test_negative_control_located(lib1):
    S, d = lib1
    # find a square whose top route is nonzero and kill its first arrow
    for sq in d.squares:
        top = d.arrow(sq.b, sq.d) @ d.arrow(sq.a, sq.b)
        if not top.is_zero():
            break
    else:
        pytest.skip("all squares have zero composites")
    bad = build_main_diagram(S, "LIB-1")
    bad.arrows[(sq.a, sq.b)] = d.arrow(sq.a, sq.b).scale(0)
    rep = verify(bad)
    assert not rep.passed
    assert [list(sq.a), list(sq.d)] in [c.pos for c in rep.failures() if c.kind == "square"]


def test_negative_control_exactness(lib1):
    S, d = lib1
    bad = build_main_diagram(S, "LIB-1")
    for (a, b), m in d.arrows.items():
        if a[0] == b[0] and a[0] <= 4 and not m.is_zero():
            bad.arrows[(a, b)] = m.scale(0)
            break
    rep = verify(bad)
    assert any(c.kind == "exactness" for c in rep.failures())


@pytest.mark.parametrize("position", ["left", "right"])
def test_enumerated_chases(lib1, position):
    _, d = lib1
    summ = enumerate_chases(d, position)
    assert summ.ok and summ.compatible > 0
    assert summ.pairs == summ.compatible + summ.rejected


def test_zero_pair_and_certificate(lib1):
    _, d = lib1
    for position, fn in (("left", chase_left), ("right", chase_right)):
        P = CHASES[position]
        b, g = d.nodes[P["beta"]].zero(), d.nodes[P["gamma"]].zero()
        cert = fn(d, b, g)
        assert cert.validate(d)
        assert cert.sign == d.chase_sign == -1


def test_incompatible_pair_rejected(lib1):
    _, d = lib1
    P = CHASES["right"]
    Gb, Gg = d.nodes[P["beta"]], d.nodes[P["gamma"]]
    fb, fg = d.arrow(P["beta"], P["meet"]), d.arrow(P["gamma"], P["meet"])
    pairs = [(b, g) for b in Gb.enumerate_elements() for g in Gg.enumerate_elements()
             if fb(b) != fg(g)]
    assert pairs
    with pytest.raises(CompatibilityError):
        chase_right(d, *pairs[0])


def test_infinite_node_refused():
    d = Diagram("Z nodes")
    P = CHASES["left"]
    d.add_node(P["beta"], FgAbGroup(1), "b")
    d.add_node(P["gamma"], FgAbGroup(1), "g")
    with pytest.raises(InfiniteNode):
        enumerate_chases(d, "left")


def test_variant_invalid_target(lib1):
    S, _ = lib1
    with pytest.raises(InvalidTarget):
        variant_data(S, S.S0, S.inc_S0_D)


def test_variants_and_comparison(lib1):
    S, main = lib1
    for label, (B, f) in canonical_variants(S).items():
        d, vd = build_variant_diagram(S, B, f, label)
        assert verify(d).passed, label
        if label == "stalk0":
            checks = stalk0_comparison(S, main, d, vd)
            assert all(c.status == "pass" for c in checks)
            for c in (1, 2, 4, 5):
                assert d.nodes[(1, c)].shape == main.nodes[(1, c)].shape


def test_json_schema(lib1):
    _, d = lib1
    data = json.loads(verify(d).dumps())
    assert set(data) == {"scenario", "nodes", "checks", "pass"}
    assert data["scenario"] == "LIB-1" and data["pass"] is True
    for node in data["nodes"]:
        assert set(node) == {"pos", "rank", "divisors"}
        assert all(x > 1 for x in node["divisors"])
    for c in data["checks"]:
        assert set(c) == {"kind", "pos", "status", "sign"}
        assert c["kind"] in ("square", "exactness") and c["status"] in ("pass", "fail")
