import json

import pytest
from hypothesis import given, strategies as st

from lowterm import cli
from lowterm.diagrams import build_main_diagram
from lowterm.scenario import (
    BUILTIN_SOURCES,
    ParseError,
    SemanticError,
    load_scenario,
    parse_scenario,
    serialize,
    tokenize,
)


def test_tokenize_comments_and_positions():
    toks = tokenize("# note\ngroup { family: cyclic; }")
    assert [t.text for t in toks[:3]] == ["group", "{", "family"]
    assert (toks[0].line, toks[0].col) == (2, 1)
    assert toks[-1].kind == "eof"


@pytest.mark.parametrize("name", sorted(BUILTIN_SOURCES))
def test_builtin_round_trip(library, name):
    sc = library[name]
    again = parse_scenario(serialize(sc), name)
    assert again.equivalent(sc)
    assert serialize(again) == serialize(sc)


@given(n=st.sampled_from([1, 2, 3, 4, 6]), k=st.integers(0, 3),
       rels=st.lists(st.integers(0, 6), min_size=1, max_size=2),
       extra=st.integers(0, 2))
def test_random_cyclic_round_trip(n, k, rels, extra):
    divisors = [e for e in range(1, n + 1) if n % e == 0]
    step = divisors[k % len(divisors)]
    elements = list(range(0, n, step))
    r = len(rels)
    relations = [[v if i == j else 0 for j in range(r)] for i, v in enumerate(rels) if v]
    rel_text = f" relations: {relations};" if relations else ""
    text = (f"group {{ family: cyclic; param: {n}; }}\n"
            f"normal {{ elements: {elements}; }}\n"
            f"module M {{ rank: {r};{rel_text} }}\n"
            f"options {{ max_degree: {4 + extra}; }}\n")
    sc = parse_scenario(text, "random")
    again = parse_scenario(serialize(sc), "random")
    assert again.equivalent(sc)
    assert sc.d == 4 + extra and sc.N.order == len(elements)


def test_defaults():
    sc = parse_scenario("group { family: cyclic; param: 3; } module M { rank: 1; }")
    assert sc.N.order == 1
    assert sc.ses.B.underlying.shape == (2, ())


def test_parse_error_end_of_input():
    with pytest.raises(ParseError) as info:
        parse_scenario("group { family: cyclic; param: 2;")
    assert info.value.line == 1


def test_parse_error_bad_token():
    with pytest.raises(ParseError) as info:
        parse_scenario("group { family = cyclic; }")
    assert info.value.token == "="


def test_missing_group_section():
    with pytest.raises(ParseError):
        parse_scenario("module M { rank: 1; }")


def test_semantic_not_closed():
    text = "group { family: cyclic; param: 4; }\nnormal { elements: [0, 1]; }\nmodule M { rank: 1; }"
    with pytest.raises(SemanticError) as info:
        parse_scenario(text)
    assert info.value.line == 2 and "not closed" in info.value.message


def test_semantic_not_normal():
    from lowterm.grpmod import builtin_group
    G = builtin_group("symmetric3")
    x = next(g for g in G.elements() if g != G.identity and G.mul(g, g) == G.identity)
    text = (f"group {{ family: symmetric3; }}\nnormal {{ elements: [{G.identity}, {x}]; }}\n"
            "module M { rank: 1; }")
    with pytest.raises(SemanticError):
        parse_scenario(text)


def test_semantic_not_a_cocycle():
    text = BUILTIN_SOURCES["LIB-1"].replace("cocycle: [[0], [1]]", "cocycle: [[1], [0]]")
    with pytest.raises(SemanticError) as info:
        parse_scenario(text)
    assert "cocycle" in info.value.message


def test_semantic_two_group_modules():
    text = "group { family: cyclic; param: 2; } module M { rank: 1; } module K { rank: 1; }"
    with pytest.raises(SemanticError):
        parse_scenario(text)


EXPLICIT = """
group { family: cyclic; param: 2; }
normal { elements: [0, 1]; }
module M { rank: 1; }
module A { over: quotient; rank: 1; relations: [[2]]; }
module B { over: quotient; rank: 1; relations: [[4]]; }
module C { over: quotient; rank: 1; relations: [[2]]; }
ses { A: A; B: B; C: C; i: [[2]]; j: [[1]]; }
"""


def test_explicit_ses_round_trip():
    sc = parse_scenario(EXPLICIT, "explicit")
    assert sc.explicit_ses
    assert sc.ses.B.underlying.torsion == (4,)
    assert parse_scenario(serialize(sc), "explicit").equivalent(sc)
    assert sc.spectral().low_term_sequence(1).is_exact()


def test_explicit_ses_not_exact():
    with pytest.raises(SemanticError):
        parse_scenario(EXPLICIT.replace("i: [[2]]", "i: [[1]]"))


def test_load_from_file(tmp_path):
    p = tmp_path / "lib1.scn"
    p.write_text(BUILTIN_SOURCES["LIB-1"])
    assert load_scenario(str(p)).equivalent(load_scenario("LIB-1"))


# -- command line -----------------------------------------------------------------

def test_cli_verify_ok(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.run("verify", ["LIB-1", "--json", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["pass"] is True and data["scenario"] == "LIB-1"
    assert "main diagram" in capsys.readouterr().out


def test_cli_verify_variant_json(tmp_path):
    out = tmp_path / "r.json"
    assert cli.run("verify", ["LIB-0", "--variant", "--json", str(out)]) == 0
    data = json.loads(out.read_text())
    assert isinstance(data, list) and len(data) == 4 and all(r["pass"] for r in data)


def test_cli_verify_failure(monkeypatch):
    def broken(S, name=""):
        d = build_main_diagram(S, name)
        for key, m in d.arrows.items():
            if key[0][0] == key[1][0] and not m.is_zero():
                d.arrows[key] = m.scale(0)
                break
        return d
    monkeypatch.setattr(cli, "build_main_diagram", broken)
    assert cli.run("verify", ["LIB-1"]) == 1


def test_cli_input_errors(tmp_path, capsys):
    assert cli.run("verify", [str(tmp_path / "missing.scn")]) == 2
    bad = tmp_path / "bad.scn"
    bad.write_text("group { family: cyclic; param: 4; }\nnormal { elements: [0, 1]; }\n"
                   "module M { rank: 1; }\n")
    assert cli.run("verify", [str(bad)]) == 2
    assert "not closed" in capsys.readouterr().err
    assert cli.main(["frobnicate"]) == 2
    assert cli.run("cohomology", ["LIB-0", "--degree", "-1"]) == 2


@pytest.mark.parametrize("command,args", [
    ("chase", ["LIB-1", "--position", "left"]),
    ("chase", ["LIB-1", "--position", "right", "--enumerate"]),
    ("cohomology", ["LIB-2", "--degree", "2"]),
    ("ext", ["LIB-1", "--degree", "2", "--t", "2"]),
    ("lowterm", ["LIB-3", "--t", "2"]),
    ("report", ["LIB-0"]),
])
def test_cli_commands(command, args, capsys):
    assert cli.run(command, args) == 0
    assert capsys.readouterr().out
