import json

import pytest

from schreierlab.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, out


def call_json(capsys, *argv):
    code, out = call(capsys, *argv)
    return code, json.loads(out)


def test_hsum_example(capsys):
    code, out = call_json(capsys, "ord", "hsum", "w+1", "w")
    assert code == 0 and out["result"] == "w*2+1"
    assert set(out) == {"result", "certificates", "consumed_prefixes", "warnings"}


@pytest.mark.parametrize("argv, want", [
    (("ord", "cmp", "w^w", "w^3"), "greater"),
    (("ord", "add", "w^2+w", "w*3"), "w^2+w*4"),
    (("ord", "mul", "w+1", "2"), "w*2+1"),
    (("ord", "fund", "w^w", "2"), "w^2"),
    (("ord", "decomp", "2"), [["0", "2"], ["1", "1"], ["2", "0"]]),
    (("family", "member", "--family", "S[2]", "--set", "{2,3,4,6,7}"), True),
    (("family", "iota", "--family", "sum(A(2),S[1])"), "w+2"),
    (("family", "admissible", "--family", "S[1]", "--blocks", "{2,3},{5}"), True),
    (("family", "relabel", "--family", "S[1]", "--set", "{1,3}", "--stream", "evens"), "{2,6}"),
    (("tree", "order", "--tree", "[[1],[1,2],[3]]"), 2),
    (("norm", "schreier", "--vec", "e1+e2+e3"), "2"),
    (("norm", "lp", "--vec", "e1+e2", "--p", "1"), "2"),
    (("verify", "counterexample", "--n", "10", "--m", "1000"), "2099/1111"),
    (("lp", "dominate", "--space", "linf", "--vecs", "e1;e2"), "1/2"),
    (("lp", "t1", "--space", "linf", "--vecs", "e1;e2", "--K", "19/10"), False),
    (("lp", "w", "--space", "linf", "--vecs", "e1;e1", "--K", "3/2"), False),
])
def test_examples(capsys, argv, want):
    code, out = call_json(capsys, *argv)
    assert code == 0 and out["result"] == want


def test_tsirelson_with_certificate(capsys):
    code, out = call_json(capsys, "norm", "tsirelson", "--theta", "1/2", "--family", "S[1]",
                          "--vec", "e3+e4+e5+e6")
    assert code == 0 and out["result"] == "3/2"
    assert out["certificates"][0]["kind"] == "tsirelson_tree"


def test_coloring_certificates(capsys):
    code, out = call_json(capsys, "tree", "color", "--tree", "[[1],[1,2],[1,3]]",
                          "--coloring", "[[[1,2],0],[[1,3],1]]")
    assert code == 0 and sum(out["result"]) == 2
    assert all(c["monochromatic"] and c["extended_map"] for c in out["certificates"])


def test_average_reports_consumed_prefix(capsys):
    code, out = call_json(capsys, "avg", "--L", "from(2)", "--xi", "1", "--n", "2")
    assert code == 0
    assert out["result"]["vector"] == {"4": "1/4", "5": "1/4", "6": "1/4", "7": "1/4"}
    assert out["consumed_prefixes"]["L_length"] == 6
    assert all(out["certificates"][0].values())


@pytest.mark.parametrize("argv", [
    ("ord", "hsum", "w+", "w"),
    ("ord", "fund", "w+1", "2"),
    ("family", "maximal", "--family", "S[2]", "--set", "{1,2}"),
    ("norm", "mazur", "--vec", "e1+e2"),
    ("tree", "order", "--tree", "[[1,2]]"),
    ("lp", "t1", "--space", "nope", "--vecs", "e1"),
])
def test_precondition_errors_exit_2(capsys, argv):
    code, out = call_json(capsys, *argv)
    assert code == 2 and out["result"] is None and out["warnings"]


def test_parse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["ord"])
    assert exc.value.code == 2


def test_budget_exit_3(capsys):
    code, out = call_json(capsys, "avg", "--L", "fastgrow(id,1/2)", "--xi", "w", "--n", "3")
    assert code == 3 and "budget" in out["warnings"][0]


def test_text_agrees_with_json(capsys):
    argv = ("norm", "tsirelson", "--vec", "e3+e4+e5+e6")
    _, js = call_json(capsys, *argv)
    code, text = call(capsys, "--format", "text", *argv)
    assert code == 0
    lines = text.strip().splitlines()
    assert lines
    for line in lines:
        path, _, value = line.partition(": ")
        node = js
        for key in path.split("."):
            node = node[int(key)] if isinstance(node, list) else node[key]
        assert json.loads(value) == node


def test_out_file(tmp_path, capsys):
    target = tmp_path / "o.json"
    code, out = call(capsys, "--out", str(target), "ord", "pow", "w")
    assert code == 0 and target.read_text().strip() == out.strip()


def test_suite_is_deterministic(capsys):
    _, first = call(capsys, "suite", "ordinals", "--seed", "7")
    _, second = call(capsys, "suite", "ordinals", "--seed", "7")
    assert first == second
    out = json.loads(first)
    assert out["result"]["criteria"] == 1 and out["result"]["passed"] == 1


def test_suite_averages_reports_the_grid(capsys):
    _, out = call_json(capsys, "suite", "averages")
    rows = {row["criterion"]: row for row in out["certificates"]}
    assert set(rows) == {4, 5}
    assert rows[5]["passed"]
    grid = rows[4]["detail"]
    assert grid["cells"] == 48 and grid["violations"] == []
    assert grid["verified"] + len(grid["over_budget"]) == 48
