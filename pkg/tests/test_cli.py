import json

from treebal.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report_of(out):
    line = out.strip().splitlines()[-1]
    rep = json.loads(line)
    assert rep["schema"] == "v1"
    assert set(rep) >= {"schema", "n", "tslp_size", "tslp_depth",
                        "class_count", "wall_ms", "verdict"}
    return rep


def test_balance_verify(capsys):
    code, out, _ = run(capsys, "balance", "--expr", "f(g(a,b),c)", "--verify")
    assert code == 0
    rep = report_of(out)
    assert rep["verdict"] == "verified" and rep["n"] == 5


def test_balance_trivial(capsys):
    code, out, _ = run(capsys, "balance", "--expr", "a", "--verify")
    assert code == 0
    rep = report_of(out)
    assert rep["tslp_size"] == 1 and rep["tslp_depth"] == 0


def test_balance_parse_error_exit_1(capsys):
    code, _, err = run(capsys, "balance", "--expr", "f(a,")
    assert code == 1
    assert "parse error" in err


def test_balance_cap_exit_3(capsys, monkeypatch):
    monkeypatch.setenv("TREEBAL_UNFOLD_CAP", "3")
    code, _, err = run(capsys, "balance", "--expr", "f(g(a,b),c)", "--verify")
    assert code == 3
    assert "capacity" in err


def test_balance_productions_output(capsys, tmp_path):
    dest = tmp_path / "prods.txt"
    code, _, _ = run(capsys, "balance", "--expr", "f(g(a,b),c)",
                     "--out", str(dest))
    assert code == 0
    lines = dest.read_text().splitlines()
    assert lines[-1].startswith("start N")
    assert all(ln.startswith("N") for ln in lines[:-1])


def test_emit_hierdef(capsys, tmp_path):
    dest = tmp_path / "hd.json"
    code, _, _ = run(capsys, "balance", "--expr", "f(g(a,b),c)",
                     "--emit-hierdef", str(dest), "--stats")
    assert code == 0
    entries = json.loads(dest.read_text())
    assert any(e["type"] == "subtree" and e["v"] == 0 for e in entries)
    assert all("class" in e for e in entries)


def test_emit_dot(capsys, tmp_path):
    dest = tmp_path / "c.dot"
    code, _, _ = run(capsys, "balance", "--expr", "f(a,b)",
                     "--emit-dot", str(dest))
    assert code == 0
    assert dest.read_text().startswith("digraph")


def test_semiring_verified(capsys):
    code, out, _ = run(capsys, "semiring", "--expr", "add(k1,mul(k2,k3))",
                       "--algebra", "modp:97", "--verify")
    assert code == 0
    assert report_of(out)["verdict"] == "verified"


def test_semiring_rejects_foreign_symbol(capsys):
    code, _, err = run(capsys, "semiring", "--expr", "frob(k1,k2)")
    assert code == 1


def test_regex_verified(capsys):
    code, out, _ = run(capsys, "regex", "--expr", "(a+b)*ab", "--verify")
    assert code == 0
    rep = report_of(out)
    assert rep["verdict"] == "verified"
    assert rep["star_height"] <= rep["tslp_depth"]


def test_regex_parse_error(capsys):
    code, _, err = run(capsys, "regex", "--expr", "((a")
    assert code == 1


def test_eval_reports_value(capsys):
    code, out, _ = run(capsys, "eval", "--expr", "add(k2,mul(k3,k4))",
                       "--algebra", "minplus", "--verify")
    assert code == 0
    rep = report_of(out)
    assert rep["verdict"] == "verified" and rep["value"] == "2"


def test_gen_deterministic(capsys, tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    run(capsys, "gen", "--shape", "random", "--n", "200", "--seed", "7",
        "--out", str(a))
    run(capsys, "gen", "--shape", "random", "--n", "200", "--seed", "7",
        "--out", str(b))
    assert a.read_text() == b.read_text()
    run(capsys, "gen", "--shape", "random", "--n", "200", "--seed", "8",
        "--out", str(b))
    assert a.read_text() != b.read_text()


def test_gen_caterpillar_golden(capsys, tmp_path):
    dest = tmp_path / "c.txt"
    code, _, _ = run(capsys, "gen", "--shape", "caterpillar", "--n", "7",
                     "--seed", "1", "--out", str(dest))
    assert code == 0
    text = dest.read_text()
    # left-deep chain: each internal node's right child is a leaf
    from treebal import OrderedTree, parse_term
    T = OrderedTree.from_term(parse_term(text))
    assert T.n == 7 and T.is_full_binary()
    assert T.depth[max(range(T.n), key=lambda v: T.depth[v])] == 3


def test_rounds_dumps_frames(capsys, tmp_path):
    dest = tmp_path / "rounds.dot"
    code, _, _ = run(capsys, "rounds", "--expr",
                     "f(f(f(a,b),f(c,d)),f(f(e,g),f(h,i)))",
                     "--out", str(dest))
    assert code == 0
    text = dest.read_text()
    assert text.count("digraph") >= 2
    assert "digraph T0" in text


def test_pipeline_deterministic(capsys):
    _, out1, _ = run(capsys, "balance", "--expr", "f(g(a,b),c)")
    _, out2, _ = run(capsys, "balance", "--expr", "f(g(a,b),c)")
    r1, r2 = report_of(out1), report_of(out2)
    r1.pop("wall_ms"), r2.pop("wall_ms")
    assert r1 == r2
