import json

import pytest

from graphhyper.cli import load_guards, main, render, run
from graphhyper.feynman import FixtureRegistry, Provenance, banana_closed
from graphhyper.graphs import banana, complete_graph, ifails_graph, iifails_graph, triangle


@pytest.fixture
def gfile(tmp_path):
    def write(g, name="g.txt", as_json=False):
        path = tmp_path / name
        path.write_text(g.to_json() if as_json else g.to_text())
        return str(path)

    return write


def strip_timing(report):
    out = dict(report)
    out.pop("timing", None)
    return out


def test_psi_all_methods(gfile):
    report, code = run(["psi", gfile(iifails_graph()), "--method", "all"])
    assert code == 0
    assert report["results"]["agreement"] is True
    assert report["graph_key"].startswith("V3|")
    json.dumps(report)


def test_psi_json_input(gfile):
    report, code = run(["psi", gfile(triangle(), "g.json", as_json=True)])
    assert code == 0 and report["results"]["polynomial"] == "t1 + t2 + t3"


def test_classify(gfile):
    report, code = run(["classify", gfile(iifails_graph()), "--applicability"])
    assert code == 0
    edges = report["results"]["edges"]
    assert set(edges) == {"t1", "t2", "t3", "t4", "t5"}
    assert all(r["class"] == "Regular" for r in edges.values())
    assert edges["t5"]["applicability"] == "NotApplicable"


def test_conditions(gfile):
    report, code = run(["conditions", gfile(ifails_graph()), "--edge", "t7"])
    assert code == 0
    res = report["results"]
    assert res["condition_I"] == "FailsByMembership"
    assert res["applicability"] == "NotApplicable"
    assert "groebner_s" in report["timing"]


def test_conditions_non_regular_is_usage_error(gfile):
    report, code = run(["conditions", gfile(triangle()), "--edge", "t1"])
    assert code == 2 and "not regular" in report["error"]


def test_feynman(gfile):
    report, code = run(["feynman", gfile(banana(5))])
    assert code == 0 and report["results"]["C"] == "t^5 + t^4 + 6*t^3 - 4*t^2 + t"
    report, code = run(["feynman", gfile(iifails_graph()), "--edge", "t5", "--multi-edge", "3"])
    assert code == 0 and report["results"]["C"] == "t^7 + 2*t^6 + 11*t^5 + 5*t^3 - 4*t^2 + t"


def test_feynman_blocked(gfile):
    report, code = run(["feynman", gfile(complete_graph(4))])
    assert code == 4
    assert "C(X_(G minus e) cap X_(G/e))" in report["results"]["blocked"]
    assert report["trace"]["rule"] == "blocked"


def test_feynman_custom_fixtures(gfile, tmp_path):
    reg = FixtureRegistry()
    reg.insert_graph(complete_graph(4), banana_closed(6), Provenance.USER_INPUT, name="fake")
    path = tmp_path / "fx.json"
    reg.save(path)
    report, code = run(["feynman", gfile(complete_graph(4)), "--fixtures", str(path)])
    assert code == 0 and report["results"]["C"] == str(banana_closed(6))


def test_count(gfile):
    report, code = run(["count", gfile(banana(2)), "--primes", "5"])
    assert code == 0
    (rec,) = report["results"]["counts"]
    assert (rec["zeros"], rec["complement"]) == (5, 20)
    assert "p5_elapsed_ms" in report["timing"]
    assert "elapsed_ms" not in rec


def test_count_composite_prime(gfile):
    _, code = run(["count", gfile(banana(2)), "--primes", "4"])
    assert code == 2


def test_verify(gfile):
    report, code = run(["verify", gfile(triangle()), "--star", "--primes", "2,3"])
    assert code == 0 and report["results"]["all_passed"]
    report, code = run(["verify", gfile(banana(3)), "--triple", "1", "--edge", "t1", "--primes", "2"])
    assert code == 0 and report["results"]["2"]["triple"] == {"t1": True}
    _, code = run(["verify", gfile(triangle())])
    assert code == 2


def test_fixtures_list_and_show():
    report, code = run(["fixtures", "list"])
    assert code == 0
    names = {r["name"] for r in report["results"]["entries"]}
    assert "banana_3" in names
    report, code = run(["fixtures", "show", "banana_3"])
    assert code == 0 and report["results"]["name"] == "banana_3"
    _, code = run(["fixtures", "show", "nothing"])
    assert code == 2


def test_reproducible_modulo_timing(gfile):
    path = gfile(iifails_graph())
    for argv in (["psi", path, "--method", "all"], ["conditions", path, "--edge", "t5"], ["count", path, "--primes", "3"]):
        a, _ = run(argv)
        b, _ = run(argv)
        assert strip_timing(a) == strip_timing(b)


def test_input_errors(tmp_path):
    _, code = run(["psi", str(tmp_path / "missing.txt")])
    assert code == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("a b\nb c d e\n")
    report, code = run(["psi", str(bad)])
    assert code == 2 and "line 2" in report["error"]
    with pytest.raises(SystemExit) as exc:
        run(["psi"])
    assert exc.value.code == 2


def test_unknown_edge(gfile):
    report, code = run(["conditions", gfile(triangle()), "--edge", "zz"])
    assert code == 2 and "unknown edge" in report["error"]


def test_guard_env(gfile, monkeypatch):
    path = gfile(complete_graph(4))
    monkeypatch.setenv("GRAPHHYPER_GUARDS", "count_guard=100")
    report, code = run(["count", path, "--primes", "7"])
    assert code == 3 and "guard" in report["error"]
    monkeypatch.setenv("GRAPHHYPER_GUARDS", "groebner_max_variables=2")
    report, code = run(["conditions", gfile(ifails_graph(), "k.txt"), "--edge", "t7"])
    assert code == 0 and report["results"]["condition_I"] == "Unknown"
    monkeypatch.setenv("GRAPHHYPER_GUARDS", "bogus=1")
    _, code = run(["psi", path])
    assert code == 2


def test_load_guards():
    g = load_guards({"GRAPHHYPER_GUARDS": "groebner_timeout=2.5, count_guard=none"})
    assert g["groebner_timeout"] == 2.5 and g["count_guard"] is None
    assert load_guards({})["groebner_max_variables"] == 8


def test_text_format_and_main(gfile, capsys):
    path = gfile(triangle())
    assert main(["--format", "text", "psi", path]) == 0
    out = capsys.readouterr().out
    assert "command: psi" in out and "t1 + t2 + t3" in out
    assert main(["psi", path]) == 0
    assert json.loads(capsys.readouterr().out)["exit_code"] == 0
    assert main(["psi", path + ".nope"]) == 2
    assert "error" in capsys.readouterr().err
    report, _ = run(["psi", path])
    assert render(report, "text").startswith("command: psi")
