import io
import json

import pytest

from kgreform.cli import main, make_parser, report_from_tsv, report_to_tsv, run
from kgreform.datasets import data_path

DIRECTORS = str(data_path("directors.nt"))
SCORSESE = str(data_path("scorsese.nt"))
DIRECTOR = str(data_path("director.rq"))


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    try:
        args = make_parser().parse_args(list(argv))
    except SystemExit as exc:
        return exc.code, out.getvalue(), err.getvalue()
    return run(args, out, err), out.getvalue(), err.getvalue()


def test_json_report_shape():
    code, out, _ = call("--data", SCORSESE, "--query", DIRECTOR, "--output", "json", "--k", "2")
    assert code == 0
    report = json.loads(out)
    o = report["original"]
    assert o["answer_count"] == 1
    assert o["answers"] == [{"s": "<http://example.org/kg/The_Godfather>"}]
    assert isinstance(o["time_ms"], int)
    ids = [c["id"] for c in report["candidates"]]
    assert ids == [f"c{i}" for i in range(1, len(ids) + 1)]
    for c in report["candidates"]:
        assert set(c) == {"id", "level", "round", "rules_applied", "query", "answer_count",
                          "new_answer_count", "time_ms", "sample_answers"}
        assert len(c["sample_answers"]) <= 5
        assert len(c["rules_applied"]) == c["level"]
        assert c["new_answer_count"] <= c["answer_count"]


def test_tsv_carries_the_json_content():
    _, js, _ = call("--data", SCORSESE, "--query", DIRECTOR, "--output", "json")
    _, tsv, _ = call("--data", SCORSESE, "--query", DIRECTOR, "--output", "tsv")

    def strip(rep):
        rep["original"]["time_ms"] = 0
        for c in rep["candidates"]:
            c["time_ms"] = 0
        return rep
    assert strip(report_from_tsv(tsv)) == strip(json.loads(js))
    assert tsv.splitlines()[0].split("\t")[0] == "id"


def test_tsv_escapes_awkward_literals():
    rep = {"original": {"query": "q", "answer_count": 1, "time_ms": 0,
                        "answers": [{"x": '"tab\\there" \\ back'}]},
           "candidates": []}
    assert report_from_tsv(report_to_tsv(rep)) == rep


def test_text_output():
    code, out, _ = call("--data", DIRECTORS, "--query", DIRECTOR, "--mode", "relax")
    assert code == 0
    assert out.startswith("original  1 answers")
    assert "simple_relax[0]: object" in out


def test_options_reach_generation():
    _, out, _ = call("--data", SCORSESE, "--query", DIRECTOR, "--output", "json",
                     "--mode", "reform", "--per-feature", "--max-level", "1", "--max-candidates", "2")
    cands = json.loads(out)["candidates"]
    assert len(cands) == 2
    assert all(c["level"] == 1 for c in cands)


def test_no_closure_flag(tmp_path):
    nt = tmp_path / "g.nt"
    nt.write_text("<http://x/a> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://x/A> .\n"
                  "<http://x/A> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <http://x/B> .\n")
    rq = tmp_path / "q.rq"
    rq.write_text("SELECT ?s WHERE { ?s a <http://x/B> }")
    _, closed, _ = call("--data", str(nt), "--query", str(rq), "--output", "json")
    _, raw, _ = call("--data", str(nt), "--query", str(rq), "--output", "json", "--no-closure")
    assert json.loads(closed)["original"]["answer_count"] == 1
    assert json.loads(raw)["original"]["answer_count"] == 0


def test_usage_errors_exit_2(capsys):
    assert main(["--query", DIRECTOR]) == 2
    assert main(["--data", DIRECTORS, "--query", DIRECTOR, "--mode", "sideways"]) == 2
    assert call("--data", DIRECTORS, "--query", DIRECTOR, "--k", "0")[0] == 2
    assert main(["--help"]) == 0
    capsys.readouterr()


def test_bad_data_is_reported_as_data_error(tmp_path):
    bad = tmp_path / "bad.nt"
    bad.write_text("<http://x/a> <http://x/p> .\n")
    code, _, err = call("--data", str(bad), "--query", DIRECTOR)
    assert code == 1
    assert "data parse error" in err and "line 1" in err


def test_bad_query_is_reported_as_query_error(tmp_path):
    bad = tmp_path / "bad.rq"
    bad.write_text("SELECT ?x WHERE { ?x nope:p ?y }")
    code, _, err = call("--data", DIRECTORS, "--query", str(bad))
    assert code == 1
    assert "query parse error" in err


@pytest.mark.parametrize("flag", ["--data", "--query", "--blacklist"])
def test_missing_files_exit_1(tmp_path, flag):
    argv = {"--data": DIRECTORS, "--query": DIRECTOR}
    argv[flag] = str(tmp_path / "missing")
    flat = [x for kv in argv.items() for x in kv]
    code, _, err = call(*flat)
    assert code == 1
    assert "cannot read" in err


def test_main_writes_to_stdout(capsys):
    assert main(["--data", DIRECTORS, "--query", DIRECTOR, "--output", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["original"]["answer_count"] == 1
