from __future__ import annotations

import pytest

from digraph_census.cli import main
from tests.test_cnf import GOLDEN_PQ, golden_digraph


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_search_majority_two_vertices(capsys):
    code, out, _ = run_cli(capsys, "search", "--n", "2", "--kind", "majority",
                           "--digraph", "0110")
    assert code == 0
    assert out == "found\ntable: 00010111\n"


def test_search_not_found(capsys):
    code, out, _ = run_cli(capsys, "search", "--kind", "wnu2", "--digraph", "0110")
    assert code == 0
    assert out == "not found\n"


def test_search_undecided_exit_code(capsys):
    code, out, _ = run_cli(capsys, "search", "--n", "4", "--kind", "wnu3",
                           "--index", "326", "--no-pruning", "--budget", "1000")
    assert code == 5
    assert out.startswith("undecided")


def test_search_pq_prints_both_terms(capsys):
    code, out, _ = run_cli(capsys, "search", "--n", "4", "--kind", "pq",
                           "--index", "856")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("q: ")
    assert lines[1] == "found"
    assert lines[2].startswith("p: ")


def test_generate_to_file(tmp_path, capsys):
    out_file = tmp_path / "all.txt"
    code, _, err = run_cli(capsys, "generate", "--n", "2", "--out", str(out_file))
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert len(lines) == 16
    assert lines[0] == "0000"
    assert lines[-1] == "1111"


def test_dedupe_both_methods(capsys, tmp_path):
    reps = tmp_path / "reps.txt"
    code, out, _ = run_cli(capsys, "dedupe", "--n", "3", "--method", "both",
                           "--out", str(reps), "--bitmap", str(tmp_path / "f.bits"))
    assert code == 0
    assert "sieve classes=104 bruteforce classes=104 identical=True" in out
    assert len(reps.read_text().splitlines()) == 104


def test_subalgebras_output(capsys):
    code, out, _ = run_cli(capsys, "subalgebras", "--n", "4", "--index", "126")
    assert code == 0
    assert out == "126 0000000001111110 {1,2} {2,3} {0,1,2} {1,2,3}\n"


def test_pipeline_two_vertices(capsys):
    code, out, _ = run_cli(capsys, "pipeline", "--n", "2")
    assert code == 0
    assert out.splitlines()[0] == \
        "n=2 classes=10 majority=10 wnu2=0 wnu3_minimal=0 pq=0 undecided=0"


def test_pipeline_env_out_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("DIGRAPH_CENSUS_OUT", str(tmp_path / "envout"))
    code, _, _ = run_cli(capsys, "pipeline", "--n", "2")
    assert code == 0
    assert (tmp_path / "envout" / "report.txt").exists()


def test_emit_cnf_stdout_matches_golden(capsys):
    g = golden_digraph()
    code, out, _ = run_cli(capsys, "emit-cnf", "--kind", "pq",
                           "--digraph", g.to_string())
    assert code == 0
    assert out == GOLDEN_PQ


def test_emit_cnf_to_file(tmp_path, capsys):
    out_file = tmp_path / "doc.p"
    code, _, _ = run_cli(capsys, "emit-cnf", "--kind", "pq",
                         "--digraph", golden_digraph().to_string(),
                         "--out", str(out_file))
    assert code == 0
    assert out_file.read_bytes() == GOLDEN_PQ.encode("ascii")


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["search", "--bogus"])
    assert info.value.code == 2


def test_malformed_digraph_exits_3(capsys):
    code, _, err = run_cli(capsys, "search", "--kind", "majority", "--digraph", "01x0")
    assert code == 3
    assert "error" in err


def test_capacity_error_exits_4(capsys):
    code, _, err = run_cli(capsys, "search", "--n", "4", "--kind", "majority",
                           "--index", "0", "--oracle")
    assert code == 4
    assert "capacity" in err


def test_missing_digraph_exits_3(capsys):
    code, _, err = run_cli(capsys, "search", "--kind", "majority")
    assert code == 3
