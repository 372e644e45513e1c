"""CLI surface: formats, exit codes, flag plumbing."""

import json

import pytest

from treeharmony.cli import main
from treeharmony.labelling import Certificate, verify_certificate


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ------------------------------------------------------------------ #
# gen / count                                                         #
# ------------------------------------------------------------------ #

def test_gen_nodes_4(capsys):
    code, out, _ = run(capsys, "gen", "--nodes", "4")
    assert code == 0
    assert out.splitlines() == ["0,1,2,1", "0,1,1,1"]


def test_gen_count_only(capsys):
    code, out, _ = run(capsys, "gen", "--nodes", "7", "--count-only")
    assert code == 0 and out.strip() == "11"


def test_gen_single_node(capsys):
    code, out, _ = run(capsys, "gen", "--nodes", "1")
    assert code == 0 and out.strip() == "0"


def test_gen_invalid_n(capsys):
    code, _, err = run(capsys, "gen", "--nodes", "0")
    assert code == 2 and "at least 1" in err


def test_count_matches(capsys):
    code, out, _ = run(capsys, "count", "--nodes", "10")
    assert code == 0
    assert out.strip() == "enumerated=106 formula=106"
    code, out, _ = run(capsys, "count", "--nodes", "3")
    assert code == 0 and out.strip() == "enumerated=1 formula=1"
    code, out, _ = run(capsys, "count", "--nodes", "14")
    assert code == 0 and out.strip() == "enumerated=3159 formula=3159"


# ------------------------------------------------------------------ #
# solve                                                               #
# ------------------------------------------------------------------ #

def test_solve_p3(capsys):
    code, out, _ = run(capsys, "solve", "--levels", "0,1,1", "--seed", "7")
    assert code == 0
    cert = Certificate.from_json_line(out.strip())
    assert cert.n == 3 and cert.seed == 7
    assert sorted(cert.labels).count(0) == 2  # normalized: duplicate is 0
    assert verify_certificate(cert) is None


def test_solve_single_solver_tag(capsys):
    code, out, _ = run(capsys, "solve", "--levels", "0,1,1,1",
                       "--solver", "twostage")
    assert code == 0
    assert Certificate.from_json_line(out.strip()).solver == "twostage"


def test_solve_malformed_levels(capsys):
    code, _, err = run(capsys, "solve", "--levels", "0,2,1")
    assert code == 2 and "index 1" in err


def test_solve_non_canonical_input_is_canonicalized(capsys):
    code, out, _ = run(capsys, "solve", "--levels", "0,1,1,2")
    assert code == 0
    cert = Certificate.from_json_line(out.strip())
    assert cert.levels == (0, 1, 2, 1)


def test_solve_failure_record(capsys):
    code, out, _ = run(capsys, "solve", "--levels", "0,1,2,1",
                       "--twostage-runs", "0", "--backtrack-restarts", "0",
                       "--tabu-max-iters", "0")
    assert code == 1
    rec = json.loads(out.strip())
    assert rec["failed"] and len(rec["stats"]["attempts"]) == 3


def test_solve_unknown_pipeline_tag(capsys):
    code, _, err = run(capsys, "solve", "--levels", "0,1,1",
                       "--pipeline", "twostage,magic")
    assert code == 2 and "magic" in err


def test_config_file_bulk_settings(capsys, tmp_path):
    cfgfile = tmp_path / "solver.cfg"
    cfgfile.write_text(
        "twostage_runs = 0\n"
        "backtrack_restarts = 0   # comment\n"
        "tabu_max_iters = 0\n"
        "pipeline = twostage,backtrack,tabu\n")
    code, out, _ = run(capsys, "solve", "--levels", "0,1,2,1",
                       "--config", str(cfgfile))
    assert code == 1  # all limits zeroed via the file
    # flags override the file
    code, out, _ = run(capsys, "solve", "--levels", "0,1,2,1",
                       "--config", str(cfgfile), "--twostage-runs", "50")
    assert code == 0


# ------------------------------------------------------------------ #
# sweep + verify                                                      #
# ------------------------------------------------------------------ #

def test_sweep_then_verify(capsys, tmp_path):
    out_file = tmp_path / "r.jsonl"
    ck = tmp_path / "c.txt"
    code, _, err = run(capsys, "sweep", "--min", "2", "--max", "7",
                       "--seed", "1", "--jobs", "2",
                       "--out", str(out_file), "--checkpoint", str(ck))
    assert code == 0
    assert "n=7 total=11 solved=11" in err
    assert len(out_file.read_text().splitlines()) == 1 + 1 + 2 + 3 + 6 + 11
    assert (tmp_path / "r.jsonl.report.jsonl").exists()

    code, _, err = run(capsys, "verify", str(out_file))
    assert code == 0 and "24 certificates ok" in err


def test_sweep_all_limits_zero_exits_1(capsys, tmp_path):
    code, _, err = run(capsys, "sweep", "--min", "2", "--max", "4",
                       "--out", str(tmp_path / "r.jsonl"),
                       "--checkpoint", str(tmp_path / "c.txt"),
                       "--twostage-runs", "0", "--backtrack-restarts", "0",
                       "--tabu-max-iters", "0")
    assert code == 1
    assert err.count("candidate counterexample:") == 4


def test_sweep_checkpoint_mismatch_exits_2(capsys, tmp_path):
    args = ["sweep", "--min", "2", "--max", "4",
            "--out", str(tmp_path / "r.jsonl"),
            "--checkpoint", str(tmp_path / "c.txt")]
    assert run(capsys, *args)[0] == 0
    code, _, err = run(capsys, *args, "--seed", "9")
    assert code == 2 and "checkpoint" in err
    assert run(capsys, *args, "--seed", "9", "--fresh")[0] == 0


def test_verify_detects_mutation(capsys, tmp_path):
    out_file = tmp_path / "r.jsonl"
    run(capsys, "sweep", "--min", "2", "--max", "6",
        "--out", str(out_file), "--checkpoint", str(tmp_path / "c.txt"))
    lines = out_file.read_text().splitlines()
    rec = json.loads(lines[-1])
    # overwrite a value that occurs once: the multiset is no longer onto
    labels = rec["labels"]
    i = next(i for i, v in enumerate(labels) if labels.count(v) == 1)
    labels[i] = labels[i - 1]
    lines[-1] = json.dumps(rec)
    bad_file = tmp_path / "bad.jsonl"
    bad_file.write_text("\n".join(lines) + "\n")
    code, _, err = run(capsys, "verify", str(bad_file))
    assert code == 1
    assert "duplicate edge label" in err or "label multiset not onto" in err


def test_verify_empty_file_warns(capsys, tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    code, _, err = run(capsys, "verify", str(empty))
    assert code == 0 and "warning" in err


def test_verify_malformed_line_exits_2(capsys, tmp_path):
    f = tmp_path / "m.jsonl"
    f.write_text('{"n":3,"levels":[0,1,1],"labels":[0,0,1],"solver":"tabu","seed":1}\nnot json\n')
    code, _, err = run(capsys, "verify", str(f))
    assert code == 2 and "line 2" in err


def test_verify_missing_file_exits_2(capsys, tmp_path):
    code, _, err = run(capsys, "verify", str(tmp_path / "nope.jsonl"))
    assert code == 2


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["gen"])  # missing --nodes
    assert err.value.code == 2
