import json
import subprocess
import sys

import pytest

from assocdiag.cli import UsageError, execute, main, parse_command
from assocdiag.combinatorics import parse_partition, parse_permutation
from assocdiag.errors import NotationError


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_scp():
    cmd = parse_command(["scp", "21354"])
    assert cmd.verb == "scp"
    assert cmd.options["sigma"] == parse_permutation("2|1|3|5|4")


def test_parse_mp2cp():
    cmd = parse_command(["mp2cp", "--n", "5", "--f", "(ooo)oo", "--g", "o(oo(oo))"])
    assert cmd.verb == "mp2cp"


@pytest.mark.parametrize("argv", [
    ["delta", "--polytope", "Q", "--n", "3"],
    ["frobnicate"],
    ["delta", "--polytope", "P"],
    ["delta", "--polytope", "P", "--n", "3", "--formula", "magical"],
    ["delta", "--polytope", "K", "--n", "9"],
    ["verify", "agreement", "--n", "3", "--max-n", "4"],
    ["mp2cp", "--n", "9", "--f", "(ooo)oo", "--g", "o(oo(oo))"],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(UsageError):
        parse_command(argv)
    code, out, err = run(argv, capsys)
    assert code == 2 and out == "" and "error" in err


def test_bad_notation_names_token(capsys):
    with pytest.raises(NotationError):
        parse_command(["tonks", "12|4"])
    code, _, err = run(["scp", "2135"], capsys)
    assert code == 2 and "2, 1, 3, 5" in err
    code, _, err = run(["mp2cp", "--f", "(o(oo)", "--g", "o"], capsys)
    assert code == 2 and "(o(oo)" in err


def test_delta_P3_text(capsys):
    code, out, _ = run(["delta", "--polytope", "P", "--n", "3"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 8
    assert lines[0] == "123 × 3|2|1"
    assert lines[-1] == "1|2|3 × 123"
    assert out.endswith("\n")


def test_delta_json(capsys):
    code, out, _ = run(["delta", "--polytope", "K", "--n", "3", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["schema_version"] == 1
    assert data["count"] == 6
    assert out.endswith("}\n")


def test_delta_formulas_print_the_same(capsys):
    _, su, _ = run(["delta", "--polytope", "K", "--n", "4"], capsys)
    _, mag, _ = run(["delta", "--polytope", "K", "--n", "4", "--formula", "magical"], capsys)
    assert su == mag


def test_delta_face(capsys):
    code, out, _ = run(["delta", "--polytope", "P", "--face", "12|3"], capsys)
    assert code == 0
    assert set(out.splitlines()) == {"12|3 × 2|1|3", "1|2|3 × 12|3"}
    code, out, _ = run(["delta", "--polytope", "K", "--face", "(ooo)o"], capsys)
    assert len(out.splitlines()) == 2


def test_step_matrix(capsys):
    code, out, _ = run(["step-matrix", "21354"], capsys)
    assert (code, out) == (0, "0 0 4\n1 3 5\n2 0 0\n")


def test_scp_tonks_tamari(capsys):
    assert run(["scp", "2|1|3|5|4"], capsys)[1] == "12|3|45 × 2|135|4\n"
    assert run(["tonks", "12|34"], capsys)[1] == "((ooo)oo)\n"
    assert run(["tamari-leq", "--f", "(oo)o", "--g", "o(oo)"], capsys)[1] == "true\n"
    assert run(["tamari-leq", "--f", "o(oo)", "--g", "(oo)o"], capsys)[1] == "false\n"


def test_mp2cp(capsys):
    argv = ["mp2cp", "--n", "4", "--f", "(ooo)oo", "--g", "o(oo(oo))"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    assert out == "12|34 × 4|23|1\nσ = 4|2|1|3\nM = ({4})\nN = ({3})\n"
    code, out, _ = run(argv + ["--format", "json", "--method", "chain"], capsys)
    data = json.loads(out)
    assert data["M"] == [[4]] and data["N"] == [[3], []]
    code, _, err = run(["mp2cp", "--f", "o(o(oo))", "--g", "oooo"], capsys)
    assert code == 2 and "Tamari" in err


def test_faces(capsys):
    code, out, _ = run(["faces", "--polytope", "K", "--n", "4", "--dim", "2"], capsys)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 9
    assert "((oo)ooo)  1|234 13|24 134|2 14|23" in lines
    code, out, _ = run(["faces", "--polytope", "P", "--n", "3", "--format", "json"], capsys)
    assert json.loads(out)["count"] == 13
    code, _, _ = run(["faces", "--polytope", "P", "--n", "3", "--dim", "5"], capsys)
    assert code == 2


@pytest.mark.parametrize("check,extra", [
    ("agreement", ["--max-n", "5"]),
    ("tiling", ["--max-n", "4"]),
    ("chain-map", ["--max-n", "3"]),
    ("chain-map", ["--n", "4", "--polytope", "K"]),
    ("cubical", []),
    ("maximal-pairs", ["--max-n", "3"]),
])
def test_verify(check, extra, capsys):
    code, out, _ = run(["verify", check, *extra], capsys)
    assert code == 0
    assert out.strip() and all(line.endswith("ok") for line in out.splitlines())


def test_verify_agreement_json_has_no_timing_by_default(capsys):
    _, out, _ = run(["verify", "agreement", "--n", "4", "--format", "json"], capsys)
    data = json.loads(out)
    assert data["pass"] and "runtime_ms" not in data["results"][0]
    _, out, _ = run(["verify", "agreement", "--n", "4", "--format", "json", "--timings"], capsys)
    assert "runtime_ms" in json.loads(out)["results"][0]


def test_verification_failure_exits_1(monkeypatch, capsys):
    import assocdiag.cli as cli
    from assocdiag.cube import Report

    monkeypatch.setattr(cli, "verify_cubical", lambda n: Report(n, "cubical", False, ["boom"]))
    code, out, _ = run(["verify", "cubical", "--n", "3"], capsys)
    assert code == 1 and "FAIL" in out and "boom" in out


def test_jobs_and_cache_do_not_change_output(tmp_path, capsys, monkeypatch):
    base = ["delta", "--polytope", "K", "--n", "5", "--format", "json"]
    _, plain, _ = run(base, capsys)
    _, parallel, _ = run(base + ["--jobs", "2"], capsys)
    _, miss, _ = run(base + ["--cache-dir", str(tmp_path)], capsys)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    _, hit, _ = run(base + ["--cache-dir", str(tmp_path)], capsys)
    assert plain == parallel == miss == hit
    entry = json.loads(files[0].read_text())
    assert entry["key"] == ["delta", "K-su", 5, 1]

    # a corrupted entry is ignored and rewritten
    entry["payload"] = entry["payload"][:3]
    files[0].write_text(json.dumps(entry) + "\n")
    monkeypatch.setenv("ASSOCDIAG_CACHE_DIR", str(tmp_path))
    _, again, _ = run(base + ["--cache-dir", str(tmp_path)], capsys)
    assert again == plain
    assert len(json.loads(files[0].read_text())["payload"]) == len(json.loads(plain)["components"])


def test_cache_dir_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ASSOCDIAG_CACHE_DIR", str(tmp_path))
    run(["delta", "--polytope", "P", "--n", "4"], capsys)
    assert [p.name for p in tmp_path.iterdir()] == ["delta-P-n4-v1.json"]


def test_execute_returns_text_and_code():
    out, code = execute(parse_command(["tonks", "1|2"]))
    assert (out, code) == ("((oo)o)\n", 0)


def test_round_trip_through_output(capsys):
    _, out, _ = run(["delta", "--polytope", "P", "--n", "4"], capsys)
    for line in out.splitlines():
        a, b = line.split(" × ")
        assert str(parse_partition(a)) == a and str(parse_partition(b)) == b


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "assocdiag", "scp", "4231"], capture_output=True, text=True
    )
    assert res.returncode == 0
    assert res.stdout == "24|13 × 4|23|1\n"
