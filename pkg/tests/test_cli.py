import json
from pathlib import Path

import pytest

try:
    import tomllib
except ImportError:
    import tomli as tomllib

from charp_orbits.cli import main, parse_problem, run_command
from charp_orbits.errors import ParseError, ValidationError, ZeroDenominator
from charp_orbits.ffield import parse_scalar

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
MANIFEST = tomllib.loads((CORPUS / "manifest.toml").read_text())["cases"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines()]


def write(tmp_path, text, name="problem.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


@pytest.mark.parametrize("name", sorted(MANIFEST))
def test_corpus_exit_codes(name, capsys):
    case = MANIFEST[name]
    code, records = run(capsys, case["command"], "--input", str(CORPUS / name))
    assert code == case["exit"]
    assert records[-1]["record"] in ("summary", "error")


def test_corpus_has_thirty_files():
    assert len(MANIFEST) == 30
    assert {p.name for p in CORPUS.glob("[0-9]*.toml")} == set(MANIFEST)


def test_polya_worked_example(capsys):
    code, records = run(capsys, "polya", "--input", str(CORPUS / "04_polya_worked.toml"))
    result = records[-1]["result"]
    assert code == 0 and (result["M"], result["N"]) == (3, 0)


def test_member_of_constant_in_free_group(tmp_path, capsys):
    path = write(tmp_path, '[field]\np = 3\n[group]\ngens = ["t"]\n[query]\nelement = "2"\n')
    code, records = run(capsys, "member", "--input", path)
    assert code == 2 and records[-1]["result"]["verdict"] == "NonMember"


def test_digits_example(tmp_path, capsys):
    path = write(tmp_path, "[field]\np = 3\n[query]\np = 3\nr = 1\n")
    code, records = run(capsys, "digits", "--input", path, "--horizon", "100")
    assert code == 0 and records[-1]["result"]["solutions"] == [1, 3, 9, 27, 81]


def test_parse_error_location(capsys):
    code, records = run(capsys, "member", "--input", str(CORPUS / "29_parse_error.toml"))
    err = records[-1]
    assert code == 1
    assert (err["error"], err["line"], err["column"]) == ("ParseError", 4, 12)
    assert "INT" in err["expected"]


def test_parse_problem_examples():
    pf = parse_problem('[field]\np = 3\n[group]\ngens = ["t", "t+1"]\n')
    assert len(pf.group.gens) == 2
    with pytest.raises((ValidationError, ZeroDenominator)):
        parse_problem('[field]\np = 3\n[series]\nnum = "1"\nden = "0"\n')
    with pytest.raises(ParseError) as info:
        parse_problem('[field]\np = 3\n[group]\ngens = ["t+*1"]\n')
    assert (info.value.line, info.value.column) == (4, 12)


def test_malformed_toml_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_problem("[field\np = 3\n")


def test_missing_block_is_usage_error(tmp_path, capsys):
    path = write(tmp_path, "[field]\np = 3\n")
    code, records = run(capsys, "polya", "--input", path)
    assert code == 1 and records[-1]["record"] == "error"


def test_unknown_command_and_missing_file(capsys, tmp_path):
    assert main(["nonsense", "--input", "x"]) == 1
    assert main(["member", "--input", str(tmp_path / "absent.toml")]) == 1
    capsys.readouterr()


def test_flags_override_inline_params(tmp_path, capsys):
    path = write(tmp_path, "[field]\np = 3\n[query]\np = 3\nr = 1\n[params]\nH = 10\n")
    _, records = run(capsys, "digits", "--input", path, "--horizon", "30")
    assert records[-1]["inputs"]["H"] == 30


def test_out_file_and_timing(tmp_path, capsys):
    out = tmp_path / "report.jsonl"
    code = main(["digits", "--input", str(CORPUS / "23_digits.toml"), "--out", str(out), "--timing"])
    assert code == 0 and capsys.readouterr().out == ""
    summary = json.loads(out.read_text().splitlines()[-1])
    assert "elapsed_seconds" in summary


def test_thread_variable_is_validated(monkeypatch, capsys):
    monkeypatch.setenv("CHARP_ORBITS_THREADS", "many")
    assert main(["digits", "--input", str(CORPUS / "23_digits.toml")]) == 1
    capsys.readouterr()


def test_same_seed_gives_identical_bytes(capsys):
    for name in ("04_polya_worked.toml", "14_cor13.toml", "27_places.toml"):
        cmd = MANIFEST[name]["command"]
        main([cmd, "--input", str(CORPUS / name), "--seed", "7"])
        first = capsys.readouterr().out
        main([cmd, "--input", str(CORPUS / name), "--seed", "7"])
        assert capsys.readouterr().out == first


def test_canonical_echo_reparses():
    pf = parse_problem((CORPUS / "01_member_yes.toml").read_text())
    report = run_command("member", pf)
    for text in report.inputs["group"] + report.inputs["elements"]:
        assert str(parse_scalar(pf.field, text)) == text
