"""Command-line front end: dispatch, exit codes, JSON reports, result cache."""

import json

import pytest

from abeltiles.cli import main


@pytest.fixture
def run(tmp_path, capsys):
    cache_dir = tmp_path / "cache"

    def _run(*argv):
        code = main(["--cache-dir", str(cache_dir), *argv])
        out = capsys.readouterr()
        return code, out.out, out.err

    _run.cache_dir = cache_dir
    return _run


def test_group_command(run):
    code, out, _ = run("group", "Z4xZ2^3")
    assert code == 0
    assert "order: 32" in out and "exponent: 4" in out


def test_verify_command(run):
    code, out, _ = run(
        "verify", "Z36", "--omega", "{0,4,8,9,13,17}", "--t", "{0,6,12,18,24,30}"
    )
    assert code == 0
    assert "tiling: true" in out
    code, out, _ = run("verify", "Z4", "--omega", "{0,1}", "--t", "{0,1}", "--json")
    assert code == 0
    assert json.loads(out)["tiling"] is False


def test_verify_single_route(run):
    code, out, _ = run(
        "verify", "Z8", "--omega", "{0,1,2,3}", "--t", "{0,4}", "--route", "zeroset", "--json"
    )
    assert code == 0 and json.loads(out)["tiling"] is True


def test_usage_and_input_errors_exit_1(run):
    code, _, err = run("verify", "Z8", "--omega", "{0,1}", "--t", "0,1")
    assert code == 1 and "literal" in err
    code, _, err = run("group", "Zfoo")
    assert code == 1
    with pytest.raises(SystemExit) as exc:
        main(["verify", "Z8"])  # missing required flags
    assert exc.value.code == 1


def test_budget_exhaustion_exit_2(run):
    code, _, err = run("complements", "Z16", "--omega", "{0,1}", "--budget", "3", "--no-cache")
    assert code == 2
    assert "budget" in err


def test_property_command(run):
    code, out, _ = run("property", "Z9", "--check", "upt", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["holds"] is True and payload["property"] == "UPT"


def test_property_unknown_exit_2(run):
    code, out, _ = run("property", "Z16", "--check", "pt", "--budget", "10", "--json")
    assert code == 2
    assert json.loads(out)["holds"] is None


def test_classify_command(run):
    code, out, _ = run("classify", "Z72")
    assert code == 0
    assert "PT: NotPT" in out
    code, out, _ = run("classify", "Z36", "--json")
    payload = json.loads(out)
    assert payload["PT"] == "PT" and payload["factor_periodicity_list"] == "Z_{p^2 q^2}"


def test_complements_and_periods_and_zeroset(run):
    code, out, _ = run("complements", "Z8", "--omega", "{0,1,2,3}")
    assert code == 0 and "{0,4}" in out and "count: 1" in out
    code, out, _ = run("periods", "Z36", "--set", "{0,12,15,18,30,33}", "--json")
    assert json.loads(out)["periods"] == [0, 18]
    code, out, _ = run("zeroset", "Z8", "--set", "{0,1,2,3}", "--json")
    assert json.loads(out)["zeros"] == [2, 4, 6]


def test_spectrum_command(run):
    code, out, _ = run("spectrum", "Z8", "--omega", "{0,1,2,3}", "--json")
    assert json.loads(out)["spectrum"] == [0, 2, 4, 6]
    code, out, _ = run(
        "spectrum", "Z8", "--omega", "{0,1,2,3}", "--method", "tiling", "--t", "{0,4}", "--json"
    )
    assert json.loads(out)["spectrum"] == [0, 2, 4, 6]


def test_construct_command(run):
    code, out, _ = run("construct", "p2q2", "--p", "2", "--q", "3", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["sets"]["omega"] == [0, 4, 8, 9, 13, 17]
    assert all(c["holds"] for c in payload["claims"])


def test_construct_other_names(run):
    code, out, _ = run("construct", "product", "--p", "2", "--q", "3", "--m", "5", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["group"] == "Z36xZ5"
    code, out, _ = run("construct", "p3p2", "--p", "3", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["group"] == "Z27xZ9"
    assert all(c["holds"] for c in payload["claims"])
    code, out, _ = run("construct", "p2p2", "--p", "2", "--json")
    assert code == 0 and json.loads(out)["group"] == "Z4^2"


def test_decompose_command(run):
    code, out, _ = run("decompose", "Z8", "--omega", "{0,1,2,3}", "--json")
    payload = json.loads(out)
    assert payload["chain"] == [[0, 4], [0, 1, 2, 3, 4, 5, 6, 7]]
    assert payload["combiners"] == ["circ", "plus"]


def test_tilings_command_json_lines(run):
    code, out, _ = run("tilings", "Z4")
    lines = [l for l in out.strip().splitlines() if l.startswith("{")]
    records = [json.loads(l) for l in lines]
    assert {"omega": [0, 1], "t": [0, 2]} in records
    assert len(records) == 6
    code, out, _ = run("tilings", "Z8", "--size", "4", "--limit", "2", "--json")
    assert json.loads(out)["count"] == 2


def test_cache_roundtrip_identical_payload(run):
    args = ("property", "Z8", "--check", "pt", "--json")
    code1, out1, _ = run(*args)
    # cache file now holds the record; a second run must reproduce it verbatim
    code2, out2, _ = run(*args)
    assert (code1, out1) == (code2, out2)
    cache_file = run.cache_dir / "results.jsonl"
    assert cache_file.exists()
    assert sum(1 for _ in open(cache_file)) == 1  # single stored record


def test_cache_version_bump_misses(run, monkeypatch):
    args = ("verify", "Z8", "--omega", "{0,1,2,3}", "--t", "{0,4}", "--json")
    run(*args)
    cache_file = run.cache_dir / "results.jsonl"
    before = sum(1 for _ in open(cache_file))
    import abeltiles.cache as cache_mod

    monkeypatch.setattr(cache_mod, "__version__", "0.0.0-test")
    run(*args)
    after = sum(1 for _ in open(cache_file))
    assert after == before + 1  # key changed, so a fresh record was stored


def test_cache_corrupt_line_skipped(run):
    args = ("verify", "Z8", "--omega", "{0,1,2,3}", "--t", "{0,4}", "--json")
    code1, out1, _ = run(*args)
    cache_file = run.cache_dir / "results.jsonl"
    content = open(cache_file).read()
    with open(cache_file, "w") as fh:
        fh.write("{this is not json\n" + content)
    with pytest.warns(UserWarning):
        code2, out2, _ = run(*args)
    assert (code1, out1) == (code2, out2)


def test_no_cache_bypasses_store(run):
    code, _, _ = run("verify", "Z8", "--omega", "{0,1,2,3}", "--t", "{0,4}", "--no-cache")
    assert code == 0
    assert not (run.cache_dir / "results.jsonl").exists()


def test_json_report_roundtrip(run):
    # parse(render(record)) == record for the verdict schema
    code, out, _ = run("property", "Z8", "--check", "hajos", "--json")
    payload = json.loads(out)
    assert json.loads(json.dumps(payload, sort_keys=True)) == payload
    assert set(payload) == {"group", "property", "holds", "certificate", "budget", "citation"}
