"""Configuration parsing, exit codes, and report artifacts."""

import json

import pytest

from finslerkelvin.cli import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_PASS,
    EXIT_VERIFICATION,
    RunConfig,
    main,
    parse_config,
    serialize_config,
)

FAST = ["--count", "25"]


# ---------------------------------------------------------------------------
# config parsing


def test_parse_config_one_line_pairs():
    cfg = parse_config("norm=riemannian:[[4,0],[0,1]] suite=identities")
    assert cfg.norm == "riemannian:[[4,0],[0,1]]"
    assert cfg.suite == "identities"
    assert cfg.dim == 2


def test_parse_config_multiline_with_comments():
    cfg = parse_config(
        """
        # verification run
        norm = euclidean:3
        suite = kelvin
        annulus = 0.5,2.0
        count = 50
        seed = 7
        format = table
        threads = 2
        """
    )
    assert cfg.suite == "kelvin"
    assert cfg.count == 50
    assert cfg.seed == 7
    assert cfg.format == "table"
    assert cfg.threads == 2


def test_parse_config_rejects_non_spd_matrix():
    with pytest.raises(ValueError, match="leading minor 2"):
        parse_config("norm=riemannian:[[1,2],[2,1]]")


def test_parse_config_quartic_forces_dim_2():
    cfg = parse_config("norm=quartic suite=counterexample")
    assert cfg.dim == 2


def test_parse_config_rejects_unknown_key():
    with pytest.raises(ValueError, match="unknown key"):
        parse_config("norm=euclidean:2\ncolor=red")


def test_parse_config_rejects_dim_conflict():
    with pytest.raises(ValueError, match="conflicts"):
        parse_config("norm=euclidean:3\ndim=2")


def test_parse_config_rejects_bad_suite_and_format():
    with pytest.raises(ValueError, match="unknown suite"):
        parse_config("suite=everything")
    with pytest.raises(ValueError, match="unknown format"):
        parse_config("format=xml")


def test_parse_config_rejects_theorem_suite_on_quartic():
    with pytest.raises(ValueError, match="riemannian or euclidean"):
        parse_config("norm=quartic suite=semilinear")


def test_config_roundtrip():
    cfg = RunConfig(norm="riemannian:[[4,0],[0,1]]", suite="identities",
                    annulus=(0.25, 3.0), count=42, seed=9, out="r.json",
                    format="csv", threads=3)
    assert parse_config(serialize_config(cfg)) == cfg


def test_pretty_table_synonym():
    cfg = parse_config("format=pretty-table")
    assert cfg.format == "table"


def test_theorem_suite_aliases():
    assert parse_config("suite=theorem-semilinear").suite == "semilinear"
    assert parse_config("suite=theorem-nlaplace").suite == "nlaplace"


# ---------------------------------------------------------------------------
# exit codes and artifacts


def test_all_euclidean3_passes(tmp_path):
    out = tmp_path / "report.json"
    code = main(["all", "--norm", "euclidean:3", "--out", str(out)] + FAST)
    assert code == EXIT_PASS
    doc = json.loads(out.read_text())
    assert doc["schema"] == "report-v1"
    assert doc["passed"] is True
    assert [s["suite"] for s in doc["suites"]] == [
        "identities", "kelvin", "counterexample", "semilinear", "nlaplace",
    ]
    assert doc["config"]["norm"] == "euclidean:3"
    assert doc["version"].startswith("finslerkelvin ")


def test_counterexample_on_riemannian_fails_by_design(tmp_path, capsys):
    code = main(["counterexample", "--norm", "riemannian:[[4,0],[0,1]]",
                 "--out", str(tmp_path / "r.json")])
    assert code == EXIT_VERIFICATION
    assert "spread below threshold: norm is Riemannian" in capsys.readouterr().out


def test_quartic_all_skips_theorem_suites(tmp_path, capsys):
    out = tmp_path / "q.json"
    code = main(["all", "--norm", "quartic", "--out", str(out)] + FAST)
    assert code == EXIT_PASS
    printed = capsys.readouterr().out
    assert "[SKIP] semilinear" in printed
    assert "[SKIP] nlaplace" in printed


def test_bad_config_exit_code():
    assert main(["identities", "--norm", "riemannian:[[1,2],[2,1]]"]) == EXIT_CONFIG
    assert main(["identities", "--norm", "nonsense:1"]) == EXIT_CONFIG
    assert main(["nlaplace", "--norm", "euclidean:2"]) == EXIT_CONFIG


def test_io_error_exit_code(tmp_path):
    code = main(["identities", "--norm", "euclidean:2",
                 "--out", str(tmp_path / "missing" / "deep" / "r.json")] + FAST)
    assert code == EXIT_IO
    assert main(["--config", str(tmp_path / "no-such-config")]) == EXIT_IO


def test_flags_override_config_file(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("norm = euclidean:3\nsuite = identities\nseed = 3\n")
    out = tmp_path / "r.json"
    code = main(["--config", str(cfg_file), "--seed", "11",
                 "--out", str(out), "kelvin"] + FAST)
    assert code == EXIT_PASS
    doc = json.loads(out.read_text())
    assert doc["config"]["seed"] == 11
    assert doc["config"]["suite"] == "kelvin"


def test_csv_and_table_formats(tmp_path):
    out = tmp_path / "r.csv"
    code = main(["identities", "--norm", "euclidean:2", "--format", "csv",
                 "--out", str(out)] + FAST)
    assert code == EXIT_PASS
    header = out.read_text().splitlines()[0]
    assert header == "x0,x1,lhs,rhs,abs_residual,rel_residual,flag"

    out2 = tmp_path / "r.txt"
    code = main(["identities", "--norm", "euclidean:2", "--format", "table",
                 "--out", str(out2)] + FAST)
    assert code == EXIT_PASS
    assert "PASS" in out2.read_text()


def test_json_reports_byte_identical_across_threads(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    base = ["kelvin", "--norm", "riemannian:[[4,0],[0,1]]", "--seed", "5"] + FAST
    assert main(base + ["--out", str(a), "--threads", "1"]) == EXIT_PASS
    assert main(base + ["--out", str(b), "--threads", "4"]) == EXIT_PASS
    assert a.read_bytes() == b.read_bytes()


def test_stdout_report_when_no_out(capsys):
    code = main(["identities", "--norm", "euclidean:2", "--format", "table"]
                + FAST)
    assert code == EXIT_PASS
    assert "identities" in capsys.readouterr().out


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert "finslerkelvin" in capsys.readouterr().out
