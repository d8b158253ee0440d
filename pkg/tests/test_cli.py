import csv
import json

import pytest

from hyperwalk.cli import main
from hyperwalk.errors import EXIT_CONFIG_ERROR, EXIT_INTERNAL_ERROR, EXIT_OK, EXIT_RESOURCE_ERROR
from hyperwalk.output import FigureTable, format_value


def read_csv(path):
    lines = path.read_text(encoding="utf-8").split("\n")
    metadata = {}
    for line in lines:
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            metadata[key] = value
    body = [line for line in lines if line and not line.startswith("#")]
    rows = list(csv.DictReader(body))
    return metadata, body, rows


def test_pi_x_for_three_dimensions(tmp_path):
    out = tmp_path / "pi.csv"
    assert main(["--figure", "pi_x", "--n", "3", "--out", str(out), "--quiet"]) == EXIT_OK
    metadata, body, rows = read_csv(out)
    assert body[0] == "x,hamming_weight,pi,uniform"
    assert len(rows) == 8
    pi = [float(row["pi"]) for row in rows]
    assert pi[0] == 0.171875
    assert pi == pi[::-1]
    assert sum(pi) == pytest.approx(1.0, abs=1e-8)
    assert metadata["figure"] == "pi_x"
    assert metadata["seed"] == "12345"
    assert "version" in metadata and "wall_time_s" in metadata
    assert b"\r\n" not in out.read_bytes()


def test_hamming_profile_for_twenty_five_dimensions(tmp_path):
    out = tmp_path / "profile.csv"
    assert main(["--mode", "closed_form", "--n", "25", "--out", str(out), "--quiet"]) == EXIT_OK
    _, _, rows = read_csv(out)
    profile = [float(row["profile"]) for row in rows]
    assert len(profile) == 26
    assert profile[0] > profile[12] and profile[-1] > profile[12]
    assert sum(profile) == pytest.approx(1.0, abs=1e-8)


def test_json_output_uses_null_for_missing_times(tmp_path):
    out = tmp_path / "mix.json"
    code = main([
        "--figure", "mixing_vs_n", "--n-values", "4,5", "--epsilon", "0.2", "--epsilon", "0.001",
        "--t-max", "200", "--format", "json", "--out", str(out), "--quiet", "--jobs", "1",
    ])
    assert code == EXIT_OK
    document = json.loads(out.read_text(encoding="utf-8"))
    assert document["columns"] == ["n", "epsilon", "mixing_time", "t_max"]
    assert len(document["rows"]) == 4
    by_eps = {(row["n"], row["epsilon"]): row["mixing_time"] for row in document["rows"]}
    assert isinstance(by_eps[(4, 0.2)], int)
    assert by_eps[(4, 0.001)] is None


def test_identical_configs_give_identical_bodies(tmp_path):
    config = tmp_path / "deco.env"
    config.write_text("figure=mixing_vs_p\nn=3\nt_max=60\ntrials=30\np_values=0.1,0.5\nepsilons=0.3\n")
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["--config", str(config), "--out", str(first), "--quiet"]) == EXIT_OK
    assert main(["--config", str(config), "--out", str(second), "--quiet", "--jobs", "2"]) == EXIT_OK
    assert read_csv(first)[1] == read_csv(second)[1]
    assert len(read_csv(first)[2]) == 2


def test_decoherent_curve_columns(tmp_path):
    out = tmp_path / "deco.csv"
    code = main(["--figure", "tvd_decoherent", "--n", "3", "--p", "0.2", "--t-max", "30",
                 "--trials", "50", "--out", str(out), "--quiet"])
    assert code == EXIT_OK
    _, body, rows = read_csv(out)
    assert body[0] == "p,t,tvd_uniform,tvd_uniform_stderr,tvd_stationary"
    assert len(rows) == 31
    assert float(rows[0]["tvd_uniform"]) == pytest.approx(2 - 2 / 8)


def test_config_error_exit_code_and_no_output(tmp_path, capsys):
    out = tmp_path / "never.csv"
    assert main(["--p", "1.5", "--out", str(out)]) == EXIT_CONFIG_ERROR
    assert not out.exists()
    assert "p:" in capsys.readouterr().err


def test_resource_error_exit_code(tmp_path):
    out = tmp_path / "never.csv"
    assert main(["--mode", "coherent", "--n", "20", "--out", str(out), "--quiet"]) == EXIT_RESOURCE_ERROR
    assert not out.exists()


def test_missing_config_file(tmp_path):
    assert main(["--config", str(tmp_path / "missing.env"), "--quiet"]) == EXIT_CONFIG_ERROR


def test_bad_log_level(tmp_path):
    assert main(["--log-level", "chatty", "--quiet"]) == EXIT_CONFIG_ERROR


def test_internal_error_leaves_no_partial_file(tmp_path, monkeypatch):
    out = tmp_path / "pi.csv"

    def explode(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr("hyperwalk.output.format_value", explode)
    assert main(["--figure", "pi_x", "--n", "3", "--out", str(out), "--quiet"]) == EXIT_INTERNAL_ERROR
    assert list(tmp_path.iterdir()) == []


def test_cell_formatting():
    assert format_value(None) == ""
    assert format_value(float("nan")) == ""
    assert format_value(0.1 + 0.2) == "0.30000000000000004"
    assert format_value(7) == "7"


def test_table_rows_need_every_column():
    table = FigureTable("demo", ["a", "b"])
    table.add(a=1, b=2)
    with pytest.raises(KeyError):
        table.add(a=1)
    assert table.column("b") == [2]


def test_reference_flag_selects_instant_mixing_rows(tmp_path):
    out = tmp_path / "instant.csv"
    code = main(["--figure", "instant_mixing_vs_n", "--n-values", "4,5", "--epsilon", "0.3",
                 "--reference", "uniform", "--t-max", "100", "--out", str(out), "--quiet"])
    assert code == EXIT_OK
    _, _, rows = read_csv(out)
    assert len(rows) == 2
    assert {row["reference"] for row in rows} == {"uniform"}


def test_decoherent_n_sweep_over_two_rates(tmp_path):
    out = tmp_path / "deco_n.csv"
    code = main(["--figure", "mixing_vs_n_deco", "--n-values", "3,4", "--p-values", "0.1,0.3",
                 "--t-max", "40", "--trials", "10", "--out", str(out), "--quiet"])
    assert code == EXIT_OK
    _, _, rows = read_csv(out)
    assert [(row["n"], row["p"]) for row in rows] == [("3", "0.1"), ("3", "0.3"), ("4", "0.1"), ("4", "0.3")]


def test_both_formats_in_one_run(tmp_path):
    out = tmp_path / "pi.csv"
    assert main(["--figure", "pi_x", "--n", "3", "--format", "both", "--out", str(out), "--quiet"]) == EXIT_OK
    _, _, rows = read_csv(out)
    document = json.loads((tmp_path / "pi.json").read_text(encoding="utf-8"))
    assert len(rows) == len(document["rows"]) == 8
    assert document["metadata"]["figure"] == "pi_x"
