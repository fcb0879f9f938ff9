import json
import subprocess
import sys

import pytest

from collabmetrics.cli import main

from test_metrics import HAND_AUTHORS_CSV, HAND_COLLABS_CSV

TINY = ["--n-collabs", "300", "--naut-max", "200"]


def run(*argv):
    return main([str(a) for a in argv])


def _single_author_corpus(path, n=12):
    lines = []
    for i in range(n):
        refs = [f"x{i}"] if i == 0 else [f"p{i - 1:03d}", f"x{i}"]
        lines.append(json.dumps({"id": f"p{i:03d}", "authors": [f"a{i % 4}"],
                                 "collab": f"C{i % 4}", "cats": ["hep-ex"], "year": 2000,
                                 "refs": refs}))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _csv_files(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.glob("*.csv"))}


# -- indices --------------------------------------------------------------------

def test_indices_on_hand_fixture(hand_corpus_file, tmp_path):
    out = tmp_path / "out"
    assert run("indices", hand_corpus_file, "--out", out) == 0
    assert (out / "profiles_authors.csv").read_text() == HAND_AUTHORS_CSV
    assert (out / "profiles_collaborations.csv").read_text() == HAND_COLLABS_CSV


def test_indices_alpha_preset_and_category(hand_corpus_file, tmp_path):
    out = tmp_path / "out"
    assert run("indices", hand_corpus_file, "--out", out, "--alpha", "papers-small",
               "--category", "experiment") == 0
    rows = (out / "profiles_authors.csv").read_text().splitlines()
    assert rows[1].startswith("a,1,4,")
    assert rows[1].endswith(",0.5")


# -- ingest ---------------------------------------------------------------------

def test_ingest_writes_rejections(tmp_path, capsys):
    src = tmp_path / "c.jsonl"
    src.write_text('{"id": "p", "authors": ["a"], "cats": [], "year": 1, "refs": []}\n'
                   "garbage\n", encoding="utf-8")
    assert run("ingest", src, "--out", tmp_path / "o") == 0
    report = (tmp_path / "o" / "rejections.tsv").read_text()
    assert report.startswith("2\tmalformed json")
    assert "1 papers accepted, 1 lines rejected" in capsys.readouterr().out


def test_duplicate_ids_exit_1(tmp_path, capsys):
    src = tmp_path / "c.jsonl"
    line = '{"id": "p", "authors": ["a"], "cats": [], "year": 1, "refs": []}\n'
    src.write_text(line * 2, encoding="utf-8")
    assert run("ingest", src, "--out", tmp_path / "o") == 1
    assert "lines 1 and 2" in capsys.readouterr().err


# -- scaling --------------------------------------------------------------------

def test_scaling_single_size_is_insufficient(tmp_path, capsys):
    src = _single_author_corpus(tmp_path / "c.jsonl")
    assert run("scaling", src, "--out", tmp_path / "o", "--min-bin-count", "1") == 1
    assert "insufficient data" in capsys.readouterr().err
    summary = (tmp_path / "o" / "fits_summary.csv").read_text()
    assert "skipped: insufficient data" in summary


def test_scaling_on_simulated_dump(tmp_path):
    sim = tmp_path / "sim"
    assert run("simulate", "--seed", 3, "--out", sim, *TINY, "--citations", "stubs") == 0
    out = tmp_path / "scaling"
    assert run("scaling", sim / "corpus.jsonl", "--out", out) == 0
    assert (out / "fit_collaborations_all_pap.csv").exists()
    assert (out / "curve_authors_all_fcit.csv").exists()
    assert (out / "histogram_collaborations.csv").exists()
    decomposition = (out / "decomposition.csv").read_text().splitlines()
    assert decomposition[1].startswith("collaborations,all,")


# -- simulate / validate ---------------------------------------------------------

def test_simulate_output_ingests_cleanly(tmp_path):
    for mode in ("sidecar", "stubs"):
        sim = tmp_path / mode
        assert run("simulate", "--seed", 8, "--out", sim, *TINY, "--citations", mode) == 0
        assert run("ingest", sim / "corpus.jsonl", "--out", sim / "ingest") == 0
        assert (sim / "ingest" / "rejections.tsv").read_text() == ""
        assert (sim / "ingest" / "warnings.tsv").read_text() == ""


def test_simulate_sidecar_feeds_indices(tmp_path):
    sim = tmp_path / "sim"
    assert run("simulate", "--seed", 2, "--out", sim, *TINY) == 0
    assert run("indices", sim / "corpus.jsonl", "--sidecar", sim / "citations.csv",
               "--out", tmp_path / "idx") == 0
    text = (tmp_path / "idx" / "profiles_collaborations.csv").read_text()
    assert text.count("\n") == 301


def test_validate_defaults_pass(tmp_path, capsys):
    assert run("validate", "--seed", 1, "--out", tmp_path) == 0
    deltas = (tmp_path / "deltas.csv").read_text().splitlines()
    assert len(deltas) == 6 and all(row.endswith(",yes") for row in deltas[1:])
    assert "p_totcit - (p_pap + p_cit)" in capsys.readouterr().out


def test_validate_through_files_matches_in_memory(tmp_path):
    a, b = tmp_path / "mem", tmp_path / "files"
    args = ["--seed", 6, *TINY, "--tolerance", "1", "--totcit-tolerance", "1"]
    assert run("validate", "--out", a, *args) == 0
    assert run("validate", "--out", b, *args, "--through-files") == 0
    files_a = _csv_files(a)
    files_b = _csv_files(b)
    files_b.pop("citations.csv")
    assert files_a == files_b


def test_validate_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("validate", "--seed", 4, "--out", a, *TINY, "--tolerance", "1",
               "--totcit-tolerance", "1") == 0
    assert run("validate", "--seed", 4, "--out", b, *TINY, "--tolerance", "1",
               "--totcit-tolerance", "1") == 0
    assert _csv_files(a) == _csv_files(b)
    assert (a / "manifest.time").exists()


def test_validate_tolerance_exceeded_exit_3(tmp_path, capsys):
    code = run("validate", "--seed", 1, "--out", tmp_path, *TINY,
               "--tolerance", "0", "--totcit-tolerance", "0")
    assert code == 3
    assert "validation failed" in capsys.readouterr().err
    assert ",no" in (tmp_path / "deltas.csv").read_text()


# -- report ---------------------------------------------------------------------

def test_report_renders_svgs(tmp_path):
    assert run("validate", "--seed", 1, "--out", tmp_path / "v", *TINY, "--tolerance", "1",
               "--totcit-tolerance", "1") == 0
    assert run("report", tmp_path / "v", "--out", tmp_path / "plots") == 0
    svgs = sorted(p.name for p in (tmp_path / "plots").glob("*.svg"))
    assert svgs == [f"synth_{f}.svg" for f in ("cit", "fcit", "icit", "pap", "totcit")]
    text = (tmp_path / "plots" / "synth_pap.svg").read_text()
    assert text.startswith("<svg") or text.startswith("<?xml")


def test_report_empty_dir_exit_1(tmp_path):
    (tmp_path / "empty").mkdir()
    assert run("report", tmp_path / "empty", "--out", tmp_path / "o") == 1


# -- configuration and manifest --------------------------------------------------

def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nseed = 5\nn_collabs = 50\nnaut-max = 40\n", encoding="utf-8")
    assert run("simulate", "--config", cfg, "--out", tmp_path / "a", "--n-collabs", 20) == 0
    manifest = (tmp_path / "a" / "manifest.txt").read_text().splitlines()
    assert "n_collabs = 20" in manifest
    assert "naut_max = 40" in manifest
    assert "seed = 5" in manifest
    assert "sigma_log = 1.2" in manifest
    assert any(line.startswith("backend = ") for line in manifest)


@pytest.mark.parametrize("text", ["nonsense\n", "alpha = 0.5\n", "seed = x\n"])
def test_bad_config_is_usage_error(tmp_path, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text, encoding="utf-8")
    assert run("simulate", "--config", cfg, "--seed", 1, "--out", tmp_path / "o") == 2


# -- exit-status contract --------------------------------------------------------

@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["indices", "--out", "x", "--bogus"],
    ["simulate", "--out", "x"],
    ["validate", "--out", "x"],
    ["simulate", "--seed", "1"],
    ["simulate", "--seed", "1", "--out", "x", "--s", "1.5"],
    ["simulate", "--seed", "1", "--out", "x", "--n-collabs", "0"],
    ["scaling", "--out", "x", "--estimator", "mode"],
    ["indices", "--out", "x"],
    ["indices", "c.jsonl", "--out", "x", "--alpha", "3"],
])
def test_usage_errors_exit_2(tmp_path, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2


def test_missing_input_exit_1_names_path(tmp_path, capsys):
    missing = tmp_path / "nope.jsonl"
    assert run("indices", missing, "--out", tmp_path / "o") == 1
    assert str(missing) in capsys.readouterr().err


def test_missing_sidecar_exit_1(hand_corpus_file, tmp_path):
    assert run("indices", hand_corpus_file, "--sidecar", tmp_path / "none.csv",
               "--out", tmp_path / "o") == 1


def test_bad_sidecar_exit_1(hand_corpus_file, tmp_path):
    side = tmp_path / "side.csv"
    side.write_text("paper_id,n_cit,n_ref_of_citers_harmonic\nZZ,1,1\n", encoding="utf-8")
    assert run("indices", hand_corpus_file, "--sidecar", side, "--out", tmp_path / "o") == 1


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "collabmetrics", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("collabmetrics ")
    proc = subprocess.run([sys.executable, "-m", "collabmetrics", "nope"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
