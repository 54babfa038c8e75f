"""Command-line interface tests driven through the real entry point."""

import pytest

from trialsieve.cli import main


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    ws = tmp_path_factory.mktemp("cli")
    assert main(["demo", str(ws / "demo")]) == 0
    return ws


def base_args(ws):
    return ["--store", str(ws / "store.db"),
            "--rules", str(ws / "demo/rules"),
            "--out", str(ws / "out")]


def test_demo_materializes_assets(workspace):
    d = workspace / "demo"
    assert sorted(p.name for p in d.iterdir()) == ["corpus", "gold", "rules"]
    assert len(list((d / "corpus").glob("*.txt"))) == 20
    assert len(list((d / "rules").glob("*.tsv"))) == 9


def test_ingest(workspace, capsys):
    rc = main(base_args(workspace) + ["ingest", str(workspace / "demo/corpus")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "ingested 20 patients, 60 documents" in out
    assert (workspace / "out/documents.tsv").exists()


def test_ruleset_lint_clean(workspace, capsys):
    assert main(base_args(workspace) + ["ruleset", "lint"]) == 0
    assert "lint clean" in capsys.readouterr().out


def test_ruleset_lint_reports_row(workspace, tmp_path, capsys):
    bad = tmp_path / "rules"
    bad.mkdir()
    (bad / "patients.tsv").write_text("C\tmet\tX_doc\tNONE\tANY\t-\n")
    rc = main(["--rules", str(bad), "ruleset", "lint"])
    assert rc == 1
    assert "DEFAULT" in capsys.readouterr().err


def test_trie_dump(workspace, capsys):
    assert main(base_args(workspace) + ["trie", "dump"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("fingerprint ")
    assert "ner_include\tnodes=" in out


def test_run_writes_predictions(workspace, capsys):
    rc = main(base_args(workspace) + ["run", "--trace"])
    assert rc == 0
    assert "processed 20 patients" in capsys.readouterr().out
    preds = list((workspace / "out/predictions").glob("*.xml"))
    assert len(preds) == 20
    assert len(list((workspace / "out/traces").glob("*.jsonl"))) == 60


def test_run_single_patient(workspace, capsys):
    rc = main(base_args(workspace) + ["run", "--patient", "P01"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 13
    assert any(l == "P01\tMi-6mos\tmet" for l in lines)


def test_eval_perfect_score(workspace, capsys):
    rc = main(base_args(workspace) +
              ["eval", "--gold", str(workspace / "demo/gold"),
               "--pred", str(workspace / "out/predictions")])
    assert rc == 0
    out = capsys.readouterr().out
    micro = [l for l in out.splitlines()
             if l.startswith("Overall (micro)")][0]
    assert micro.split("\t")[1:] == ["1.0000"] * 9
    assert (workspace / "out/report.json").exists()


def test_trace_command(workspace, capsys):
    rc = main(base_args(workspace) + ["trace", "P00-0"])
    assert rc == 0
    path = capsys.readouterr().out.strip()
    assert path.endswith("P00-0.jsonl")


def test_usage_error_exits_1(workspace, capsys):
    assert main(base_args(workspace) + ["eval", "--gold", "/nonexistent",
                                        "--pred", "/nonexistent"]) == 1
    assert main(["no-such-command"]) == 1


def test_user_error_exits_1(workspace, capsys):
    rc = main(base_args(workspace) + ["trace", "NOPE-0"])
    assert rc == 1
    assert "unknown document" in capsys.readouterr().err


def test_internal_error_exits_2(workspace, tmp_path, capsys):
    # pointing the store at a directory breaks the database layer
    rc = main(["--store", str(tmp_path), "--rules",
               str(workspace / "demo/rules"), "ingest",
               str(workspace / "demo/corpus")])
    assert rc == 2
    assert "internal error" in capsys.readouterr().err


def test_config_file_supplies_defaults(workspace, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"store_path = {workspace / 'store.db'}\n"
        f"rules_dir = {workspace / 'demo/rules'}\n"
        f"output_dir = {tmp_path / 'out'}\n"
        "parallelism = 2\n")
    assert main(["--config", str(cfg), "run"]) == 0
    assert (tmp_path / "out/predictions/P00.xml").exists()


def test_bad_config_value(workspace, tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("parallelism = many\n")
    assert main(["--config", str(cfg), "run"]) == 1
    assert "integer" in capsys.readouterr().err
