import json
import subprocess
import sys

import pytest

from leap.cli import ABLATION_VARIANTS, build_parser, load_settings, main, search_config

SMALL = ["--sample", "30", "--seed", "3"]


def run_cli(*argv):
    return main([str(a) for a in argv])


def records(path):
    lines = path.read_text().splitlines()
    return [json.loads(x) for x in lines[:-1]], json.loads(lines[-1])["summary"]


def test_run_on_bundled_corpus(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    assert run_cli("run", "--out", out) == 0
    recs, summary = records(out)
    assert len(recs) == 200
    assert [r["index"] for r in recs] == list(range(200))
    assert summary["attempted"] + summary["skipped_count"] == 200
    assert 0 < summary["s_rate"] <= 1
    printed = json.loads(capsys.readouterr().out)
    assert printed["s_rate"] == summary["s_rate"] and "mean_time_per_success" in printed


def test_sample_larger_than_dataset(tmp_path, capsys):
    assert run_cli("run", "--sample", 201, "--out", tmp_path / "r.jsonl") == 2
    assert "sample exceeds dataset" in capsys.readouterr().err


def test_same_seed_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run_cli("run", *SMALL, "--out", a) == 0
    assert run_cli("run", *SMALL, "--workers", 3, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"seed": 5, "init": "brownian", "pop_size": 12, "sample": 10}))
    args = build_parser().parse_args(["run", "--config", str(cfg), "--seed", "8", "--out", "x"])
    settings = load_settings(args)
    c = search_config(settings)
    assert (c.seed, c.init_mode, c.pop_size) == (8, "brownian", 12)
    assert settings["sample"] == 10


def test_every_flag_has_a_config_key(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"sample": 12, "seed": 2, "workers": 2, "init": "brownian",
                               "inertia": "linear", "mutation": "off", "out": str(b)}))
    assert run_cli("run", "--sample", 12, "--seed", 2, "--workers", 2, "--init", "brownian",
                   "--inertia", "linear", "--mutation", "off", "--out", a) == 0
    assert run_cli("run", "--config", cfg) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("body,msg", [("[1]", "JSON object"), ("{", "cannot read config"),
                                       ('{"pop_size": -1}', "bad search config"),
                                       ('{"colour": 1}', "bad search config")])
def test_bad_config(tmp_path, capsys, body, msg):
    cfg = tmp_path / "c.json"
    cfg.write_text(body)
    assert run_cli("run", "--config", cfg, "--out", tmp_path / "r.jsonl") == 2
    assert msg in capsys.readouterr().err


def test_bad_dataset(tmp_path, capsys):
    data = tmp_path / "d.csv"
    data.write_text("text,label\nhello,x\n")
    assert run_cli("run", "--dataset", data, "--out", tmp_path / "r.jsonl") == 2
    assert "d.csv:2" in capsys.readouterr().err


def test_missing_out(capsys):
    assert run_cli("run", "--sample", 3) == 2


def test_unreachable_http_victim(tmp_path, capsys):
    code = run_cli("run", "--sample", 2, "--victim", "http://127.0.0.1:9", "--out", tmp_path / "r.jsonl")
    assert code == 3


def test_ablate_table(tmp_path, capsys):
    out = tmp_path / "ab.json"
    assert run_cli("ablate", *SMALL, "--repeats", 2, "--out", out) == 0
    table = capsys.readouterr().out.splitlines()
    assert table[0].split()[:2] == ["variant", "S-rate"]
    assert len(table) == 5
    rows = json.loads(out.read_text())
    assert [r["variant"] for r in rows] == [name for name, _ in ABLATION_VARIANTS]
    assert all(r["runs"] == 2 and 0 <= r["s_rate"] <= 1 for r in rows)


def test_ablation_variants_cover_the_four_rows():
    modes = [tuple(o.values()) for _, o in ABLATION_VARIANTS]
    assert modes == [("brownian", "linear", "off"), ("levy", "linear", "off"),
                     ("levy", "adaptive", "off"), ("levy", "adaptive", "greedy")]


def test_replay_command(tmp_path, capsys):
    rep = tmp_path / "r.jsonl"
    assert run_cli("run", *SMALL, "--out", rep) == 0
    capsys.readouterr()
    corpus = tmp_path / "nb.csv"
    from leap.cli import bundled

    corpus.write_text(open(bundled("minicorpus.csv")).read())
    assert run_cli("replay", "--report", rep, "--victim", f"nb:{corpus}") == 0
    out = json.loads(capsys.readouterr().out)
    assert 0 <= out["transfer_rate"] <= 1
    assert out["evaluated"] == len(out["records"])


def test_lexicon_command(tmp_path, mini_wordnet, capsys):
    data = tmp_path / "d.csv"
    data.write_text("text,label\nGood ice cream,1\nthey run,0\n")
    out = tmp_path / "lex.json"
    assert run_cli("lexicon", mini_wordnet, "--dataset", data, "--out", out) == 0
    from leap.lexicon import SynonymLexicon

    lex = SynonymLexicon.load(out)
    # "cream" only has the multiword synonym ice_cream, so it has no entry
    assert dict(lex.entries) == {"good": ("well",), "run": ("go",)}
    assert lex.source_version == "3.0"
    assert "wrote" in capsys.readouterr().out


def test_lexicon_command_needs_a_directory(tmp_path, capsys):
    assert run_cli("lexicon", "--out", tmp_path / "x.json") == 2


def test_export_command(tmp_path, capsys):
    rep = tmp_path / "r.jsonl"
    assert run_cli("run", *SMALL, "--out", rep) == 0
    from leap.cli import bundled
    from leap.dataset import load_dataset
    from leap.metrics import read_report

    out = tmp_path / "aug.csv"
    assert run_cli("export", "--report", rep, "--dataset", bundled("minicorpus.csv"), "--out", out) == 0
    assert len(load_dataset(out)) == 200 + read_report(rep).successes


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "leap.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "0.1.0"
