import io
import json

import pytest

from cogseg import cli
from cogseg.serialization import load_model


def run_cli(argv, stdin_text="", monkeypatch=None):
    assert monkeypatch is not None
    stdin = io.StringIO(stdin_text)
    stdout = io.StringIO()
    stderr = io.StringIO()
    monkeypatch.setattr(cli.sys, "stdin", stdin)
    monkeypatch.setattr(cli.sys, "stdout", stdout)
    monkeypatch.setattr(cli.sys, "stderr", stderr)
    code = cli.main(argv)
    return code, stdout.getvalue(), stderr.getvalue()


@pytest.fixture
def workspace(tmp_path):
    (tmp_path / "a.txt").write_text(
        "kalassa on kala kala\nkalassa ssa ssa kala vesi\nkala ssa vesi\n",
        encoding="utf-8",
    )
    (tmp_path / "b.txt").write_text(
        "kalas on kala\nkalas s s kala veed\nkala s kala veed\n", encoding="utf-8"
    )
    (tmp_path / "cognates.tsv").write_text(
        "kalassa\tkalas\t4\nvesi\tveed\t3\n", encoding="utf-8"
    )
    return tmp_path


def train_model(workspace, monkeypatch, extra=()):
    model_path = workspace / "model"
    code, _, err = run_cli(
        [
            "train",
            "--corpus-a", str(workspace / "a.txt"),
            "--corpus-b", str(workspace / "b.txt"),
            "--cognates", str(workspace / "cognates.tsv"),
            "--seed", "3",
            "--out", str(model_path),
            *extra,
        ],
        monkeypatch=monkeypatch,
    )
    assert code == 0, err
    return model_path


class TestTrainCommand:
    def test_defaults_recorded(self, workspace, monkeypatch):
        model_path = train_model(workspace, monkeypatch)
        text = model_path.read_text(encoding="utf-8")
        assert "alpha 0.01" in text
        assert "edit-weight 10.0" in text
        assert "edit-mode full" in text

    def test_flag_overrides(self, workspace, monkeypatch):
        model_path = train_model(
            workspace, monkeypatch,
            extra=["--alpha", "0.5", "--edit-weight", "2", "--edit-mode", "count-only"],
        )
        model = load_model(model_path)
        assert model.alpha == 0.5
        assert model.edit_weight == 2.0
        assert model.edit_mode == "count-only"

    def test_config_file_precedence(self, workspace, monkeypatch):
        config = workspace / "config.json"
        config.write_text(json.dumps({"alpha": 0.25, "seed": 9}), encoding="utf-8")
        model_path = workspace / "model"
        code, _, err = run_cli(
            [
                "train",
                "--corpus-a", str(workspace / "a.txt"),
                "--corpus-b", str(workspace / "b.txt"),
                "--cognates", str(workspace / "cognates.tsv"),
                "--config", str(config),
                "--seed", "3",
                "--out", str(model_path),
            ],
            monkeypatch=monkeypatch,
        )
        assert code == 0, err
        model = load_model(model_path)
        assert model.alpha == 0.25  # from config file
        assert model.seed == 3  # flag beats config

    def test_deterministic_output_bytes(self, workspace, monkeypatch):
        first = train_model(workspace, monkeypatch).read_bytes()
        second = train_model(workspace, monkeypatch).read_bytes()
        assert first == second

    def test_reserved_characters_rejected(self, workspace, monkeypatch):
        (workspace / "bad.txt").write_text("kala ka|la\n", encoding="utf-8")
        code, _, err = run_cli(
            [
                "train",
                "--corpus-a", str(workspace / "bad.txt"),
                "--corpus-b", str(workspace / "b.txt"),
                "--out", str(workspace / "model"),
            ],
            monkeypatch=monkeypatch,
        )
        assert code == 1
        payload = json.loads(err)
        assert "reserved" in payload["message"]


class TestTrainMono:
    def test_trains_and_segments(self, workspace, monkeypatch):
        model_path = workspace / "mono"
        code, _, err = run_cli(
            ["train-mono", "--corpus", str(workspace / "a.txt"), "--alpha", "0.3",
             "--out", str(model_path)],
            monkeypatch=monkeypatch,
        )
        assert code == 0, err
        model = load_model(model_path)
        assert model.alpha == 0.3
        assert model.analyses["b"] == {}


class TestSegmentCommands:
    def test_segment_roundtrip(self, workspace, monkeypatch):
        model_path = train_model(workspace, monkeypatch)
        text = "kalassa on kala\nvesi kala\n\ntundmatu\n"
        code, out, err = run_cli(
            ["segment", "--model", str(model_path), "--lang", "a"],
            stdin_text=text,
            monkeypatch=monkeypatch,
        )
        assert code == 0, err
        restored = "".join(
            line.replace("@@ ", "") + "\n" for line in out.splitlines()
        )
        assert restored == text

    def test_segment_uses_stored_analyses(self, workspace, monkeypatch):
        model_path = train_model(workspace, monkeypatch)
        model = load_model(model_path)
        morphs = model.analyses["a"]["kalassa"].morphs
        code, out, _ = run_cli(
            ["segment", "--model", str(model_path), "--lang", "a"],
            stdin_text="kalassa\n",
            monkeypatch=monkeypatch,
        )
        assert out.rstrip("\n").replace("@@", "") == " ".join(morphs).replace(" ", " ")
        assert out.rstrip("\n").replace("@@ ", "") == "kalassa"
        assert len(out.rstrip("\n").split(" ")) == len(morphs)

    def test_segment_source_override(self, workspace, monkeypatch):
        cognate_path = train_model(workspace, monkeypatch)
        (workspace / "en.txt").write_text(
            "walking kala talking walking\n", encoding="utf-8"
        )
        source_path = workspace / "source"
        code, _, err = run_cli(
            ["train-mono", "--corpus", str(workspace / "en.txt"),
             "--out", str(source_path)],
            monkeypatch=monkeypatch,
        )
        assert code == 0, err
        cognate_model = load_model(cognate_path)
        target_morphs = cognate_model.analyses["a"]["kalassa"].morphs
        code, out, err = run_cli(
            ["segment-source", "--source-model", str(source_path),
             "--cognate-model", str(cognate_path)],
            stdin_text="kalassa walking\n",
            monkeypatch=monkeypatch,
        )
        assert code == 0, err
        emitted = out.rstrip("\n").split(" ")
        assert emitted[: len(target_morphs)] == [
            m + "@@" for m in target_morphs[:-1]
        ] + [target_morphs[-1]]

    def test_prep_tag(self, workspace, monkeypatch):
        code, out, _ = run_cli(
            ["prep-tag", "--lang", "et"], stdin_text="tere\n\n", monkeypatch=monkeypatch
        )
        assert code == 0
        assert out == "<to_et> tere\n<to_et> \n"

    def test_prep_tag_unknown_language(self, workspace, monkeypatch):
        code, _, err = run_cli(
            ["prep-tag", "--lang", "xx"], stdin_text="tere\n", monkeypatch=monkeypatch
        )
        assert code == 1
        assert json.loads(err)["error"] == "ContractError"


class TestBpeCommands:
    def test_train_and_apply(self, workspace, monkeypatch):
        (workspace / "c1.tsv").write_text("kala\t10\nkalassa\t4\n", encoding="utf-8")
        (workspace / "c2.tsv").write_text("kalas\t5\n", encoding="utf-8")
        merges = workspace / "merges.txt"
        code, _, err = run_cli(
            ["bpe-train", "--counts", "%s,%s" % (workspace / "c1.tsv", workspace / "c2.tsv"),
             "--vocab", "12", "--out", str(merges)],
            monkeypatch=monkeypatch,
        )
        assert code == 0, err
        code, out, err = run_cli(
            ["bpe-apply", "--merges", str(merges)],
            stdin_text="kalassa töö-aeg\n",
            monkeypatch=monkeypatch,
        )
        assert code == 0, err
        assert out.rstrip("\n").replace("@@ ", "") == "kalassa töö-aeg"


class TestReportCommand:
    def test_report_edits_output(self, workspace, monkeypatch):
        model_path = train_model(workspace, monkeypatch)
        code, out, err = run_cli(
            ["report-edits", "--model", str(model_path), "--top", "30"],
            monkeypatch=monkeypatch,
        )
        assert code == 0, err
        lines = [l for l in out.splitlines() if l]
        counts = [int(l.split("\t")[1]) for l in lines]
        assert counts == sorted(counts, reverse=True)

    def test_direction_flag(self, workspace, monkeypatch):
        model_path = train_model(workspace, monkeypatch)
        _, ab, _ = run_cli(
            ["report-edits", "--model", str(model_path), "--direction", "ab"],
            monkeypatch=monkeypatch,
        )
        _, ba, _ = run_cli(
            ["report-edits", "--model", str(model_path), "--direction", "ba"],
            monkeypatch=monkeypatch,
        )
        if ab:
            left_ab = ab.splitlines()[0].split("\t")[0].split("→")
            left_ba = ba.splitlines()[0].split("\t")[0].split("→")
            assert left_ab == left_ba[::-1]


class TestErrors:
    def test_missing_file_is_machine_readable(self, workspace, monkeypatch):
        code, _, err = run_cli(
            ["segment", "--model", str(workspace / "nope"), "--lang", "a"],
            monkeypatch=monkeypatch,
        )
        assert code == 1
        payload = json.loads(err)
        assert payload["error"] in ("FileNotFoundError", "OSError")

    def test_extract_cognates_cli(self, workspace, monkeypatch):
        out_path = workspace / "out.tsv"
        (workspace / "aligned.tsv").write_text(
            "kuuluvus\tkuuluvuus\t3\ntalu\ttalo\t9\nisa!\tisä\t5\n", encoding="utf-8"
        )
        code, _, err = run_cli(
            ["extract-cognates", "--pairs", str(workspace / "aligned.tsv"),
             "--out", str(out_path)],
            monkeypatch=monkeypatch,
        )
        assert code == 0, err
        assert out_path.read_text(encoding="utf-8") == "kuuluvus\tkuuluvuus\t3\n"
