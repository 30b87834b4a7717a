"""Command-line pipeline tests.

Most commands run in-process through main() for speed; the serve lifecycle
(signal handling, busy ports) runs as real subprocesses.
"""
import gzip
import io
import json
import signal
import socket
import subprocess
import sys
import time
import urllib.error
import urllib.request
from contextlib import redirect_stderr, redirect_stdout

import pytest
from fastapi.testclient import TestClient

from tagatlas.atlas import load_atlas
from tagatlas.cli import main
from tagatlas.embed import load_model
from tagatlas.service import ServiceConfig, create_app


def run_cli(args):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(args)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Full small pipeline: synth -> ingest -> train -> project."""
    d = tmp_path_factory.mktemp("pipeline")
    manifest = str(d / "manifest.json")
    steps = [
        ["synth", "--output", str(d / "corpus.jsonl"), "--tweets", "800",
         "--seed", "3", "--manifest", manifest],
        ["ingest", "--input", str(d / "corpus.jsonl"),
         "--output", str(d / "tokens.txt"), "--manifest", manifest],
        ["train", "--tokens", str(d / "tokens.txt"),
         "--model-out", str(d / "model.bin"), "--dim", "12", "--epochs", "2",
         "--bucket", "20000", "--min-count", "3", "--seed", "3",
         "--manifest", manifest],
        ["project", "--model", str(d / "model.bin"),
         "--atlas-out", str(d / "atlas.tsv"), "--iters", "250",
         "--perplexity", "10", "--seed", "3", "--manifest", manifest],
    ]
    for args in steps:
        code, out, err = run_cli(args)
        assert code == 0, (args[0], err)
    return d


class TestPipelineStages:
    def test_all_artifacts_exist(self, workdir):
        for name in ("corpus.jsonl", "tokens.txt", "model.bin", "atlas.tsv"):
            assert (workdir / name).stat().st_size > 0

    def test_stage_reports(self, workdir):
        code, out, _ = run_cli(["ingest", "--input", str(workdir / "corpus.jsonl"),
                                "--output", str(workdir / "tokens2.txt")])
        assert code == 0
        assert "kept=" in out and "skipped=" in out

    def test_model_file_round_trips_via_cli_flags(self, workdir):
        model = load_model(workdir / "model.bin")
        assert model.dim == 12
        assert model.subword.bucket == 20000

    def test_atlas_row_count_matches_model(self, workdir):
        model = load_model(workdir / "model.bin")
        atlas = load_atlas(workdir / "atlas.tsv")
        assert len(atlas) == len(model.vocab.hashtag_ids())
        lines = (workdir / "atlas.tsv").read_text(encoding="utf-8").splitlines()
        assert len(lines) == len(atlas) + 1

    def test_manifest_accumulates_stages(self, workdir):
        manifest = json.loads((workdir / "manifest.json").read_text())
        assert set(manifest["timestamps"]) == {"synth", "ingest", "train", "project"}
        assert manifest["train_config"]["dim"] == 12
        assert manifest["tsne_config"]["iters"] == 250
        assert manifest["subword"]["bucket"] == 20000
        assert manifest["counts"]["kept"] > 0

    def test_gzip_input_is_transparent(self, workdir, tmp_path):
        packed = tmp_path / "corpus.jsonl.gz"
        with open(workdir / "corpus.jsonl", "rb") as src, \
                gzip.open(packed, "wb") as dst:
            dst.write(src.read())
        code, _, _ = run_cli(["ingest", "--input", str(packed),
                              "--output", str(tmp_path / "tokens.txt")])
        assert code == 0
        assert (tmp_path / "tokens.txt").read_bytes() == \
            (workdir / "tokens.txt").read_bytes()


class TestDeterminism:
    def test_train_twice_is_byte_identical(self, workdir, tmp_path):
        outs = []
        for name in ("m1.bin", "m2.bin"):
            path = tmp_path / name
            code, _, _ = run_cli(["train", "--tokens", str(workdir / "tokens.txt"),
                                  "--model-out", str(path), "--dim", "10",
                                  "--epochs", "1", "--bucket", "5000",
                                  "--min-count", "3", "--workers", "1",
                                  "--seed", "7"])
            assert code == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_project_twice_is_byte_identical(self, workdir, tmp_path):
        outs = []
        for name in ("a1.tsv", "a2.tsv"):
            path = tmp_path / name
            code, _, _ = run_cli(["project", "--model", str(workdir / "model.bin"),
                                  "--atlas-out", str(path), "--iters", "120",
                                  "--perplexity", "8", "--seed", "7"])
            assert code == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]


class TestQuery:
    def test_k_rows(self, workdir):
        code, out, _ = run_cli(["query", "--atlas", str(workdir / "atlas.tsv"),
                                "--tag", "wildfire", "--k", "5"])
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 5
        assert lines[0].startswith("1\t#")

    def test_hash_prefix_optional(self, workdir):
        bare = run_cli(["query", "--atlas", str(workdir / "atlas.tsv"),
                        "--tag", "wildfire", "--k", "3"])
        hashed = run_cli(["query", "--atlas", str(workdir / "atlas.tsv"),
                          "--tag", "#wildfire", "--k", "3"])
        assert bare == hashed

    def test_unknown_tag_exits_2(self, workdir):
        code, out, err = run_cli(["query", "--atlas", str(workdir / "atlas.tsv"),
                                  "--tag", "nosuchtag"])
        assert code == 2
        assert out == ""
        assert "unknown-hashtag" in err

    def test_atlas_env_fallback(self, workdir, monkeypatch):
        monkeypatch.setenv("TAGATLAS_ATLAS", str(workdir / "atlas.tsv"))
        code, out, _ = run_cli(["query", "--tag", "wildfire", "--k", "2"])
        assert code == 0
        assert len(out.strip().splitlines()) == 2

    def test_no_atlas_anywhere_exits_1(self, monkeypatch):
        monkeypatch.delenv("TAGATLAS_ATLAS", raising=False)
        code, _, err = run_cli(["query", "--tag", "x"])
        assert code == 1
        assert "no atlas" in err

    def test_matches_service_responses(self, workdir):
        atlas = load_atlas(workdir / "atlas.tsv")
        config = ServiceConfig(atlas_path="unused")
        _, out, _ = run_cli(["query", "--atlas", str(workdir / "atlas.tsv"),
                             "--tag", "wildfire", "--k", "8"])
        with TestClient(create_app(config, atlas=atlas)) as client:
            body = client.get("/api/neighbors",
                              params={"tag": "wildfire", "k": 8}).json()
        rows = [line.split("\t") for line in out.strip().splitlines()]
        assert [r[1] for r in rows] == [nb["tag"] for nb in body["neighbors"]]
        for row, nb in zip(rows, body["neighbors"]):
            assert float(row[2]) == nb["similarity"]
            assert float(row[3]) == nb["x"]
            assert float(row[4]) == nb["y"]


class TestErrorPaths:
    def test_missing_input_names_path(self, tmp_path):
        missing = tmp_path / "nope.jsonl"
        code, _, err = run_cli(["ingest", "--input", str(missing),
                                "--output", str(tmp_path / "t.txt")])
        assert code == 2
        assert str(missing) in err

    def test_empty_vocabulary_exits_2(self, tmp_path):
        tokens = tmp_path / "tokens.txt"
        tokens.write_text("one two\n", encoding="utf-8")
        code, _, err = run_cli(["train", "--tokens", str(tokens),
                                "--model-out", str(tmp_path / "m.bin"),
                                "--min-count", "5"])
        assert code == 2
        assert "empty vocabulary" in err

    def test_corrupt_atlas_serve_exits_2(self, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text("not an atlas\n", encoding="utf-8")
        code, _, err = run_cli(["serve", "--atlas", str(bad), "--port", "8899"])
        assert code == 2
        assert "header" in err

    def test_bad_port_env_exits_1(self, workdir, monkeypatch):
        monkeypatch.setenv("TAGATLAS_PORT", "not-a-port")
        code, _, err = run_cli(["serve", "--atlas", str(workdir / "atlas.tsv")])
        assert code == 1
        assert "TAGATLAS_PORT" in err

    def test_usage_errors_exit_1(self):
        for args in ([], ["frobnicate"], ["ingest"], ["train", "--tokens", "x"]):
            with pytest.raises(SystemExit) as err:
                run_cli(args)
            assert err.value.code == 1

    def test_corrupt_manifest_exits_2(self, tmp_path):
        manifest = tmp_path / "manifest.json"
        manifest.write_text("{broken", encoding="utf-8")
        code, _, err = run_cli(["synth", "--output", str(tmp_path / "c.jsonl"),
                                "--tweets", "10", "--manifest", str(manifest)])
        assert code == 2
        assert "manifest" in err

    def test_perplexity_clamp_warns_but_succeeds(self, workdir, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "tagatlas.cli", "project",
             "--model", str(workdir / "model.bin"),
             "--atlas-out", str(tmp_path / "a.tsv"),
             "--iters", "60", "--perplexity", "200"],
            capture_output=True, text=True, timeout=300)
        assert proc.returncode == 0
        assert "clamped" in proc.stderr


class TestServeLifecycle:
    def free_port(self):
        with socket.socket() as s:
            s.bind(("127.0.0.1", 0))
            return s.getsockname()[1]

    def test_serves_health_then_exits_cleanly_on_interrupt(self, workdir):
        port = self.free_port()
        proc = subprocess.Popen(
            [sys.executable, "-m", "tagatlas.cli", "serve",
             "--atlas", str(workdir / "atlas.tsv"), "--port", str(port)],
            stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True)
        try:
            deadline = time.monotonic() + 10
            body = None
            while time.monotonic() < deadline:
                try:
                    with urllib.request.urlopen(
                            f"http://127.0.0.1:{port}/api/health", timeout=1) as r:
                        body = json.load(r)
                    break
                except (urllib.error.URLError, ConnectionError):
                    time.sleep(0.2)
            assert body is not None, "service never came up"
            assert body["status"] == "ok"
            with urllib.request.urlopen(
                    f"http://127.0.0.1:{port}/api/neighbors?tag=wildfire&k=2",
                    timeout=5) as r:
                assert len(json.load(r)["neighbors"]) == 2
        finally:
            proc.send_signal(signal.SIGINT)
        assert proc.wait(timeout=30) == 0

    def test_busy_port_exits_1(self, workdir):
        with socket.socket() as blocker:
            blocker.bind(("127.0.0.1", 0))
            blocker.listen(1)
            port = blocker.getsockname()[1]
            proc = subprocess.run(
                [sys.executable, "-m", "tagatlas.cli", "serve",
                 "--atlas", str(workdir / "atlas.tsv"), "--port", str(port)],
                capture_output=True, text=True, timeout=300)
        assert proc.returncode == 1
        assert "already in use" in proc.stderr
