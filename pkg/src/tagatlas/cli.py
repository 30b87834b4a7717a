"""Pipeline command line: synth -> ingest -> train -> project -> serve,
plus an offline query command.

Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go to
stderr; stdout carries only stage reports and query results.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import socket
import sys
from datetime import datetime, timezone
from pathlib import Path

from .atlas import load_atlas, save_atlas
from .embed import TrainConfig, load_model, save_model, train
from .errors import DataError, UnknownHashtag
from .ingest import ingest_file, read_token_file
from .knn import top_k
from .project import TsneConfig, TsneStats, build_atlas
from .service import ServiceConfig, run_service
from .synth import write_demo_corpus
from .vocab import SubwordConfig, build_vocab

ENV_ATLAS = "TAGATLAS_ATLAS"
ENV_PORT = "TAGATLAS_PORT"


class _Parser(argparse.ArgumentParser):
    # usage problems are exit code 1; argparse's default of 2 is taken by data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _update_manifest(path: str | None, stage: str, **sections) -> None:
    """Read-modify-write the pipeline manifest; each stage stamps itself."""
    if not path:
        return
    manifest = {}
    p = Path(path)
    if p.exists():
        try:
            manifest = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataError(f"manifest {path} is not valid JSON: {exc}") from None
    manifest.update(sections)
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    manifest.setdefault("timestamps", {})[stage] = stamp
    p.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_synth(args) -> int:
    stats = write_demo_corpus(args.output, n_tweets=args.tweets, seed=args.seed)
    print(f"wrote {stats['tweets']} tweets "
          f"({stats['hashtags']} hashtag types, {stats['malformed']} malformed lines) "
          f"to {args.output}")
    _update_manifest(args.manifest, "synth",
                     corpus=str(args.output), synth_seed=args.seed)
    return 0


def cmd_ingest(args) -> int:
    stats = ingest_file(args.input, args.output)
    print(f"kept={stats.kept} skipped={stats.skipped} -> {args.output}")
    _update_manifest(args.manifest, "ingest",
                     corpus=str(args.input), tokens=str(args.output),
                     counts={"kept": stats.kept, "skipped": stats.skipped})
    return 0


def cmd_train(args) -> int:
    subword = SubwordConfig(minn=args.minn, maxn=args.maxn, bucket=args.bucket)
    config = TrainConfig(dim=args.dim, window=args.window, epochs=args.epochs,
                         lr0=args.lr0, neg=args.neg, seed=args.seed,
                         workers=args.workers, subsample_t=args.subsample)
    vocab = build_vocab(read_token_file(args.tokens),
                        min_count=args.min_count, subsample_t=args.subsample)
    model = train(args.tokens, vocab, config, subword)
    save_model(model, args.model_out)
    n_tags = len(vocab.hashtag_ids())
    last_loss = model.epoch_mean_loss[-1] if model.epoch_mean_loss else float("nan")
    print(f"vocab={len(vocab)} hashtags={n_tags} final_mean_loss={last_loss:.6f} "
          f"-> {args.model_out}")
    _update_manifest(args.manifest, "train",
                     tokens=str(args.tokens), model=str(args.model_out),
                     train_config=dataclasses.asdict(config),
                     subword=dataclasses.asdict(subword))
    return 0


def cmd_project(args) -> int:
    config = TsneConfig(perplexity=args.perplexity, iters=args.iters,
                        exaggeration=args.exaggeration, eta=args.eta,
                        pca_dim=args.pca_dim, seed=args.seed)
    model = load_model(args.model)
    stats = TsneStats()
    atlas = build_atlas(model, config, stats)
    save_atlas(atlas, args.atlas_out)
    print(f"hashtags={len(atlas)} final_kl={stats.kl_final:.6f} -> {args.atlas_out}")
    _update_manifest(args.manifest, "project",
                     model=str(args.model), atlas=str(args.atlas_out),
                     tsne_config=dataclasses.asdict(config))
    return 0


def _port_free(host: str, port: int) -> bool:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as s:
        s.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            s.bind((host, port))
        except OSError:
            return False
    return True


def cmd_serve(args) -> int:
    atlas_path = args.atlas or os.environ.get(ENV_ATLAS)
    if not atlas_path:
        print(f"error: no atlas given (use --atlas or {ENV_ATLAS})", file=sys.stderr)
        return 1
    port = args.port
    if port is None:
        raw = os.environ.get(ENV_PORT)
        try:
            port = int(raw) if raw else 8765
        except ValueError:
            print(f"error: {ENV_PORT}={raw!r} is not a port number", file=sys.stderr)
            return 1
    atlas = load_atlas(atlas_path)  # fail fast with parse diagnostics
    if not _port_free(args.host, port):
        print(f"error: port {port} on {args.host} is already in use", file=sys.stderr)
        return 1
    config = ServiceConfig(atlas_path=atlas_path, host=args.host, port=port,
                           default_k=args.default_k, max_k=args.max_k)
    print(f"serving {len(atlas)} hashtags on http://{args.host}:{port}", flush=True)
    run_service(config, atlas=atlas)
    return 0


def cmd_query(args) -> int:
    atlas_path = args.atlas or os.environ.get(ENV_ATLAS)
    if not atlas_path:
        print(f"error: no atlas given (use --atlas or {ENV_ATLAS})", file=sys.stderr)
        return 1
    atlas = load_atlas(atlas_path)
    result = top_k(atlas, args.tag, args.k)
    for rank, nb in enumerate(result.neighbors, start=1):
        print(f"{rank}\t{nb.tag}\t{nb.similarity:.6f}\t{nb.x!r}\t{nb.y!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tagatlas",
                     description="hashtag embedding, projection, and neighbor service")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic demo corpus")
    p.add_argument("--output", required=True)
    p.add_argument("--tweets", type=int, default=10000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="raw tweet JSONL (optionally gzip) -> token file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="token file -> embedding model")
    p.add_argument("--tokens", required=True)
    p.add_argument("--model-out", required=True)
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr0", type=float, default=0.05)
    p.add_argument("--neg", type=int, default=5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--subsample", type=float, default=1e-4)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--minn", type=int, default=3)
    p.add_argument("--maxn", type=int, default=6)
    p.add_argument("--bucket", type=int, default=2_000_000)
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("project", help="model -> 2D hashtag atlas")
    p.add_argument("--model", required=True)
    p.add_argument("--atlas-out", required=True)
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--exaggeration", type=float, default=12.0)
    p.add_argument("--eta", type=float, default=200.0)
    p.add_argument("--pca-dim", type=int, default=50)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("serve", help="run the neighbor service over an atlas")
    p.add_argument("--atlas")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--default-k", type=int, default=100)
    p.add_argument("--max-k", type=int, default=1000)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("query", help="print neighbors for one hashtag")
    p.add_argument("--atlas")
    p.add_argument("--tag", required=True)
    p.add_argument("--k", type=int, default=100)
    p.set_defaults(func=cmd_query)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnknownHashtag as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
