"""Subword-aware skip-gram embeddings over token files.

A token's input vector is the mean of its own row and its hashed subword
n-gram rows; training is negative-sampling SGD over dynamic windows. The
composition sets are precomputed once into CSR-style arrays so the
compiled kernels never touch Python.
"""
from __future__ import annotations

import struct
import threading
from array import array
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _sgns
from .errors import DataError
from .ingest import read_token_file
from .vocab import SubwordConfig, Vocabulary, subword_ngrams

MODEL_MAGIC = b"HVEC1"
# Refuse silly allocations up front instead of OOM-killing mid-train.
DEFAULT_MEMORY_CAP = 4 << 30

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 100
    window: int = 5
    epochs: int = 5
    lr0: float = 0.05
    neg: int = 5
    seed: int = 1
    workers: int = 1
    subsample_t: float = 1e-4

    def __post_init__(self):
        if self.dim < 1 or self.window < 1 or self.neg < 1 or self.workers < 1:
            raise ValueError("dim, window, neg, workers must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.lr0 <= 0:
            raise ValueError("lr0 must be positive")


@dataclass
class EmbeddingModel:
    input: np.ndarray          # (V + bucket, dim) float32
    output: np.ndarray         # (V, dim) float32
    vocab: Vocabulary
    subword: SubwordConfig
    dim: int
    comp_indptr: np.ndarray    # (V + 1,) int64
    comp_rows: np.ndarray      # row ids: token row, then V + bucket ids
    epoch_mean_loss: list[float] = field(default_factory=list)

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)


def _composition_arrays(vocab: Vocabulary, subword: SubwordConfig):
    v = len(vocab)
    per_token = [sorted(subword_ngrams(tok, subword)) for tok in vocab.tokens]
    indptr = np.zeros(v + 1, dtype=np.int64)
    for i, ids in enumerate(per_token):
        indptr[i + 1] = indptr[i] + 1 + len(ids)
    rows = np.empty(indptr[-1], dtype=np.int64)
    pos = 0
    for i, ids in enumerate(per_token):
        rows[pos] = i
        pos += 1
        for b in ids:
            rows[pos] = v + b
            pos += 1
    return indptr, rows


def init_model(vocab: Vocabulary, subword: SubwordConfig, config: TrainConfig,
               max_bytes: int = DEFAULT_MEMORY_CAP) -> EmbeddingModel:
    if len(vocab) == 0:
        raise DataError("cannot initialize a model on an empty vocabulary")
    v = len(vocab)
    need = (v + subword.bucket + v) * config.dim * 4
    if need > max_bytes:
        raise DataError(
            f"model matrices need {need} bytes "
            f"((V+bucket)x dim = ({v}+{subword.bucket})x{config.dim} plus output), "
            f"over the {max_bytes} byte cap; lower --bucket or --dim")
    rng = np.random.default_rng(config.seed & _SEED_MASK)
    inp = rng.random((v + subword.bucket, config.dim), dtype=np.float32)
    inp -= 0.5
    inp /= config.dim
    out = np.zeros((v, config.dim), dtype=np.float32)
    indptr, rows = _composition_arrays(vocab, subword)
    return EmbeddingModel(inp, out, vocab, subword, config.dim, indptr, rows)


def compose_input_vector(model: EmbeddingModel, token_id: int) -> np.ndarray:
    """Mean (float64) of the token row and its subword bucket rows."""
    if not 0 <= token_id < model.vocab_size:
        raise IndexError(f"token id {token_id} out of range")
    rows = model.comp_rows[model.comp_indptr[token_id]:model.comp_indptr[token_id + 1]]
    v = np.empty(model.dim, dtype=np.float64)
    _sgns.compose(model.input, rows, v)
    return v


def token_vector(model: EmbeddingModel, token: str) -> np.ndarray | None:
    """Composed vector for an in-vocabulary token, else None.

    None is the not-found signal; there is no OOV synthesis."""
    tid = model.vocab.token2id.get(token)
    if tid is None:
        return None
    return compose_input_vector(model, tid)


def train_pair(model: EmbeddingModel, center: int, context: int,
               label: int, lr: float) -> float:
    """One SGD step on a (center, context) pair; returns the loss term."""
    if not 0 <= center < model.vocab_size:
        raise IndexError(f"center id {center} out of range")
    if not 0 <= context < model.vocab_size:
        raise IndexError(f"context id {context} out of range")
    if label not in (0, 1):
        raise ValueError("label must be 0 or 1")
    rows = model.comp_rows[model.comp_indptr[center]:model.comp_indptr[center + 1]]
    v = np.empty(model.dim, dtype=np.float64)
    neu = np.empty(model.dim, dtype=np.float64)
    return float(_sgns.pair_update(model.input, model.output, rows, context,
                                   label, lr, v, neu))


def _encode_corpus(path: str | Path, vocab: Vocabulary):
    """Token file -> (flat int32 ids, int64 sentence offsets). Unknown
    tokens are dropped silently (they were pruned by min_count)."""
    t2i = vocab.token2id
    toks = array("i")
    offs = array("q", [0])
    for tokens in read_token_file(path):
        for t in tokens:
            i = t2i.get(t)
            if i is not None:
                toks.append(i)
        offs.append(len(toks))
    return (np.frombuffer(toks, dtype=np.int32).copy(),
            np.frombuffer(offs, dtype=np.int64).copy())


def _chunk_seeds(seed: int, epoch: int, worker: int) -> tuple[int, int]:
    ss = np.random.SeedSequence(entropy=seed & _SEED_MASK, spawn_key=(epoch, worker))
    dec, neg = ss.generate_state(2)
    return int(dec), int(neg)


def _assert_finite(model: EmbeddingModel) -> None:
    for m in (model.input, model.output):
        # min/max propagate NaN and expose infs without a temporary bool array
        assert np.isfinite(m.min()) and np.isfinite(m.max()), \
            "non-finite entries after epoch"


def train(corpus_path: str | Path, vocab: Vocabulary, config: TrainConfig,
          subword: SubwordConfig | None = None, *,
          neg_table_size: int | None = None,
          max_bytes: int = DEFAULT_MEMORY_CAP) -> EmbeddingModel:
    """Train on a token file (the ingest module's output format).

    Learning rate decays linearly from lr0 to lr0*1e-4 over the exact
    number of scheduled pairs, known ahead of time from a counting pass
    that replays the decision RNG without touching the matrices. With
    workers=1 and a fixed seed the result is bit-for-bit reproducible;
    multi-worker training is lock-free and tolerates lost updates.
    """
    if subword is None:
        subword = SubwordConfig()
    model = init_model(vocab, subword, config, max_bytes=max_bytes)
    if config.epochs == 0:
        return model

    toks, offs = _encode_corpus(corpus_path, vocab)
    discard = vocab.discard_probs(config.subsample_t)
    table = vocab.neg_table(neg_table_size)
    n_sents = len(offs) - 1
    workers = min(config.workers, max(n_sents, 1))
    bounds = np.linspace(0, n_sents, workers + 1).astype(np.int64)

    counts = np.zeros((config.epochs, workers), dtype=np.int64)
    for e in range(config.epochs):
        for w in range(workers):
            dseed, nseed = _chunk_seeds(config.seed, e, w)
            sched, _, _ = _sgns.run_chunk(
                model.input, model.output, model.comp_indptr, model.comp_rows,
                toks, offs, int(bounds[w]), int(bounds[w + 1]),
                discard, table, config.window, config.neg, config.lr0,
                0, 1, dseed, nseed, False)
            counts[e, w] = sched
    total = int(counts.sum())
    sched_total = max(total, 1)
    starts = np.concatenate(([0], np.cumsum(counts.reshape(-1))[:-1]))
    starts = starts.reshape(config.epochs, workers)

    for e in range(config.epochs):
        results: list[tuple[int, float, int] | None] = [None] * workers

        def chunk(w: int) -> None:
            dseed, nseed = _chunk_seeds(config.seed, e, w)
            results[w] = _sgns.run_chunk(
                model.input, model.output, model.comp_indptr, model.comp_rows,
                toks, offs, int(bounds[w]), int(bounds[w + 1]),
                discard, table, config.window, config.neg, config.lr0,
                int(starts[e, w]), sched_total, dseed, nseed, True)

        if workers == 1:
            chunk(0)
        else:
            threads = [threading.Thread(target=chunk, args=(w,)) for w in range(workers)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()

        loss_sum = 0.0
        loss_cnt = 0
        for w in range(workers):
            sched, ls, lc = results[w]
            assert sched == counts[e, w], "schedule drifted between passes"
            loss_sum += ls
            loss_cnt += lc
        _assert_finite(model)
        model.epoch_mean_loss.append(loss_sum / max(loss_cnt, 1))
    return model


# --- model file (binary, little-endian) ---

def save_model(model: EmbeddingModel, path: str | Path) -> None:
    vocab_block = model.vocab.to_tsv_bytes()
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<IIIII", model.vocab_size, model.subword.bucket,
                             model.dim, model.subword.minn, model.subword.maxn))
        fh.write(struct.pack("<Q", len(vocab_block)))
        fh.write(vocab_block)
        np.ascontiguousarray(model.input, dtype="<f4").tofile(fh)
        np.ascontiguousarray(model.output, dtype="<f4").tofile(fh)


def load_model(path: str | Path) -> EmbeddingModel:
    path = Path(path)
    if not path.exists():
        raise DataError(f"model file not found: {path}")
    with open(path, "rb") as fh:
        magic = fh.read(len(MODEL_MAGIC))
        if magic != MODEL_MAGIC:
            raise DataError(f"{path}: not a model file (bad magic)")
        head = fh.read(28)
        if len(head) != 28:
            raise DataError(f"{path}: truncated header")
        v, bucket, dim, minn, maxn = struct.unpack("<IIIII", head[:20])
        (vlen,) = struct.unpack("<Q", head[20:])
        vocab_block = fh.read(vlen)
        if len(vocab_block) != vlen:
            raise DataError(f"{path}: truncated vocabulary block")
        vocab = Vocabulary.from_tsv_bytes(vocab_block)
        if len(vocab) != v:
            raise DataError(f"{path}: header says V={v}, vocabulary has {len(vocab)}")
        inp = np.fromfile(fh, dtype="<f4", count=(v + bucket) * dim)
        if inp.size != (v + bucket) * dim:
            raise DataError(f"{path}: truncated input matrix")
        out = np.fromfile(fh, dtype="<f4", count=v * dim)
        if out.size != v * dim:
            raise DataError(f"{path}: truncated output matrix")
        if fh.read(1) != b"":
            raise DataError(f"{path}: trailing bytes after matrices")
    if dim < 1:
        raise DataError(f"{path}: header dim must be positive, got {dim}")
    try:
        subword = SubwordConfig(minn=minn, maxn=maxn, bucket=bucket)
    except ValueError as exc:
        raise DataError(f"{path}: bad subword header: {exc}") from None
    indptr, rows = _composition_arrays(vocab, subword)
    return EmbeddingModel(inp.reshape(v + bucket, dim), out.reshape(v, dim),
                          vocab, subword, dim, indptr, rows)
