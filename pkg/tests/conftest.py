import numpy as np
import pytest

from tagatlas.atlas import HashtagAtlas
from tagatlas.embed import SubwordConfig, TrainConfig, init_model
from tagatlas.vocab import Vocabulary, build_vocab


def make_vocab(pairs, total=None, min_count=1):
    """Vocabulary from (token, count) pairs already in descending-count order."""
    tokens = [t for t, _ in pairs]
    counts = np.array([c for _, c in pairs], dtype=np.int64)
    return Vocabulary(tokens=tokens, counts=counts,
                      total_tokens=total if total is not None else int(counts.sum()),
                      min_count=min_count)


def random_atlas(rng, n, dim):
    """Synthetic atlas with sorted generated tags and random vectors."""
    tags = [f"#t{i:06d}" for i in range(n)]
    vectors = rng.standard_normal((n, dim)).astype(np.float32)
    coords = rng.standard_normal((n, 2)).astype(np.float32)
    return HashtagAtlas(tags, vectors, coords)


@pytest.fixture
def tiny_model():
    """Small initialized model over a three-token vocabulary."""
    vocab = make_vocab([("aa", 5), ("bb", 4), ("#cc", 3)])
    return init_model(vocab, SubwordConfig(minn=3, maxn=4, bucket=50),
                      TrainConfig(dim=4, seed=3))


@pytest.fixture
def small_atlas():
    rng = np.random.default_rng(11)
    return random_atlas(rng, 30, 8)


def write_tokens(path, lines):
    path.write_text("\n".join(" ".join(t) for t in lines) + "\n", encoding="utf-8")


__all__ = ["make_vocab", "random_atlas", "write_tokens"]
