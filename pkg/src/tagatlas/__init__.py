"""Hashtag atlas toolkit: tweet ingestion, subword skip-gram embeddings,
t-SNE projection, and exact cosine neighbor search behind an HTTP service."""

__version__ = "0.1.0"

from .atlas import HashtagAtlas, load_atlas, save_atlas
from .embed import EmbeddingModel, TrainConfig, load_model, save_model, train
from .errors import DataError, UnknownHashtag
from .knn import NeighborResult, cosine, top_k
from .project import TsneConfig, build_atlas, run_tsne
from .vocab import SubwordConfig, Vocabulary, build_vocab

__all__ = [
    "DataError", "EmbeddingModel", "HashtagAtlas", "NeighborResult",
    "SubwordConfig", "TrainConfig", "TsneConfig", "UnknownHashtag",
    "Vocabulary", "build_atlas", "build_vocab", "cosine", "load_atlas",
    "load_model", "run_tsne", "save_atlas", "save_model", "top_k", "train",
]
