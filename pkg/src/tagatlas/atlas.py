"""Hashtag atlas: tags with their embedding vectors and 2D coordinates.

The on-disk form is a UTF-8 TSV with header `#atlas v1 <N> <dim>` and one
`tag \\t x \\t y \\t v1,v2,...` line per hashtag. Reals are printed with 9
significant digits, which round-trips float32 exactly, so save followed by
load reproduces the arrays bit for bit; everything is stored as float32 to
keep that property.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import DataError

ATLAS_VERSION = "v1"


@dataclass
class HashtagAtlas:
    tags: list[str]            # lexicographically sorted, each starts with '#'
    vectors: np.ndarray        # (N, dim) float32, embedding space
    coords: np.ndarray         # (N, 2) float32, projection

    def __post_init__(self):
        n = len(self.tags)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != n:
            raise ValueError(f"vectors shape {self.vectors.shape} does not match {n} tags")
        if self.coords.shape != (n, 2):
            raise ValueError(f"coords shape {self.coords.shape}, expected ({n}, 2)")
        if any(not t.startswith("#") for t in self.tags):
            raise ValueError("every atlas tag must start with '#'")
        if any(self.tags[i] >= self.tags[i + 1] for i in range(n - 1)):
            raise ValueError("atlas tags must be strictly sorted")
        if not np.isfinite(self.coords).all() or not np.isfinite(self.vectors).all():
            raise ValueError("atlas arrays must be finite")

    def __len__(self) -> int:
        return len(self.tags)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @cached_property
    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.tags)}

    @cached_property
    def norms(self) -> np.ndarray:
        # same accumulation as the query-time kernel, so cached norms are
        # interchangeable with freshly computed ones
        from .knn import row_norms
        return row_norms(self.vectors)


def save_atlas(atlas: HashtagAtlas, path: str | Path) -> None:
    n, dim = atlas.vectors.shape
    vec_strs = np.char.mod("%.9g", atlas.vectors.astype(np.float64))
    xy_strs = np.char.mod("%.9g", atlas.coords.astype(np.float64))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#atlas {ATLAS_VERSION} {n} {dim}\n")
        for i, tag in enumerate(atlas.tags):
            fh.write(f"{tag}\t{xy_strs[i, 0]}\t{xy_strs[i, 1]}\t" + ",".join(vec_strs[i]) + "\n")


def load_atlas(path: str | Path) -> HashtagAtlas:
    path = Path(path)
    if not path.exists():
        raise DataError(f"atlas file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != "#atlas" or header[1] != ATLAS_VERSION:
            raise DataError(f"{path}: not an atlas file (bad header)")
        try:
            n, dim = int(header[2]), int(header[3])
        except ValueError:
            raise DataError(f"{path}: non-numeric atlas header counts") from None
        if n < 1 or dim < 1:
            raise DataError(f"{path}: atlas must have at least one tag and one dimension")
        try:
            body = pd.read_csv(fh, sep="\t", header=None,
                               names=["tag", "x", "y", "vec"], dtype=str,
                               quoting=csv.QUOTE_NONE, na_filter=False)
        except pd.errors.EmptyDataError:
            raise DataError(f"{path}: header promises {n} rows, file has none") from None
        except pd.errors.ParserError as exc:
            raise DataError(f"{path}: malformed atlas line: {exc}") from None
    if len(body) != n:
        raise DataError(f"{path}: header promises {n} rows, found {len(body)}")
    try:
        coords = np.stack([body["x"].to_numpy(dtype=np.float32),
                           body["y"].to_numpy(dtype=np.float32)], axis=1)
        vectors = pd.read_csv(io.StringIO("\n".join(body["vec"])), sep=",",
                              header=None, dtype=np.float32).to_numpy()
    except (ValueError, pd.errors.ParserError) as exc:
        raise DataError(f"{path}: non-numeric atlas value: {exc}") from None
    if vectors.shape != (n, dim):
        raise DataError(f"{path}: vector block is {vectors.shape}, header says ({n}, {dim})")
    try:
        return HashtagAtlas(body["tag"].tolist(), vectors, coords)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
