"""Synthetic dataset generation, IDX image ingestion, and CSV persistence.

All generators are pure functions of their parameters and a seed; the
random stream is numpy's PCG64, recorded in the dataset metadata so files
state how they were produced.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError, DomainError, FormatError

RNG_ALGORITHM = "pcg64"

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


@dataclass(frozen=True)
class Dataset:
    """Input vectors with one-hot labels.

    ``inputs`` has shape (D, M) and ``labels`` shape (D, N); every label row
    has exactly one entry equal to 1 and the rest 0.
    """

    inputs: np.ndarray
    labels: np.ndarray
    name: str = ""
    seed: int | None = None

    def __post_init__(self):
        x = np.array(self.inputs, dtype=float)
        l = np.array(self.labels, dtype=float)
        if x.ndim != 2 or l.ndim != 2:
            raise DimensionError("inputs and labels must be 2-d arrays")
        if x.shape[0] != l.shape[0]:
            raise DimensionError(
                f"{x.shape[0]} inputs but {l.shape[0]} labels"
            )
        if not np.all(np.isfinite(x)):
            raise DomainError("inputs must be finite")
        one_hot_ok = np.all(np.sum(l == 1.0, axis=1) == 1) and np.all(
            (l == 0.0) | (l == 1.0)
        )
        if l.shape[0] > 0 and not one_hot_ok:
            raise DomainError("labels must be one-hot rows")
        x.setflags(write=False)
        l.setflags(write=False)
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "labels", l)

    @property
    def n_points(self) -> int:
        return self.inputs.shape[0]

    @property
    def input_dim(self) -> int:
        return self.inputs.shape[1]

    @property
    def n_labels(self) -> int:
        return self.labels.shape[1]

    def label_indices(self) -> np.ndarray:
        """1-based label per point."""
        return np.argmax(self.labels, axis=1) + 1

    def subset(self, indices) -> "Dataset":
        return Dataset(
            inputs=self.inputs[indices],
            labels=self.labels[indices],
            name=self.name,
            seed=self.seed,
        )


def one_hot(label: int, n_labels: int) -> np.ndarray:
    """Indicator vector for a 1-based label."""
    if not 1 <= label <= n_labels:
        raise DomainError(f"label {label} out of range 1..{n_labels}")
    v = np.zeros(n_labels)
    v[label - 1] = 1.0
    return v


def shuffle_split(dataset: Dataset, n_first: int, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded shuffle followed by a split after ``n_first`` points."""
    if not 0 <= n_first <= dataset.n_points:
        raise ConfigError(f"split point {n_first} outside 0..{dataset.n_points}")
    perm = np.random.default_rng(seed).permutation(dataset.n_points)
    return dataset.subset(perm[:n_first]), dataset.subset(perm[n_first:])


# --- generators -----------------------------------------------------------

def default_centers(n_classes: int, radius: float = 2.0) -> np.ndarray:
    """Evenly spaced cluster centers on a circle, one per class."""
    if n_classes < 2:
        raise ConfigError(f"need at least 2 classes, got {n_classes}")
    angles = 2.0 * np.pi * np.arange(n_classes) / n_classes + np.pi / 2.0
    return radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)


def gen_blobs(n_per_class: int, centers, sigma: float, seed: int) -> Dataset:
    """Isotropic Gaussian clusters in the plane, one label per center."""
    c = np.asarray(centers, dtype=float)
    if c.ndim != 2 or c.shape[1] != 2:
        raise DimensionError("centers must be 2-d points")
    if c.shape[0] < 2:
        raise ConfigError("need at least 2 centers")
    if len({tuple(row) for row in c}) != c.shape[0]:
        raise ConfigError("centers must be pairwise distinct")
    if sigma < 0:
        raise ConfigError(f"sigma must be >= 0, got {sigma}")
    n_classes = c.shape[0]
    rng = np.random.default_rng(seed)
    inputs = []
    labels = []
    for i, center in enumerate(c):
        pts = center + sigma * rng.standard_normal((n_per_class, 2))
        inputs.append(pts)
        labels.append(np.tile(one_hot(i + 1, n_classes), (n_per_class, 1)))
    return Dataset(
        inputs=np.concatenate(inputs),
        labels=np.concatenate(labels),
        name=f"blobs{n_classes}",
        seed=seed,
    )


TWO_CLASS_KINDS = ("concentric_rings", "interleaved_arcs")


def gen_two_class(kind: str, n: int, noise: float, seed: int) -> Dataset:
    """Two classes in the plane that no line separates.

    ``concentric_rings``: class 1 on a circle of radius 1, class 2 on a
    circle of radius 2, with radial Gaussian noise.  ``interleaved_arcs``:
    two facing half-moon arcs.
    """
    if kind not in TWO_CLASS_KINDS:
        raise ConfigError(f"unknown two-class kind {kind!r}; options: {TWO_CLASS_KINDS}")
    if n < 2:
        raise ConfigError(f"need n >= 2 points, got {n}")
    rng = np.random.default_rng(seed)
    n1 = n // 2
    n2 = n - n1
    if kind == "concentric_rings":
        theta1 = rng.uniform(0.0, 2.0 * np.pi, n1)
        theta2 = rng.uniform(0.0, 2.0 * np.pi, n2)
        r1 = 1.0 + noise * rng.standard_normal(n1)
        r2 = 2.0 + noise * rng.standard_normal(n2)
        pts1 = np.stack([r1 * np.cos(theta1), r1 * np.sin(theta1)], axis=1)
        pts2 = np.stack([r2 * np.cos(theta2), r2 * np.sin(theta2)], axis=1)
    else:
        theta1 = rng.uniform(0.0, np.pi, n1)
        theta2 = rng.uniform(0.0, np.pi, n2)
        pts1 = np.stack([np.cos(theta1), np.sin(theta1)], axis=1)
        pts2 = np.stack([1.0 - np.cos(theta2), 0.5 - np.sin(theta2)], axis=1)
        pts1 = pts1 + noise * rng.standard_normal(pts1.shape)
        pts2 = pts2 + noise * rng.standard_normal(pts2.shape)
    inputs = np.concatenate([pts1, pts2])
    labels = np.concatenate(
        [np.tile(one_hot(1, 2), (n1, 1)), np.tile(one_hot(2, 2), (n2, 1))]
    )
    return Dataset(inputs=inputs, labels=labels, name=kind, seed=seed)


# Coarse 5x7 glyph per digit, used by the synthetic image generator.
_DIGIT_GLYPHS = [
    ["01110", "10001", "10011", "10101", "11001", "10001", "01110"],  # 0
    ["00100", "01100", "00100", "00100", "00100", "00100", "01110"],  # 1
    ["01110", "10001", "00001", "00110", "01000", "10000", "11111"],  # 2
    ["01110", "10001", "00001", "00110", "00001", "10001", "01110"],  # 3
    ["00010", "00110", "01010", "10010", "11111", "00010", "00010"],  # 4
    ["11111", "10000", "11110", "00001", "00001", "10001", "01110"],  # 5
    ["01110", "10000", "10000", "11110", "10001", "10001", "01110"],  # 6
    ["11111", "00001", "00010", "00100", "01000", "01000", "01000"],  # 7
    ["01110", "10001", "10001", "01110", "10001", "10001", "01110"],  # 8
    ["01110", "10001", "10001", "01111", "00001", "00001", "01110"],  # 9
]


def gen_digit_images(n: int, seed: int, side: int = 28) -> tuple[np.ndarray, np.ndarray]:
    """Synthetic digit images: upscaled glyphs with random shift, intensity,
    and pixel noise.  Returns uint8 images (n, side, side) and labels (n,)
    in 0..9, suitable for writing in the IDX format.
    """
    if side < 16:
        raise ConfigError(f"side must be >= 16, got {side}")
    rng = np.random.default_rng(seed)
    glyphs = np.array(
        [[[int(ch) for ch in row] for row in g] for g in _DIGIT_GLYPHS], dtype=float
    )
    scale = (side - 8) // 7
    images = np.zeros((n, side, side), dtype=np.uint8)
    digits = rng.integers(0, 10, n)
    for i, d in enumerate(digits):
        big = np.kron(glyphs[d], np.ones((scale, scale)))
        h, w = big.shape
        dy = (side - h) // 2 + int(rng.integers(-2, 3))
        dx = (side - w) // 2 + int(rng.integers(-2, 3))
        canvas = np.zeros((side, side))
        canvas[dy : dy + h, dx : dx + w] = big * rng.uniform(0.6, 1.0)
        canvas += 0.08 * rng.random((side, side))
        images[i] = np.clip(canvas * 255.0, 0, 255).astype(np.uint8)
    return images, digits.astype(np.uint8)


def images_to_dataset(
    images: np.ndarray, digits: np.ndarray, name: str = "digits", seed: int | None = None
) -> Dataset:
    """Scale uint8 images to [0, 1] rows and map digit d to label d+1."""
    imgs = np.asarray(images)
    labs = np.asarray(digits)
    if imgs.ndim != 3:
        raise DimensionError("images must have shape (count, rows, cols)")
    if labs.shape != (imgs.shape[0],):
        raise DimensionError(
            f"{imgs.shape[0]} images but {labs.shape[0] if labs.ndim else 0} labels"
        )
    flat = imgs.reshape(imgs.shape[0], -1).astype(float) / 255.0
    onehots = np.zeros((labs.shape[0], 10))
    if np.any((labs < 0) | (labs > 9)):
        raise DomainError("digit labels must lie in 0..9")
    onehots[np.arange(labs.shape[0]), labs.astype(int)] = 1.0
    return Dataset(inputs=flat, labels=onehots, name=name, seed=seed)


# --- IDX binary format ----------------------------------------------------

def _read_be32(data: bytes, offset: int, path: str) -> int:
    if offset + 4 > len(data):
        raise FormatError(
            f"{path}: truncated header at byte offset {offset}", location=offset
        )
    return struct.unpack(">I", data[offset : offset + 4])[0]


def read_idx_images(path) -> np.ndarray:
    """Parse an IDX image file into a uint8 array (count, rows, cols)."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic = _read_be32(data, 0, str(path))
    if magic != IDX_IMAGE_MAGIC:
        raise FormatError(
            f"{path}: bad image magic 0x{magic:08x} at byte offset 0", location=0
        )
    count = _read_be32(data, 4, str(path))
    rows = _read_be32(data, 8, str(path))
    cols = _read_be32(data, 12, str(path))
    expected = 16 + count * rows * cols
    if len(data) != expected:
        raise FormatError(
            f"{path}: expected {expected} bytes for {count} images of "
            f"{rows}x{cols}, found {len(data)}",
            location=min(len(data), expected),
        )
    return np.frombuffer(data, dtype=np.uint8, offset=16).reshape(count, rows, cols)


def read_idx_labels(path) -> np.ndarray:
    """Parse an IDX label file into a uint8 vector."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic = _read_be32(data, 0, str(path))
    if magic != IDX_LABEL_MAGIC:
        raise FormatError(
            f"{path}: bad label magic 0x{magic:08x} at byte offset 0", location=0
        )
    count = _read_be32(data, 4, str(path))
    expected = 8 + count
    if len(data) != expected:
        raise FormatError(
            f"{path}: expected {expected} bytes for {count} labels, found {len(data)}",
            location=min(len(data), expected),
        )
    return np.frombuffer(data, dtype=np.uint8, offset=8)


def write_idx_images(images: np.ndarray, path) -> None:
    imgs = np.ascontiguousarray(images, dtype=np.uint8)
    if imgs.ndim != 3:
        raise DimensionError("images must have shape (count, rows, cols)")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", IDX_IMAGE_MAGIC, *imgs.shape))
        fh.write(imgs.tobytes())


def write_idx_labels(labels: np.ndarray, path) -> None:
    labs = np.ascontiguousarray(labels, dtype=np.uint8)
    if labs.ndim != 1:
        raise DimensionError("labels must be a vector")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">II", IDX_LABEL_MAGIC, labs.shape[0]))
        fh.write(labs.tobytes())


def load_idx(images_path, labels_path) -> Dataset:
    """Load paired IDX image/label files into a dataset.

    Pixels are scaled to [0, 1]; digit d maps to 1-based label d+1 with
    N = 10 classes.
    """
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise FormatError(
            f"image count {images.shape[0]} does not match label count {labels.shape[0]}"
        )
    return images_to_dataset(images, labels, name="idx")


# --- CSV persistence -------------------------------------------------------

def save_csv(dataset: Dataset, path) -> None:
    """Write ``x_1,...,x_M,label`` rows under a two-line metadata header."""
    meta = {
        "name": dataset.name,
        "M": dataset.input_dim,
        "N": dataset.n_labels,
        "D": dataset.n_points,
        "seed": dataset.seed,
        "rng": RNG_ALGORITHM,
    }
    labels = dataset.label_indices()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + json.dumps(meta) + "\n")
        fh.write(",".join(f"x_{i + 1}" for i in range(dataset.input_dim)) + ",label\n")
        for row, lab in zip(dataset.inputs, labels):
            fh.write(",".join(f"{v:.17g}" for v in row) + f",{lab}\n")


def load_csv(path) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if len(lines) < 2 or not lines[0].startswith("# "):
        raise FormatError(f"{path}: missing metadata header on line 1", location=1)
    try:
        meta = json.loads(lines[0][2:])
        m = int(meta["M"])
        n_labels = int(meta["N"])
        n_points = int(meta["D"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: bad metadata header: {exc}", location=1) from exc
    data_lines = lines[2:]
    if len(data_lines) != n_points:
        raise FormatError(
            f"{path}: header declares D={n_points} but found {len(data_lines)} rows",
            location=len(lines),
        )
    inputs = np.empty((n_points, m))
    labels = np.zeros((n_points, n_labels))
    for i, line in enumerate(data_lines):
        lineno = i + 3
        parts = line.split(",")
        if len(parts) != m + 1:
            raise FormatError(
                f"{path}: expected {m + 1} columns on line {lineno}, got {len(parts)}",
                location=lineno,
            )
        try:
            inputs[i] = [float(v) for v in parts[:m]]
            lab = int(parts[m])
        except ValueError as exc:
            raise FormatError(
                f"{path}: bad value on line {lineno}: {exc}", location=lineno
            ) from exc
        if not 1 <= lab <= n_labels:
            raise FormatError(
                f"{path}: label {lab} out of range 1..{n_labels} on line {lineno}",
                location=lineno,
            )
        labels[i, lab - 1] = 1.0
    seed = meta.get("seed")
    return Dataset(
        inputs=inputs,
        labels=labels,
        name=str(meta.get("name", "")),
        seed=None if seed is None else int(seed),
    )
