"""Dataset ingestion: IDX container parsing and a synthetic stand-in.

The synthetic generator renders seeded Gaussian blobs to 28x28 grayscale
images so the whole suite runs without downloading MNIST; real IDX files
(optionally gzipped) are parsed bit-exactly when available.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


class IdxError(ValueError):
    """Base error for malformed IDX files."""


class WrongMagicError(IdxError):
    pass


class TruncatedError(IdxError):
    pass


class CountMismatchError(IdxError):
    pass


@dataclass(frozen=True)
class LabeledDataset:
    """Grayscale images (N, H, W) as bytes 0-255 with integer labels 0-9."""

    images: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if self.images.ndim != 3:
            raise ValueError(f"images must be (N, H, W), got shape {self.images.shape}")
        if self.images.dtype != np.uint8:
            raise ValueError(f"images must be uint8, got {self.images.dtype}")
        if len(self.images) != len(self.labels):
            raise CountMismatchError(
                f"{len(self.images)} images but {len(self.labels)} labels"
            )
        if len(self.labels) and not (
            (self.labels >= 0).all() and (self.labels <= 9).all()
        ):
            raise ValueError("labels must be in [0, 9]")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def num_pixels(self) -> int:
        return int(self.images.shape[1] * self.images.shape[2])

    def flat_float(self) -> np.ndarray:
        """Images flattened to (N, H*W) floats in [0, 1]."""
        return self.images.reshape(len(self), -1).astype(np.float64) / 255.0

    def subset(self, n: int) -> "LabeledDataset":
        return LabeledDataset(self.images[:n], self.labels[:n])

    def class_frequency(self, label: int) -> float:
        if len(self) == 0:
            raise ValueError("empty dataset has no class frequencies")
        return float(np.mean(self.labels == label))


def _read_bytes(path) -> bytes:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as fh:
            return fh.read()
    return path.read_bytes()


def _parse_idx(data: bytes, path, expected_magic: int, expected_dims: int):
    header = 4 + 4 * expected_dims
    if len(data) < header:
        raise TruncatedError(f"{path}: shorter than its {header}-byte header")
    magic = struct.unpack(">i", data[:4])[0]
    if magic != expected_magic:
        raise WrongMagicError(
            f"{path}: wrong magic 0x{magic:08x}, expected 0x{expected_magic:08x}"
        )
    dims = struct.unpack(f">{expected_dims}i", data[4:header])
    payload = int(np.prod(dims))
    if len(data) - header < payload:
        raise TruncatedError(
            f"{path}: payload has {len(data) - header} bytes, expected {payload}"
        )
    body = np.frombuffer(data[header : header + payload], dtype=np.uint8)
    return dims, body


def load_idx(image_path, label_path) -> LabeledDataset:
    """Parse a big-endian IDX image/label file pair."""
    (n_img, h, w), pixels = _parse_idx(
        _read_bytes(image_path), image_path, IDX_IMAGE_MAGIC, 3
    )
    (n_lbl,), labels = _parse_idx(_read_bytes(label_path), label_path, IDX_LABEL_MAGIC, 1)
    if n_img != n_lbl:
        raise CountMismatchError(f"{n_img} images but {n_lbl} labels")
    images = pixels.reshape(n_img, h, w)
    return LabeledDataset(images=images, labels=labels.astype(np.int64))


def load_idx_pair(train_images, train_labels, test_images, test_labels):
    return load_idx(train_images, train_labels), load_idx(test_images, test_labels)


def synthetic_blobs(
    n: int,
    classes: int = 10,
    size: int = 28,
    seed: int = 0,
    template_seed: int = 2718,
    blobs_per_class: int = 3,
    center_jitter: float = 1.2,
    amplitude_jitter: float = 0.25,
    pixel_noise: float = 12.0,
    sigma_min_frac: float = 0.08,
    sigma_max_frac: float = 0.16,
    weak_fraction: float = 0.0,
    weak_gain: float = 0.35,
) -> LabeledDataset:
    """Render Gaussian class blobs to grayscale images.

    Each class owns a fixed arrangement of blobs drawn from
    ``template_seed`` (shared between train and test splits); ``seed``
    drives the per-sample draw, which jitters blob centers and amplitudes
    and adds pixel noise, so the task is learnable to high but not perfect
    accuracy. A ``weak_fraction`` of samples is rendered at ``weak_gain``
    amplitude, concentrating probability mass near the decision boundary
    the way harder natural datasets do.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if not 1 <= classes <= 10:
        raise ValueError("classes must be in [1, 10]")
    trng = np.random.default_rng(template_seed)
    margin = size * 0.18
    centers = trng.uniform(margin, size - margin, size=(classes, blobs_per_class, 2))
    sigmas = trng.uniform(size * sigma_min_frac, size * sigma_max_frac,
                          size=(classes, blobs_per_class))
    amps = trng.uniform(150.0, 235.0, size=(classes, blobs_per_class))

    rng = np.random.default_rng(seed)
    labels = rng.integers(0, classes, size=n)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    images = np.empty((n, size, size), dtype=np.uint8)
    for i, c in enumerate(labels):
        img = np.zeros((size, size), dtype=np.float64)
        jitter = rng.normal(0.0, center_jitter, size=(blobs_per_class, 2))
        gains = 1.0 + rng.normal(0.0, amplitude_jitter, size=blobs_per_class)
        weak = weak_fraction > 0 and rng.uniform() < weak_fraction
        if weak:
            gains = gains * weak_gain
        for b in range(blobs_per_class):
            cy, cx = centers[c, b] + jitter[b]
            r2 = (yy - cy) ** 2 + (xx - cx) ** 2
            img += amps[c, b] * gains[b] * np.exp(-r2 / (2.0 * sigmas[c, b] ** 2))
        img += rng.normal(0.0, pixel_noise, size=img.shape)
        images[i] = np.clip(img, 0.0, 255.0).astype(np.uint8)
    return LabeledDataset(images=images, labels=labels.astype(np.int64))
