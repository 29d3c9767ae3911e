"""Synthetic dataset generators and on-disk formats (CSV, IDX)."""

from __future__ import annotations

import csv
import struct

import numpy as np

from .core import Dataset, Sample
from .exceptions import ConfigError

IDX_MAGIC_IMAGES = 0x00000803
IDX_MAGIC_LABELS = 0x00000801


def make_synthetic(kind: str, n: int, noise: float, seed: int) -> Dataset:
    """Two-class 2-d toy data, rescaled into the [0,1]^2 domain box.

    Deterministic for a fixed seed. Class counts differ by at most one.
    """
    if n < 2:
        raise ConfigError("need n >= 2")
    rng = np.random.default_rng(seed)
    n0 = (n + 1) // 2
    n1 = n - n0
    if kind == "two_moons":
        t0 = rng.uniform(0.0, np.pi, n0)
        t1 = rng.uniform(0.0, np.pi, n1)
        pts0 = np.stack([np.cos(t0), np.sin(t0)], axis=1)
        pts1 = np.stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)], axis=1)
        pts = np.concatenate([pts0, pts1])
        pts += rng.normal(0.0, 1.0, pts.shape) * noise
        # nominal moon bounding box is [-1,2] x [-0.5,1]; fixed affine, then clip
        pts[:, 0] = (pts[:, 0] + 1.0) / 3.0
        pts[:, 1] = (pts[:, 1] + 0.5) / 1.5
    elif kind == "gauss_blobs":
        centers = np.array([[0.25, 0.25], [0.75, 0.75]])
        pts = np.concatenate([
            centers[0] + rng.normal(0.0, 1.0, (n0, 2)) * noise,
            centers[1] + rng.normal(0.0, 1.0, (n1, 2)) * noise,
        ])
    else:
        raise ConfigError(f"unknown synthetic kind {kind!r}")
    pts = np.clip(pts, 0.0, 1.0)
    labels = np.concatenate([np.zeros(n0, dtype=int), np.ones(n1, dtype=int)])
    samples = [Sample(pts[i], int(labels[i])) for i in range(n)]
    return Dataset(samples, dim=2, num_classes=2, domain_box=(0.0, 1.0))


def flip_labels(data: Dataset, fraction: float, seed: int) -> Dataset:
    """Relabel a random fraction of samples uniformly among the other classes."""
    rng = np.random.default_rng(seed)
    n_flip = int(round(fraction * len(data)))
    idx = rng.choice(len(data), size=n_flip, replace=False)
    samples = list(data.samples)
    for i in idx:
        offset = int(rng.integers(1, data.num_classes))
        samples[i] = Sample(samples[i].x, (samples[i].y + offset) % data.num_classes)
    return Dataset(samples, data.dim, data.num_classes, data.domain_box)


def write_csv(data: Dataset, path):
    """Header f0,...,f{dim-1},label; doubles in decimal, label as integer."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"f{i}" for i in range(data.dim)] + ["label"])
        for s in data.samples:
            w.writerow([repr(float(v)) for v in s.x] + [s.y])


def read_csv(path, num_classes=None, domain_box=(0.0, 1.0)) -> Dataset:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigError(f"{path}: empty CSV")
    header = rows[0]
    if header[-1] != "label" or not all(
            h == f"f{i}" for i, h in enumerate(header[:-1])):
        raise ConfigError(f"{path}: bad CSV header {header}")
    dim = len(header) - 1
    samples = []
    for row in rows[1:]:
        if len(row) != dim + 1:
            raise ConfigError(f"{path}: row has {len(row)} fields, expected {dim + 1}")
        samples.append(Sample(np.array([float(v) for v in row[:dim]]), int(row[dim])))
    if num_classes is None:
        num_classes = max(s.y for s in samples) + 1
    return Dataset(samples, dim, num_classes, domain_box)


def _read_idx(path, expected_magic):
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, = struct.unpack(">I", raw[:4])
    if magic != expected_magic:
        raise ConfigError(f"{path}: bad IDX magic {magic:#010x}")
    ndim = magic & 0xFF
    dims = struct.unpack(f">{ndim}I", raw[4:4 + 4 * ndim])
    data = np.frombuffer(raw[4 + 4 * ndim:], dtype=np.uint8)
    if data.size != int(np.prod(dims)):
        raise ConfigError(f"{path}: IDX payload size mismatch")
    return data.reshape(dims)


def read_idx_dataset(images_path, labels_path, limit=None,
                     num_classes=10) -> Dataset:
    """MNIST-style IDX pair; pixel bytes rescaled to [0,1]."""
    images = _read_idx(images_path, IDX_MAGIC_IMAGES)
    labels = _read_idx(labels_path, IDX_MAGIC_LABELS)
    if images.shape[0] != labels.shape[0]:
        raise ConfigError("IDX image/label counts differ")
    n = images.shape[0] if limit is None else min(limit, images.shape[0])
    dim = int(np.prod(images.shape[1:]))
    samples = [
        Sample(images[i].reshape(dim).astype(float) / 255.0, int(labels[i]))
        for i in range(n)
    ]
    return Dataset(samples, dim, num_classes, (0.0, 1.0))
