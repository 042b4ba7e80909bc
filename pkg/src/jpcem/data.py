"""Datasets: synthetic multi-view subspaces, graymap ingestion, random splits.

Random streams come from ``numpy.random.Generator`` with the PCG64 bit
generator seeded by ``numpy.random.default_rng(seed)``.
"""
import csv
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .exceptions import CountError, IngestionError, InvalidConfigError

RNG_ALGORITHM = "numpy.random.PCG64 via default_rng(seed)"
PATCH_WIDTH = 40
PATCH_HEIGHT = 20
MANIFEST_FIELDS = ("path", "class", "view", "role")


@dataclass
class Sample:
    vector: np.ndarray
    class_id: object
    view_id: object
    role: str = "train"
    source: str = "synthetic"


@dataclass(frozen=True)
class SynthConfig:
    num_classes: int = 5
    num_views: int = 5
    ambient_dim: int = 200
    subspace_dim: int = 4
    train_per_view_per_class: int = 5
    test_per_view_per_class: int = 20
    noise_std: float = 0.05
    seed: int = 0

    def validate(self):
        counts = (self.num_classes, self.num_views, self.ambient_dim,
                  self.subspace_dim, self.train_per_view_per_class,
                  self.test_per_view_per_class)
        if min(counts) < 1:
            raise InvalidConfigError(f"all counts must be >= 1: {self}")
        if self.subspace_dim > self.ambient_dim:
            raise InvalidConfigError(f"subspace_dim {self.subspace_dim} exceeds "
                                     f"ambient_dim {self.ambient_dim}")
        if not self.noise_std >= 0:
            raise InvalidConfigError("noise_std must be >= 0")


@dataclass
class DatasetManifest:
    entries: list
    image_width: int = PATCH_WIDTH
    image_height: int = PATCH_HEIGHT


def random_orthonormal_basis(rng, dim, rank):
    q, r = np.linalg.qr(rng.standard_normal((dim, rank)))
    return q * np.where(np.diag(r) < 0, -1.0, 1.0)


def synth_generate(config):
    """Draw train and test samples from per-(class, view) random subspaces.

    Each (class, view) pair owns a random orthonormal basis. A sample is a
    nonnegative combination of the basis with unit-norm coefficients, plus
    isotropic Gaussian noise, clipped to [-1, 1]; noiseless samples therefore
    have unit norm and lie exactly in their subspace.

    Returns ``(train, test)`` lists of :class:`Sample`. Class and view ids are
    1-based integers.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    train, test = [], []
    for c in range(1, config.num_classes + 1):
        for v in range(1, config.num_views + 1):
            basis = random_orthonormal_basis(rng, config.ambient_dim,
                                             config.subspace_dim)
            for role, count, out in (("train", config.train_per_view_per_class, train),
                                     ("test", config.test_per_view_per_class, test)):
                coef = np.abs(rng.standard_normal((config.subspace_dim, count)))
                coef /= np.linalg.norm(coef, axis=0)
                vecs = basis @ coef
                if config.noise_std > 0:
                    vecs = vecs + config.noise_std * rng.standard_normal(vecs.shape)
                vecs = np.clip(vecs, -1.0, 1.0)
                out.extend(Sample(vecs[:, j].copy(), c, v, role) for j in range(count))
    return train, test


def group_by_class_view(samples):
    """Ordered ``{(class, view): [samples]}`` keeping first-appearance order."""
    groups = {}
    for s in samples:
        groups.setdefault((s.class_id, s.view_id), []).append(s)
    return groups


def split_random(samples, train_count, test_count, seed):
    """Seeded split drawn independently inside every (class, view) group.

    Within a group, a uniform permutation picks ``train_count`` training
    samples first and ``test_count`` test samples from the remainder.
    """
    rng = np.random.default_rng(seed)
    train, test = [], []
    for (c, v), group in group_by_class_view(samples).items():
        if train_count + test_count > len(group):
            raise CountError(f"(class {c!r}, view {v!r}) has {len(group)} samples, "
                             f"{train_count} train + {test_count} test requested")
        perm = rng.permutation(len(group))
        train.extend(_with_role(group[i], "train") for i in perm[:train_count])
        test.extend(_with_role(group[i], "test")
                    for i in perm[train_count:train_count + test_count])
    return train, test


def _with_role(sample, role):
    return Sample(sample.vector, sample.class_id, sample.view_id, role, sample.source)


def _parse_label(text):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return text


def load_manifest(path, image_width=PATCH_WIDTH, image_height=PATCH_HEIGHT):
    """Read a ``path,class,view,role`` CSV. Relative image paths resolve
    against the manifest's directory."""
    base = os.path.dirname(os.path.abspath(path))
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or set(MANIFEST_FIELDS) - set(reader.fieldnames):
                raise IngestionError(f"{path}: header must contain "
                                     f"{','.join(MANIFEST_FIELDS)}")
            entries, seen = [], set()
            for lineno, row in enumerate(reader, start=2):
                role = row["role"].strip().lower()
                if role not in ("train", "test"):
                    raise IngestionError(f"{path}:{lineno}: role must be train or "
                                         f"test, got {row['role']!r}")
                img = row["path"].strip()
                if not os.path.isabs(img):
                    img = os.path.join(base, img)
                if img in seen:
                    raise IngestionError(f"{path}:{lineno}: duplicate path {img}")
                seen.add(img)
                entries.append((img, _parse_label(row["class"]),
                                _parse_label(row["view"]), role))
    except OSError as exc:
        if isinstance(exc, IngestionError):
            raise
        raise IngestionError(f"{path}: cannot read manifest ({exc})") from exc
    pairs = {(c, v) for _, c, v, role in entries if role == "train"}
    missing = {(c, v) for _, c, v, _ in entries} - pairs
    if not entries or missing:
        raise IngestionError(f"{path}: no train entry for (class, view) pairs "
                             f"{sorted(missing, key=str) or 'any'}")
    return DatasetManifest(entries, image_width, image_height)


def load_image(path, width=PATCH_WIDTH, height=PATCH_HEIGHT):
    """8-bit grayscale image -> row-major vector in [0, 1] of length width*height."""
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode != "L":
                raise IngestionError(f"{path}: expected 8-bit grayscale, got mode "
                                     f"{img.mode}")
            if img.size != (width, height):
                img = img.resize((width, height), Image.BILINEAR)
            arr = np.asarray(img, dtype=float)
    except (OSError, ValueError, SyntaxError) as exc:
        if isinstance(exc, IngestionError):
            raise
        raise IngestionError(f"{path}: cannot read image ({exc})") from exc
    return arr.reshape(-1) / 255.0


def load_samples(manifest):
    return [Sample(load_image(p, manifest.image_width, manifest.image_height),
                   c, v, role, p)
            for p, c, v, role in manifest.entries]


def save_pgm(path, vector, width, height, offset=0.0, scale=1.0):
    """Write ``(vector + offset) * scale`` quantized to an 8-bit graymap."""
    arr = (np.asarray(vector, dtype=float).reshape(height, width) + offset) * scale
    pixels = np.clip(np.rint(arr * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(pixels).save(path, format="PPM")


def export_dataset(samples, directory, width, height, offset=1.0, scale=0.5):
    """Write samples as graymaps plus ``manifest.csv``; returns the manifest path.

    Synthetic vectors live in [-1, 1], so the default maps them affinely onto
    [0, 1] before 8-bit quantization.
    """
    os.makedirs(directory, exist_ok=True)
    manifest_path = os.path.join(directory, "manifest.csv")
    counters = {}
    with open(manifest_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_FIELDS)
        for s in samples:
            key = (s.class_id, s.view_id, s.role)
            n = counters[key] = counters.get(key, 0) + 1
            name = f"c{s.class_id}_v{s.view_id}_{s.role}_{n:04d}.pgm"
            save_pgm(os.path.join(directory, name), s.vector, width, height,
                     offset, scale)
            writer.writerow((name, s.class_id, s.view_id, s.role))
    return manifest_path
