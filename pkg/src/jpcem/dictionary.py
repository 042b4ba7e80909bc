"""Structured training dictionary.

Columns are vectorized training samples grouped into contiguous class
blocks, and within each class into contiguous view sub-blocks::

    D = [D_1, ..., D_C],   D_c = [D_c^1, ..., D_c^M]

Class and view labels are opaque; their dense order is the order of first
appearance in the input.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import (DegenerateSampleError, DimensionError,
                         EmptyDictionaryError, InvalidClassError)


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Column-normalized dictionary with class/view block index.

    Attributes
    ----------
    data : ndarray, shape (d, K)
        Unit-norm columns.
    labels : tuple
        Class labels in block order.
    views : tuple
        View labels in sub-block order (shared by every class).
    class_blocks : dict
        ``label -> (start, stop)`` column range.
    view_blocks : dict
        ``label -> [(start, stop), ...]`` one range per view, in view order.
    """
    data: np.ndarray
    labels: tuple
    views: tuple
    class_blocks: dict
    view_blocks: dict
    column_class: np.ndarray = field(repr=False)
    column_view: np.ndarray = field(repr=False)

    @property
    def shape(self):
        return self.data.shape

    @property
    def n_features(self):
        return self.data.shape[0]

    @property
    def n_atoms(self):
        return self.data.shape[1]

    @property
    def n_classes(self):
        return len(self.labels)

    @property
    def n_views(self):
        return len(self.views)

    @cached_property
    def gram(self):
        """D^T D, computed once and shared by every solve on this dictionary."""
        g = self.data.T @ self.data
        g.setflags(write=False)
        return g

    def class_index(self, c):
        try:
            return self.labels.index(c)
        except ValueError:
            raise InvalidClassError(f"unknown class {c!r}; known classes: "
                                    f"{list(self.labels)}") from None

    def block(self, c):
        """Column slice of class ``c``."""
        self.class_index(c)
        start, stop = self.class_blocks[c]
        return slice(start, stop)

    def view_widths(self, c):
        """Per-view atom counts t_m for class ``c``."""
        self.class_index(c)
        return [stop - start for start, stop in self.view_blocks[c]]

    def delta(self, x, c):
        return delta_c(x, c, self)


def build_dictionary(samples):
    """Build a :class:`Dictionary` from ``(class_id, view_id, vector)`` triples.

    Columns are ordered by class, then view, then insertion order, and each is
    scaled to unit Euclidean norm. Every class must have at least one sample
    for every view that appears anywhere in the input.
    """
    samples = list(samples)
    if not samples:
        raise EmptyDictionaryError("cannot build a dictionary from no samples")

    d = None
    labels, views = [], []
    groups = {}
    for n, (c, v, vec) in enumerate(samples):
        vec = np.asarray(vec, dtype=float).ravel()
        if d is None:
            d = vec.size
            if d < 1:
                raise DimensionError("sample vectors must have length >= 1")
        elif vec.size != d:
            raise DimensionError(f"sample {n} (class {c!r}, view {v!r}) has "
                                 f"length {vec.size}, expected {d}")
        if not np.all(np.isfinite(vec)):
            raise DegenerateSampleError(f"sample {n} (class {c!r}, view {v!r}) "
                                        "has non-finite entries")
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise DegenerateSampleError(f"sample {n} (class {c!r}, view {v!r}) "
                                        "is an all-zero vector")
        if c not in labels:
            labels.append(c)
        if v not in views:
            views.append(v)
        groups.setdefault((c, v), []).append(vec / norm)

    missing = [(c, v) for c in labels for v in views if (c, v) not in groups]
    if missing:
        raise EmptyDictionaryError(f"no training samples for (class, view) "
                                   f"pairs {missing}")

    columns, col_class, col_view = [], [], []
    class_blocks, view_blocks = {}, {}
    pos = 0
    for ci, c in enumerate(labels):
        start = pos
        ranges = []
        for vi, v in enumerate(views):
            group = groups[(c, v)]
            ranges.append((pos, pos + len(group)))
            columns.extend(group)
            col_class.extend([ci] * len(group))
            col_view.extend([vi] * len(group))
            pos += len(group)
        class_blocks[c] = (start, pos)
        view_blocks[c] = ranges

    data = np.column_stack(columns)
    data.setflags(write=False)
    return Dictionary(data=data, labels=tuple(labels), views=tuple(views),
                      class_blocks=class_blocks, view_blocks=view_blocks,
                      column_class=np.asarray(col_class, dtype=np.intp),
                      column_view=np.asarray(col_view, dtype=np.intp))


def delta_c(x, c, dictionary):
    """Copy of ``x`` with every entry outside class ``c``'s block set to zero."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != dictionary.n_atoms:
        raise DimensionError(f"coefficient length {x.shape[0]} does not match "
                             f"dictionary with {dictionary.n_atoms} atoms")
    sl = dictionary.block(c)
    out = np.zeros_like(x)
    out[sl] = x[sl]
    return out
