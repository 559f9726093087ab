"""Reader and writer for the libsvm sparse text format."""

import numpy as np
import scipy.sparse as sp

from ..problems import Dataset

__all__ = ["LibsvmParseError", "parse_libsvm", "parse_libsvm_lines", "write_libsvm"]


class LibsvmParseError(ValueError):
    """Malformed libsvm input; `line` is the 1-based line number (0 for whole-file errors)."""

    def __init__(self, message, line=0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


def parse_libsvm_lines(lines, n_features=None):
    """Parse ``label idx:val idx:val ...`` lines into a :class:`Dataset`.

    Labels greater than zero become ``+1``, all others ``-1``. Indices are
    1-based in the file and must be strictly increasing within a line. Blank
    lines are ignored; text after ``#`` is a comment.
    """
    labels, indptr, indices, data = [], [0], [], []
    max_index = -1
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        tokens = text.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise LibsvmParseError(f"bad label {tokens[0]!r}", lineno) from None
        if not np.isfinite(label):
            raise LibsvmParseError(f"bad label {tokens[0]!r}", lineno)
        labels.append(1.0 if label > 0 else -1.0)
        prev = 0
        for tok in tokens[1:]:
            idx_txt, sep, val_txt = tok.partition(":")
            if not sep:
                raise LibsvmParseError(f"token {tok!r} is not index:value", lineno)
            try:
                idx = int(idx_txt)
                val = float(val_txt)
            except ValueError:
                raise LibsvmParseError(f"token {tok!r} is not index:value", lineno) from None
            if idx < 1:
                raise LibsvmParseError(f"index {idx} is not 1-based", lineno)
            if idx <= prev:
                raise LibsvmParseError("feature indices must be strictly increasing", lineno)
            prev = idx
            indices.append(idx - 1)
            data.append(val)
        max_index = max(max_index, prev - 1)
        indptr.append(len(indices))
    if not labels:
        raise LibsvmParseError("no samples in input")
    width = max_index + 1 if n_features is None else int(n_features)
    if width <= max_index:
        raise LibsvmParseError(f"feature index {max_index + 1} exceeds n_features={width}")
    X = sp.csr_matrix((np.array(data, dtype=float), np.array(indices, dtype=np.int64),
                       np.array(indptr, dtype=np.int64)), shape=(len(labels), max(width, 0)))
    return Dataset(X, np.array(labels))


def parse_libsvm(path, n_features=None):
    """Load a libsvm file; see :func:`parse_libsvm_lines`."""
    with open(path, encoding="utf-8") as fh:
        return parse_libsvm_lines(fh, n_features=n_features)


def write_libsvm(dataset, path):
    """Write `dataset` so that :func:`parse_libsvm` reads it back identically.

    Values use ``repr`` so floats round-trip exactly; explicit zeros are kept.
    The feature count is not stored, so trailing all-zero columns are lost
    unless the reader is given ``n_features``.
    """
    X = sp.csr_matrix(dataset.features)
    X.sort_indices()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, label in enumerate(dataset.labels):
            lo, hi = X.indptr[i], X.indptr[i + 1]
            parts = ["+1" if label > 0 else "-1"]
            parts += [f"{j + 1}:{float(v)!r}" for j, v in zip(X.indices[lo:hi], X.data[lo:hi])]
            fh.write(" ".join(parts) + "\n")
