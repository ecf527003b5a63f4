"""Plain-text matrix files: a `rows cols` header line, then one whitespace-
separated row of full-precision scientific-notation reals per line. Vectors
are stored as single-column matrices. Diffable and trivially parseable."""

from __future__ import annotations

import numpy as np


def write_matrix(path, M) -> None:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim == 1:
        M = M[:, None]
    if M.ndim != 2:
        raise ValueError(f"expected 1-D or 2-D array, got ndim={M.ndim}")
    with open(path, "w") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(format(v, ".17e") for v in row))
            fh.write("\n")


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected 'rows cols' header line")
        rows, cols = int(header[0]), int(header[1])
        data = np.array(fh.read().split(), dtype=np.float64)
    if data.size != rows * cols:
        raise ValueError(
            f"{path}: header promises {rows}x{cols}={rows * cols} entries, "
            f"found {data.size}"
        )
    return data.reshape(rows, cols)


def read_vector(path) -> np.ndarray:
    M = read_matrix(path)
    if M.shape[1] != 1:
        raise ValueError(f"{path}: expected a single-column matrix, got {M.shape}")
    return M[:, 0]
