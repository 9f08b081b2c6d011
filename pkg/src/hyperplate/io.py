"""Plain-text outputs: CSV matrices, PGM heatmaps, nodal field dumps."""
import json

import numpy as np

__all__ = ["write_matrix_csv", "read_matrix_csv", "write_pgm", "read_pgm", "write_field_csv", "write_json"]


def _fmt(v):
    return f"{v:.17g}"


def write_matrix_csv(path, matrix):
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    with open(path, "w", newline="\n") as fh:
        for row in matrix:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_matrix_csv(path):
    return np.loadtxt(path, delimiter=",", ndmin=2)


def write_pgm(path, matrix, maxval=255):
    """Plain (P2) grayscale image of ``matrix``, row 0 at the top.

    The data range is stored in a ``# min=... max=...`` comment so the image
    can be read back against its CSV.
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    lo, hi = float(matrix.min()), float(matrix.max())
    if hi > lo:
        gray = np.rint((matrix - lo) / (hi - lo) * maxval).astype(int)
    else:
        gray = np.zeros(matrix.shape, dtype=int)
    rows, cols = matrix.shape
    with open(path, "w", newline="\n") as fh:
        fh.write("P2\n")
        fh.write(f"# min={_fmt(lo)} max={_fmt(hi)}\n")
        fh.write(f"{cols} {rows}\n{maxval}\n")
        for row in gray:
            fh.write(" ".join(str(v) for v in row) + "\n")


def read_pgm(path):
    """Return ``(gray, (min, max))`` from a file written by :func:`write_pgm`."""
    lo = hi = None
    tokens = []
    with open(path) as fh:
        magic = fh.readline().strip()
        if magic != "P2":
            raise ValueError("not a plain PGM file")
        for line in fh:
            if line.startswith("#"):
                for part in line[1:].split():
                    key, _, val = part.partition("=")
                    if key == "min":
                        lo = float(val)
                    elif key == "max":
                        hi = float(val)
                continue
            tokens.extend(line.split())
    cols, rows, _ = int(tokens[0]), int(tokens[1]), int(tokens[2])
    gray = np.array(tokens[3:], dtype=int).reshape(rows, cols)
    return gray, (lo, hi)


def write_field_csv(path, mesh, U):
    """One time level: node coordinates then the 3 displacement components."""
    U = np.asarray(U, dtype=float).reshape(mesh.n_nodes, 3)
    with open(path, "w", newline="\n") as fh:
        fh.write("x1,x2,x3,u1,u2,u3\n")
        for x, u in zip(mesh.nodes, U):
            fh.write(",".join(_fmt(v) for v in (*x, *u)) + "\n")


def write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
