"""CSV emission/ingestion for run outputs.

ASCII, comma-separated, one header row, LF line endings, numeric values
printed with 17 significant digits so a round trip through the file
reproduces the doubles bit-for-bit.
"""

import numpy as np


def format_value(v):
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def write_csv(path, header, rows):
    """Write rectangular data; raises OSError subclasses on I/O failure."""
    header = list(header)
    lines = [",".join(header)]
    for row in rows:
        row = list(row)
        if len(row) != len(header):
            raise ValueError("row length does not match header")
        lines.append(",".join(format_value(v) for v in row))
    text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def read_csv(path):
    """Read back a numeric CSV written by write_csv: (header, array)."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header = lines[0].split(",")
    data = np.array([[float(tok) for tok in ln.split(",")] for ln in lines[1:]],
                    dtype=float)
    if data.size == 0:
        data = data.reshape(0, len(header))
    return header, data


def profile_rows(x, T, T_r, rho):
    """Rows for a profile file: x, T, T_r, rho_g1..rho_gG."""
    G = rho.shape[0]
    header = ["x", "T", "T_r"] + [f"rho_g{g + 1}" for g in range(G)]
    rows = []
    for j in range(x.size):
        rows.append([x[j], T[j], T_r[j]] + [rho[g, j] for g in range(G)])
    return header, rows
