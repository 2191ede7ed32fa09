"""Plain-text formats: numeric column files, CSV output and fit reports."""

import hashlib
import io as _io

import numpy as np


class DataFormatError(ValueError):
    pass


def _rows(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            yield lineno, line.rstrip("\n")


def read_columns(path, ncols, return_comments=False):
    """Read ``ncols`` numeric columns separated by commas and/or whitespace.

    Blank lines and lines starting with ``#`` are skipped.  A first
    non-numeric line is treated as a header.
    """
    data, comments = [], []
    seen_data = False
    for lineno, line in _rows(path):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            comments.append(s[1:].strip())
            continue
        fields = s.replace(",", " ").split()
        try:
            values = [float(v) for v in fields]
        except ValueError:
            if not seen_data and not data:
                seen_data = True
                continue
            raise DataFormatError(f"{path}:{lineno}: non-numeric value in {s!r}") from None
        seen_data = True
        if len(values) != ncols:
            raise DataFormatError(f"{path}:{lineno}: expected {ncols} columns, got {len(values)}")
        data.append(values)
    if not data:
        raise DataFormatError(f"{path}: no data rows")
    cols = tuple(np.array(c) for c in zip(*data))
    return (cols, comments) if return_comments else cols


def read_waveform(path):
    from .analysis import Waveform

    t, y = read_columns(path, 2)
    try:
        return Waveform(t, y)
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from None


def read_spectrum(path):
    from .device import CavitySpectrum

    e, y = read_columns(path, 2)
    order = np.argsort(e)
    try:
        return CavitySpectrum(e[order], y[order])
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from None


def read_s11(path):
    """Read ``f_GHz, re, im`` or ``f_GHz, mag_dB, phase_deg`` columns.

    The polar form is selected by a comment line ``# format: db``; the
    default (or ``# format: ri``) is real/imaginary.  Returns ``(f, s11)``.
    """
    from .device import s11_from_polar

    (f, c1, c2), comments = read_columns(path, 3, return_comments=True)
    fmt = "ri"
    for c in comments:
        key, _, value = c.partition(":")
        if key.strip().lower() == "format":
            fmt = value.strip().lower()
    if fmt == "ri":
        return f, c1 + 1j * c2
    if fmt == "db":
        return f, s11_from_polar(c1, c2)
    raise DataFormatError(f"{path}: unknown S11 format {fmt!r} (use 'ri' or 'db')")


def format_csv(header, columns):
    """Comma-separated text with 17 significant digits and one header row."""
    cols = [np.asarray(c, dtype=float) for c in columns]
    buf = _io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*cols):
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()


def write_csv(path, header, columns):
    text = format_csv(header, columns)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return text


def write_columns(path, columns, comment=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        for row in zip(*columns):
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
