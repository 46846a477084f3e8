"""Plain-text model checkpoints.

Format (ASCII, '\n' newlines, layers labelled from 1):

    SPARCS1
    layers N1 N2 ... N{B+1}
    frozen_input 0|1
    frozen_output 0|1
    phi <k> <rows> <cols>      followed by <rows> lines of <cols> floats
    ...one stanza per coupling block, k = 1..B...
    eig <l> <size>             followed by one line of <size> floats
    ...one stanza per layer, l = 1..B+1...

Floats are written with shortest round-trip precision in base 10, so
save/load reproduces the model bit for bit.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ParseError
from .ioutil import format_float
from .spectral import SpectralParams

__all__ = ["MAGIC", "save_checkpoint", "load_checkpoint"]

MAGIC = "SPARCS1"


def save_checkpoint(params: SpectralParams, path) -> None:
    lines = [MAGIC]
    lines.append("layers " + " ".join(str(n) for n in params.layers))
    lines.append(f"frozen_input {int(params.frozen_input)}")
    lines.append(f"frozen_output {int(params.frozen_output)}")
    for k, p in enumerate(params.phi):
        lines.append(f"phi {k + 1} {p.shape[0]} {p.shape[1]}")
        for row in p:
            lines.append(" ".join(format_float(v) for v in row))
    for l, e in enumerate(params.eig):
        lines.append(f"eig {l + 1} {e.shape[0]}")
        lines.append(" ".join(format_float(v) for v in e))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


class _Reader:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self) -> tuple[int, str]:
        while self.pos < len(self.lines):
            self.pos += 1
            line = self.lines[self.pos - 1].strip()
            if line:
                return self.pos, line
        raise ParseError(f"line {len(self.lines)}: unexpected end of checkpoint")

    def floats(self, count: int) -> list[float]:
        lineno, line = self.next()
        parts = line.split()
        if len(parts) != count:
            raise ParseError(f"line {lineno}: expected {count} values, got {len(parts)}")
        try:
            return [float(p) for p in parts]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc


def load_checkpoint(path) -> SpectralParams:
    """Read a checkpoint, validating magic, stanza order, and shapes."""
    rd = _Reader(Path(path).read_text(encoding="ascii"))
    lineno, magic = rd.next()
    if magic != MAGIC:
        raise ParseError(f"line {lineno}: bad magic {magic!r}, expected {MAGIC!r}")
    lineno, line = rd.next()
    parts = line.split()
    if parts[0] != "layers" or len(parts) < 3:
        raise ParseError(f"line {lineno}: expected 'layers N1 N2 ...', got {line!r}")
    try:
        sizes = tuple(int(p) for p in parts[1:])
    except ValueError as exc:
        raise ParseError(f"line {lineno}: {exc}") from exc

    flags = {}
    for name in ("frozen_input", "frozen_output"):
        lineno, line = rd.next()
        parts = line.split()
        if len(parts) != 2 or parts[0] != name or parts[1] not in ("0", "1"):
            raise ParseError(f"line {lineno}: expected '{name} 0|1', got {line!r}")
        flags[name] = parts[1] == "1"

    phi = []
    for k in range(len(sizes) - 1):
        lineno, line = rd.next()
        parts = line.split()
        want = ["phi", str(k + 1), str(sizes[k + 1]), str(sizes[k])]
        if parts != want:
            raise ParseError(
                f"line {lineno}: expected {' '.join(want)!r}, got {line!r}"
            )
        rows = [rd.floats(sizes[k]) for _ in range(sizes[k + 1])]
        phi.append(np.array(rows))

    eig = []
    for l in range(len(sizes)):
        lineno, line = rd.next()
        parts = line.split()
        want = ["eig", str(l + 1), str(sizes[l])]
        if parts != want:
            raise ParseError(
                f"line {lineno}: expected {' '.join(want)!r}, got {line!r}"
            )
        eig.append(np.array(rd.floats(sizes[l])))

    return SpectralParams(sizes, phi, eig, flags["frozen_input"], flags["frozen_output"])
