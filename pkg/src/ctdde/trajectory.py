"""Piecewise sampled solutions on unit intervals.

Piece ``n`` covers ``[n, n+1)`` and stores ``Q`` samples at ``n + j/Q``.
Lookups between samples interpolate linearly inside the piece; past the
last sample they extrapolate from the last two.  Nothing ever
interpolates across an integer, where solutions are allowed to jump.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

__all__ = ["GridSpec", "Trajectory", "TrajectoryError", "DEFAULT_Q"]

DEFAULT_Q = 64

HISTORY = "history"
COMPUTED = "computed"


class TrajectoryError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    Q: int = DEFAULT_Q

    def __post_init__(self):
        if int(self.Q) != self.Q or self.Q < 2:
            raise ValueError(f"grid needs an integer Q >= 2, got {self.Q!r}")

    @property
    def step(self) -> float:
        return 1.0 / self.Q

    def abscissas(self, n: int) -> np.ndarray:
        return n + np.arange(self.Q) / self.Q


@dataclass
class Trajectory:
    start: int
    Q: int
    pieces: list = field(default_factory=list)
    provenance: list = field(default_factory=list)

    def __post_init__(self):
        if int(self.start) != self.start:
            raise TrajectoryError("trajectory start must be an integer")
        self.start = int(self.start)
        GridSpec(self.Q)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_function(cls, f: Callable[[float], float], start: int, end: int,
                      Q: int = DEFAULT_Q, provenance: str = HISTORY) -> "Trajectory":
        """Sample ``f`` on ``[start, end)``."""
        traj = cls(start, Q)
        for n in range(int(start), int(end)):
            traj.append([f(n + j / Q) for j in range(Q)], provenance)
        return traj

    def append(self, values: Iterable[float], provenance: str = COMPUTED) -> None:
        arr = np.asarray(list(values), dtype=float)
        if arr.shape != (self.Q,):
            raise TrajectoryError(f"piece needs {self.Q} samples, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise TrajectoryError(f"non-finite sample in piece {self.end}")
        arr.setflags(write=False)
        self.pieces.append(arr)
        self.provenance.append(provenance)

    # -- geometry ---------------------------------------------------------

    @property
    def end(self) -> int:
        """First integer not covered."""
        return self.start + len(self.pieces)

    def piece(self, n: int) -> np.ndarray:
        i = n - self.start
        if not 0 <= i < len(self.pieces):
            raise TrajectoryError(f"piece {n} outside [{self.start}, {self.end})")
        return self.pieces[i]

    def abscissa(self, n: int, j: int) -> float:
        return n + j / self.Q

    def samples(self, c: float | None = None, d: float | None = None):
        """(t, value) pairs for stored abscissas in ``[c, d)``."""
        c = self.start if c is None else c
        d = self.end if d is None else d
        out = []
        for n in range(max(self.start, math.floor(c)), min(self.end, math.ceil(d))):
            vals = self.piece(n)
            for j in range(self.Q):
                t = n + j / self.Q
                if c <= t < d:
                    out.append((t, float(vals[j])))
        return out

    # -- lookup -----------------------------------------------------------

    def value_at(self, t: float) -> float:
        if not self.start <= t < self.end:
            raise TrajectoryError(f"t={t!r} outside [{self.start}, {self.end})")
        n = math.floor(t)
        vals = self.pieces[n - self.start]
        pos = (t - n) * self.Q
        j = math.floor(pos)
        if j >= self.Q:
            j = self.Q - 1
        if n + j / self.Q == t:
            return float(vals[j])
        if j + 1 < self.Q and n + (j + 1) / self.Q == t:
            return float(vals[j + 1])
        if j < self.Q - 1:
            w = pos - j
            return float(vals[j] + (vals[j + 1] - vals[j]) * w)
        last = vals[-1]
        return float(last + (last - vals[-2]) * (pos - (self.Q - 1)))

    def _segment_values(self, c: float, d: float, closed: bool):
        if not c < d:
            raise TrajectoryError(f"empty segment [{c}, {d}]")
        if c < self.start or d > self.end or (closed and d >= self.end):
            raise TrajectoryError(f"segment [{c}, {d}] not covered")
        vals = [v for t, v in self.samples(c, d)]
        vals.append(self.value_at(c))
        if closed:
            vals.append(self.value_at(d))
        return vals

    def seg_min(self, c: float, d: float, closed: bool = True) -> float:
        """Minimum over stored abscissas in the segment plus its endpoints.

        With ``closed=False`` the right end is excluded, so ``[n, n+1)``
        examines exactly the samples of piece ``n``.
        """
        return min(self._segment_values(c, d, closed))

    def seg_max(self, c: float, d: float, closed: bool = True) -> float:
        return max(self._segment_values(c, d, closed))

    def sign_events(self, start: float | None = None, stop: float | None = None):
        """Adjacent sample pairs with one negative and one nonnegative value."""
        events = []
        prev = None
        for t, v in self.samples(start, stop):
            if prev is not None and (prev[1] < 0) != (v < 0):
                events.append((prev[0], t))
            prev = (t, v)
        return events

    # -- export -----------------------------------------------------------

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "value", "piece_index", "provenance"])
            for i, vals in enumerate(self.pieces):
                n = self.start + i
                for j in range(self.Q):
                    writer.writerow([repr(n + j / self.Q), repr(float(vals[j])), n,
                                     self.provenance[i]])

    @classmethod
    def read_csv(cls, path) -> "Trajectory":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows:
            raise TrajectoryError("empty trajectory file")
        by_piece: dict[int, list] = {}
        prov: dict[int, str] = {}
        for row in rows:
            n = int(row["piece_index"])
            by_piece.setdefault(n, []).append(float(row["value"]))
            prov[n] = row["provenance"]
        indices = sorted(by_piece)
        Q = len(by_piece[indices[0]])
        traj = cls(indices[0], Q)
        for n in indices:
            if n != traj.end:
                raise TrajectoryError(f"gap before piece {n}")
            traj.append(by_piece[n], prov[n])
        return traj
