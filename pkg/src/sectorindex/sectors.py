"""Array-backed collection of angular sectors, plus the sector CSV format.

Large collections are kept as NumPy columns (apex, bisector direction,
opening angle) so index builds and query kernels never materialize
per-sector objects. ``AngularSector`` values are created on demand.

File format: UTF-8 CSV with header ``id,apex_x,apex_y,direction_deg,angle_deg``,
'.' decimal separator, one sector per row.
"""

from __future__ import annotations

import csv
import math
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DegenerateInput, ParseError, RangeError
from .geometry import AngularSector, Point, sector_from_pose

CSV_HEADER = ["id", "apex_x", "apex_y", "direction_deg", "angle_deg"]


class SectorSet:
    """Immutable struct-of-arrays view of n angular sectors.

    ``direction`` and ``angle`` are radians; ``ids`` are the external ids
    used in files and CLI output (defaults to 0..n-1).
    """

    __slots__ = ("ids", "ax", "ay", "direction", "angle", "_mono")

    def __init__(self, ids, ax, ay, direction, angle):
        self.ids = np.ascontiguousarray(ids, dtype=np.int64)
        self.ax = np.ascontiguousarray(ax, dtype=np.float64)
        self.ay = np.ascontiguousarray(ay, dtype=np.float64)
        self.direction = np.ascontiguousarray(direction, dtype=np.float64) % (2.0 * np.pi)
        self.angle = np.ascontiguousarray(angle, dtype=np.float64)
        n = len(self.ax)
        if not (len(self.ay) == len(self.direction) == len(self.angle) == len(self.ids) == n):
            raise ValueError("column lengths differ")
        if n:
            if not np.isfinite(self.ax).all() or not np.isfinite(self.ay).all():
                raise DegenerateInput("non-finite apex coordinates")
            if ((self.angle <= 0.0) | (self.angle >= np.pi)).any():
                bad = int(np.argmax((self.angle <= 0.0) | (self.angle >= np.pi)))
                raise DegenerateInput(
                    f"sector {bad}: angle {self.angle[bad]} outside (0, pi)"
                )
        self._mono = None

    @classmethod
    def empty(cls) -> "SectorSet":
        z = np.empty(0)
        return cls(z, z, z, z, z)

    @classmethod
    def from_sectors(cls, sectors: Iterable[AngularSector]) -> "SectorSet":
        sectors = list(sectors)
        return cls(
            np.arange(len(sectors)),
            [s.apex.x for s in sectors],
            [s.apex.y for s in sectors],
            [s.direction for s in sectors],
            [s.angle for s in sectors],
        )

    def __len__(self) -> int:
        return len(self.ax)

    def __getitem__(self, i: int) -> AngularSector:
        return sector_from_pose(
            Point(float(self.ax[i]), float(self.ay[i])),
            float(self.direction[i]),
            float(self.angle[i]),
        )

    def __iter__(self) -> Iterator[AngularSector]:
        return (self[i] for i in range(len(self)))

    def mono_args(self):
        """Arrays consumed by the mono-wedge containment kernels:
        apex columns and the two inward edge normals."""
        if self._mono is None:
            half = 0.5 * self.angle
            e1 = self.direction - half
            e2 = self.direction + half
            self._mono = (
                self.ax,
                self.ay,
                np.ascontiguousarray(-np.sin(e1)),
                np.ascontiguousarray(np.cos(e1)),
                np.ascontiguousarray(np.sin(e2)),
                np.ascontiguousarray(-np.cos(e2)),
            )
        return self._mono


def save_sectors(path, sectors: SectorSet) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        deg = 180.0 / math.pi
        for i in range(len(sectors)):
            writer.writerow(
                [
                    int(sectors.ids[i]),
                    repr(float(sectors.ax[i])),
                    repr(float(sectors.ay[i])),
                    repr(float(sectors.direction[i]) * deg),
                    repr(float(sectors.angle[i]) * deg),
                ]
            )


def _parse_float(token: str, line_no: int, field: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(line_no, f"bad {field}: {token!r}") from None
    if not math.isfinite(value):
        raise RangeError(line_no, f"{field} must be finite, got {token!r}")
    return value


def load_sectors(path) -> SectorSet:
    ids: list[int] = []
    ax: list[float] = []
    ay: list[float] = []
    ddeg: list[float] = []
    adeg: list[float] = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return SectorSet.empty()
        if [h.strip() for h in header] != CSV_HEADER:
            raise ParseError(1, f"expected header {','.join(CSV_HEADER)}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise ParseError(line_no, f"expected 5 fields, got {len(row)}")
            try:
                ids.append(int(row[0]))
            except ValueError:
                raise ParseError(line_no, f"bad id: {row[0]!r}") from None
            ax.append(_parse_float(row[1], line_no, "apex_x"))
            ay.append(_parse_float(row[2], line_no, "apex_y"))
            ddeg.append(_parse_float(row[3], line_no, "direction_deg"))
            a = _parse_float(row[4], line_no, "angle_deg")
            if not 0.0 < a < 180.0:
                raise DegenerateInput(
                    f"row {line_no - 2} (line {line_no}): angle_deg {a} "
                    "outside (0, 180)"
                )
            adeg.append(a)
    rad = math.pi / 180.0
    return SectorSet(
        np.array(ids, dtype=np.int64),
        np.array(ax),
        np.array(ay),
        np.array(ddeg) * rad,
        np.array(adeg) * rad,
    )
