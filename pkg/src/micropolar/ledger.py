"""Per-step record of the norms entering the energy estimates."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .spectral_core import scalar_norms, solenoidal_norms

COLUMNS = (
    "t",
    "u_l2sq",
    "u_h1sq",
    "u_Asq",
    "omega_l2sq",
    "omega_h1sq",
    "omega_Asq",
    "theta_l2sq",
    "theta_h1sq",
    "theta_Asq",
    "y",
    "y_strong",
)


def ledger_row(state) -> list[float]:
    ul2, uh1, uA = solenoidal_norms(state.u)
    wl2, wh1, wA, _ = scalar_norms(state.omega)
    tl2, th1, tA, _ = scalar_norms(state.theta)
    sq = [ul2**2, uh1**2, uA**2, wl2**2, wh1**2, wA**2, tl2**2, th1**2, tA**2]
    y = sq[0] + sq[3] + sq[6]
    ys = sq[1] + sq[4] + sq[7]
    return [state.t, *sq, y, ys]


@dataclass
class EnergyLedger:
    """Rows of ``COLUMNS``; ``t`` strictly increasing, every entry finite and >= 0."""

    rows: list[list[float]] = field(default_factory=list)

    def append(self, row) -> None:
        row = [float(v) for v in row]
        if len(row) != len(COLUMNS):
            raise ValueError(f"ledger row needs {len(COLUMNS)} entries, got {len(row)}")
        if not all(np.isfinite(v) and v >= 0 for v in row):
            raise ValueError(f"ledger row has negative or non-finite entries: {row}")
        if self.rows and row[0] <= self.rows[-1][0]:
            raise ValueError(f"ledger time must increase strictly ({row[0]} after {self.rows[-1][0]})")
        self.rows.append(row)

    def record(self, state) -> None:
        self.append(ledger_row(state))

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.rows, dtype=float).reshape(-1, len(COLUMNS))

    def column(self, name: str) -> np.ndarray:
        return self.array[:, COLUMNS.index(name)]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.column(name)

    @classmethod
    def from_array(cls, arr) -> "EnergyLedger":
        led = cls()
        for row in np.asarray(arr, dtype=float):
            led.append(row)
        return led

    # CSV with 17 significant digits so ledgers diff cleanly
    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(COLUMNS) + "\n")
        for row in self.rows:
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def read_csv(cls, path) -> "EnergyLedger":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header) != COLUMNS:
                missing = [c for c in COLUMNS if c not in header]
                raise ValueError(f"ledger CSV columns do not match; missing {missing}")
            return cls.from_array([[float(v) for v in row] for row in reader if row])
