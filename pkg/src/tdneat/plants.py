"""Learning data: the exemplary delayed plant, excitation signals and CSV files."""
from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

NORMALIZATION = 30.0


class DatasetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    u: np.ndarray
    t: np.ndarray
    label: str = ""

    def __post_init__(self):
        u = np.array(self.u, dtype=np.float64)
        t = np.array(self.t, dtype=np.float64)
        if u.ndim != 1 or t.ndim != 1 or len(u) != len(t) or len(u) < 1:
            raise DatasetError(f"u and t must be nonempty and of equal length, got {u.shape} and {t.shape}")
        if not (np.isfinite(u).all() and np.isfinite(t).all()):
            raise DatasetError("dataset values must be finite")
        u.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "t", t)

    @property
    def n(self) -> int:
        return len(self.u)


@dataclass(frozen=True)
class ExcitationSpec:
    length: int = 1000
    hold: int = 50
    lo: float = -1.0
    hi: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.length < 1 or self.hold < 1 or not self.lo <= self.hi:
            raise ValueError(f"invalid excitation spec {self}")


def simulate_exemplary(u) -> np.ndarray:
    """x(k) = -0.05 x(k-1) + 0.02 x(k-5) + sin(x(k-10)/10) + u(k-15), zero history."""
    u = [float(v) for v in u]
    x = [0.0] * len(u)
    for k in range(len(u)):
        x1 = x[k - 1] if k >= 1 else 0.0
        x5 = x[k - 5] if k >= 5 else 0.0
        x10 = x[k - 10] if k >= 10 else 0.0
        u15 = u[k - 15] if k >= 15 else 0.0
        x[k] = -0.05 * x1 + 0.02 * x5 + math.sin(x10 / 10) + u15
    return np.array(x)


def normalize(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64) / NORMALIZATION


def generate_excitation(spec: ExcitationSpec, rng: random.Random | None = None) -> np.ndarray:
    """Piecewise-constant signal; a new uniform level every ``spec.hold`` samples."""
    if rng is None:
        rng = random.Random(spec.seed)
    levels = [rng.uniform(spec.lo, spec.hi) for _ in range(-(-spec.length // spec.hold))]
    return np.array([levels[k // spec.hold] for k in range(spec.length)])


def exemplary_dataset(spec: ExcitationSpec, label: str = "") -> Dataset:
    u = generate_excitation(spec)
    return Dataset(u, normalize(simulate_exemplary(u)), label)


# Default excitation sets; verification sets probe faster and slower inputs.
LEARNING = ExcitationSpec(length=1000, hold=50, seed=1)
VERIFICATION_1 = ExcitationSpec(length=1000, hold=25, seed=2)
VERIFICATION_2 = ExcitationSpec(length=1000, hold=100, seed=3)


def default_datasets() -> tuple[Dataset, list[Dataset]]:
    return (exemplary_dataset(LEARNING, "learning"),
            [exemplary_dataset(VERIFICATION_1, "verification-1"),
             exemplary_dataset(VERIFICATION_2, "verification-2")])


# -- CSV ---------------------------------------------------------------------

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write_rows(path, header, rows) -> None:
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def save_dataset(ds: Dataset, path) -> None:
    _write_rows(path, ["k", "u", "t"],
                ((k, _fmt(u), _fmt(t)) for k, (u, t) in enumerate(zip(ds.u, ds.t))))


def save_input(u, path) -> None:
    _write_rows(path, ["k", "u"], ((k, _fmt(v)) for k, v in enumerate(u)))


def _read_columns(path, columns: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict[str, list[float]]:
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"dataset file not found: {path}")
    with path.open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DatasetError(f"{path}: empty file, expected header {','.join(columns)}")
    header = [h.strip() for h in rows[0]]
    allowed = [list(columns), list(columns) + list(optional)]
    if header not in allowed:
        raise DatasetError(f"{path}: line 1: expected header {','.join(columns + optional)}, got {','.join(header)}")
    out: dict[str, list[float]] = {name: [] for name in header}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            raise DatasetError(f"{path}: line {lineno}: empty row")
        if len(row) != len(header):
            raise DatasetError(f"{path}: line {lineno}: expected {len(header)} columns, got {len(row)}")
        try:
            k = int(row[0])
        except ValueError:
            raise DatasetError(f"{path}: line {lineno}: sample index {row[0]!r} is not an integer") from None
        if k != lineno - 2:
            raise DatasetError(f"{path}: line {lineno}: sample index {k} breaks contiguity, expected {lineno - 2}")
        for name, cell in zip(header[1:], row[1:]):
            try:
                value = float(cell)
            except ValueError:
                raise DatasetError(f"{path}: line {lineno}: column {name!r} value {cell!r} is not a number") from None
            if not math.isfinite(value):
                raise DatasetError(f"{path}: line {lineno}: column {name!r} value {cell!r} is not finite")
            out[name].append(value)
    if len(rows) < 2:
        raise DatasetError(f"{path}: no samples")
    return out


def load_dataset(path) -> Dataset:
    cols = _read_columns(path, ("k", "u", "t"))
    return Dataset(cols["u"], cols["t"], Path(path).stem)


def load_input(path) -> np.ndarray:
    """Read the ``u`` column of a ``k,u`` or ``k,u,t`` file."""
    return np.array(_read_columns(path, ("k", "u"), ("t",))["u"])
