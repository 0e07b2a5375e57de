"""Tabular report rows and sweeps over the attack parameter."""
from __future__ import annotations

import csv
import io
from dataclasses import astuple, dataclass, fields
from typing import Iterable, TextIO

import numpy as np

from .information import overlap_closed_form, renyi_information
from .probe_model import (
    ERROR_RATE_MAX,
    DomainError,
    ErrorRate,
    InconclusiveRate,
    error_from_inconclusive,
    inconclusive_from_error,
    probe_params,
    reflection_coefficient,
)

COLUMNS = ("E", "eta", "sign_factor", "Q", "renyi_bits", "R_inconclusive", "R1")
PARAMETERS = {"error_rate": (0.0, ERROR_RATE_MAX), "inconclusive_rate": (0.0, 1.0)}


@dataclass(frozen=True)
class ReportRow:
    E: float
    eta: float
    sign_factor: int
    Q: float
    renyi_bits: float
    R_inconclusive: float
    R1: float

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def row_from_error(E: float) -> ReportRow:
    params = probe_params(E)
    Q = overlap_closed_form(E)
    Rq = inconclusive_from_error(E)
    return ReportRow(
        E=float(params.error_rate),
        eta=params.eta,
        sign_factor=params.sign_factor,
        Q=Q,
        renyi_bits=renyi_information(Q),
        R_inconclusive=float(Rq),
        R1=reflection_coefficient(Rq),
    )


def row_from_inconclusive(Rq: float) -> ReportRow:
    Rq = InconclusiveRate(Rq)
    row = row_from_error(error_from_inconclusive(Rq))
    # keep the caller's R? rather than the round-tripped one
    return ReportRow(row.E, row.eta, row.sign_factor, row.Q, row.renyi_bits, float(Rq), reflection_coefficient(Rq))


@dataclass(frozen=True)
class SweepSpec:
    parameter_name: str
    start: float
    stop: float
    steps: int

    def __post_init__(self) -> None:
        if self.parameter_name not in PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter_name!r}")
        if self.steps < 2:
            raise ValueError(f"a sweep needs at least 2 steps, got {self.steps}")
        lo, hi = PARAMETERS[self.parameter_name]
        check = ErrorRate if self.parameter_name == "error_rate" else InconclusiveRate
        check(self.start)
        check(self.stop)
        if self.start > self.stop:
            raise DomainError(f"sweep start {self.start} exceeds stop {self.stop}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


def sweep_rows(spec: SweepSpec) -> list[ReportRow]:
    make = row_from_error if spec.parameter_name == "error_rate" else row_from_inconclusive
    return [make(float(v)) for v in spec.values()]


def format_number(v: float | int) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{v:.12g}"


def write_csv(rows: Iterable[ReportRow], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([format_number(v) for v in astuple(row)])


def rows_to_csv(rows: Iterable[ReportRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def parse_csv(text: str) -> list[ReportRow]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [
        ReportRow(**{k: (int(v) if k == "sign_factor" else float(v)) for k, v in rec.items()})
        for rec in reader
    ]
