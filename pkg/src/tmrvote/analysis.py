"""Power/delay/area proxies, figure of merit, measurement ingestion and ranking.

The figure of merit is ``100 / (power * delay * area)``. Proxy estimates use
abstract units (weighted toggles per vector, summed delay weights, transistor
count) and are only comparable with each other. Measured values are ingested
from CSV and never recomputed.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, TextIO, TypeVar, Union

from .gatelib import CellTable, default_cell_table
from .netlist import Netlist, logic_depth, simulate
from .prng import pack_vectors, random_vectors
from .voters import VoterId, build_voter, normalize_name

SOURCES = ("proxy", "ingested")
CSV_HEADER = ("name", "power_uW", "delay_ns", "area_um2")
DEFAULT_VECTORS = 1024
DEFAULT_SEED = 1


class DomainError(ValueError):
    pass


class IngestError(ValueError):
    pass


def compute_fom(power: float, delay: float, area: float) -> float:
    for label, v in (("power", power), ("delay", delay), ("area", area)):
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise DomainError(f"{label} must be a positive finite number, got {v!r}")
    return 100.0 / (power * delay * area)


@dataclass(frozen=True)
class PpaEstimate:
    """Power, delay and area of one design.

    Ingested values are in uW, ns and um^2; proxy values are toggle units,
    delay units and transistors. A proxy power of zero (no input activity)
    is allowed, but it has no figure of merit.
    """

    name: str
    power: float
    delay: float
    area: float
    source: str

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}, got {self.source!r}")
        for label in ("delay", "area"):
            if not getattr(self, label) > 0:
                raise DomainError(f"{self.name}: {label} must be positive")
        if self.source == "ingested" and not self.power > 0:
            raise DomainError(f"{self.name}: power must be positive")
        if not self.power >= 0:
            raise DomainError(f"{self.name}: power must not be negative")

    @property
    def fom(self) -> float:
        return compute_fom(self.power, self.delay, self.area)


@dataclass(frozen=True)
class FomRecord:
    estimate: PpaEstimate
    fom: float

    @classmethod
    def from_estimate(cls, estimate: PpaEstimate) -> "FomRecord":
        return cls(estimate, estimate.fom)

    @property
    def name(self) -> str:
        return self.estimate.name


def switching_activity(
    nl: Netlist, table: CellTable, vectors: Sequence[Sequence[int]]
) -> float:
    """Load-weighted toggles of instance outputs, summed over consecutive vectors.

    The first vector only sets the initial state.
    """
    if not vectors:
        raise ValueError("need at least one vector")
    words, mask = pack_vectors(vectors, len(nl.primary_inputs))
    values = simulate(nl, words, mask)
    # bit t of (w ^ w>>1) compares vector t with vector t+1
    pairs = mask >> 1
    total = 0.0
    for i in nl.topological_order:
        inst = nl.instances[i]
        w = values[inst.output]
        toggles = ((w ^ (w >> 1)) & pairs).bit_count()
        total += toggles * table[inst.kind].load_weight
    return total


def area_proxy(nl: Netlist, table: CellTable) -> int:
    return sum(table[inst.kind].transistors for inst in nl.instances)


def estimate_ppa(
    nl: Netlist,
    table: Optional[CellTable] = None,
    vectors: int = DEFAULT_VECTORS,
    seed: int = DEFAULT_SEED,
    name: str = "netlist",
    sequence: Optional[Sequence[Sequence[int]]] = None,
) -> PpaEstimate:
    """Proxy PPA of a netlist under a seeded random vector sequence.

    ``sequence`` replaces the random vectors when given (``vectors`` and
    ``seed`` are then ignored).
    """
    table = table or default_cell_table()
    if sequence is None:
        if vectors < 1:
            raise ValueError("vectors must be >= 1")
        sequence = random_vectors(len(nl.primary_inputs), vectors, seed)
    power = switching_activity(nl, table, sequence) / len(sequence)
    return PpaEstimate(
        name=name,
        power=power,
        delay=logic_depth(nl, table),
        area=area_proxy(nl, table),
        source="proxy",
    )


T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Map in input order; ``workers > 1`` fans out over processes."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class _VoterJob:
    table: CellTable
    vectors: int
    seed: int

    def __call__(self, voter: VoterId) -> FomRecord:
        est = estimate_ppa(build_voter(voter), self.table, self.vectors, self.seed, name=voter.value)
        return FomRecord.from_estimate(est)


def analyze_voters(
    ids: Iterable[VoterId],
    table: Optional[CellTable] = None,
    vectors: int = DEFAULT_VECTORS,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> list[FomRecord]:
    """Proxy PPA and FOM per voter, in voter declaration order."""
    ids = sorted(set(ids), key=lambda v: v.position)
    job = _VoterJob(table or default_cell_table(), vectors, seed)
    return parallel_map(job, ids, workers)


def ingest_measurements(
    source: Union[str, os.PathLike, TextIO], strict_names: bool = True
) -> list[PpaEstimate]:
    """Read a ``name,power_uW,delay_ns,area_um2`` CSV of measured voters.

    Names are normalized (``OA022_MV`` becomes ``OAO22_MV``). With
    ``strict_names`` every name must be one of the fourteen voter ids.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
    reader = csv.reader(io.StringIO(text))
    rows = [(n, r) for n, r in enumerate(reader, start=1) if any(c.strip() for c in r)]
    if not rows:
        raise IngestError("empty measurement file")
    header = tuple(c.strip() for c in rows[0][1])
    if header != CSV_HEADER:
        raise IngestError(f"line {rows[0][0]}: expected header {','.join(CSV_HEADER)}")

    out: list[PpaEstimate] = []
    seen: set[str] = set()
    for lineno, row in rows[1:]:
        if len(row) != len(CSV_HEADER):
            raise IngestError(f"line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        name = normalize_name(row[0])
        if strict_names and name not in VoterId.__members__:
            raise IngestError(f"line {lineno}: unknown voter {row[0].strip()!r}")
        if name in seen:
            raise IngestError(f"line {lineno}: duplicate entry for {name}")
        seen.add(name)
        try:
            p, d, a = (float(c) for c in row[1:])
        except ValueError:
            raise IngestError(f"line {lineno}: non-numeric value") from None
        if not all(math.isfinite(v) and v > 0 for v in (p, d, a)):
            raise IngestError(f"line {lineno}: power, delay and area must be positive")
        out.append(PpaEstimate(name, p, d, a, "ingested"))
    return out


@dataclass(frozen=True)
class RankedRecord:
    rank: int
    record: FomRecord
    above_mean: bool


@dataclass(frozen=True)
class RankingReport:
    ranked: tuple[RankedRecord, ...]
    mean: float

    def __getitem__(self, name: str) -> RankedRecord:
        key = normalize_name(name)
        for r in self.ranked:
            if r.record.name == key:
                return r
        raise KeyError(name)

    @property
    def above(self) -> list[str]:
        return [r.record.name for r in self.ranked if r.above_mean]

    @property
    def below(self) -> list[str]:
        return [r.record.name for r in self.ranked if not r.above_mean]

    def ratio(self, numerator: str, denominator: str) -> float:
        return self[numerator].record.fom / self[denominator].record.fom

    def ratio_table(self) -> list[list[float]]:
        """``table[i][j]`` is fom(rank i) / fom(rank j)."""
        foms = [r.record.fom for r in self.ranked]
        return [[a / b for b in foms] for a in foms]


def rank_and_classify(records: Iterable[FomRecord]) -> RankingReport:
    """Sort by descending FOM and label each record against the arithmetic mean.

    A FOM equal to the mean counts as above.
    """
    records = list(records)
    if not records:
        raise ValueError("need at least one record")
    mean = math.fsum(r.fom for r in records) / len(records)
    ordered = sorted(records, key=lambda r: (-r.fom, r.name))
    ranked = tuple(
        RankedRecord(rank=i, record=r, above_mean=r.fom >= mean)
        for i, r in enumerate(ordered, start=1)
    )
    return RankingReport(ranked=ranked, mean=mean)
