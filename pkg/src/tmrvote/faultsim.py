"""TMR composition and exhaustive fault injection.

Two campaigns are provided. Module faults force one (or more) of the three
module copy outputs stuck-at or inverted and check that the voter masks it.
Voter SETs invert a single instance output net inside the voter for one
input vector; every fanout branch of the net sees the inverted value.

All tallies are exact counts. Vectors are simulated bit-parallel, one Python
integer bit per input pattern.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .analysis import DEFAULT_SEED, DEFAULT_VECTORS, area_proxy, estimate_ppa, parallel_map
from .gatelib import CellKind, CellTable, default_cell_table
from .netlist import (
    Instance,
    Netlist,
    evaluate,
    input_columns,
    logic_depth,
    simulate,
    validate,
)
from .prng import pack_vectors, random_vectors
from .voters import VoterId, build_voter, check_majority

FAULT_MODELS = ("stuck0", "stuck1", "flip")
MAX_EXHAUSTIVE_INPUTS = 16

_OVERRIDES = {
    "stuck0": lambda v, m: 0,
    "stuck1": lambda v, m: m,
    "flip": lambda v, m: ~v & m,
}


class CampaignError(ValueError):
    pass


@dataclass(frozen=True)
class FaultSite:
    location: str  # "module_output" or "voter_net"
    index: int  # copy index 1..3, or voter net id
    model: str

    def __post_init__(self):
        if self.location not in ("module_output", "voter_net"):
            raise ValueError(f"unknown fault location {self.location!r}")
        if self.model not in FAULT_MODELS:
            raise ValueError(f"unknown fault model {self.model!r}")
        if self.location == "module_output" and self.index not in (1, 2, 3):
            raise ValueError(f"copy index must be 1, 2 or 3, got {self.index}")


@dataclass(frozen=True)
class SiteResult:
    sites: tuple[FaultSite, ...]
    cases: int
    propagated: int


@dataclass
class MaskingReport:
    total_cases: int = 0
    propagated: int = 0
    per_site: list[SiteResult] = field(default_factory=list)

    @property
    def masked(self) -> int:
        return self.total_cases - self.propagated

    @property
    def sensitivity(self) -> float:
        return self.propagated / self.total_cases if self.total_cases else 0.0

    def add(self, sites: Sequence[FaultSite], cases: int, propagated: int) -> None:
        self.per_site.append(SiteResult(tuple(sites), cases, propagated))
        self.total_cases += cases
        self.propagated += propagated


@dataclass(frozen=True)
class TmrSystem:
    """Three copies of a single-output module feeding a 3-input voter.

    Each copy has its own primary inputs (``m1_*``, ``m2_*``, ``m3_*``) so the
    composed netlist has three times the module's inputs. Voter nets are
    prefixed ``v_``.
    """

    module: Netlist
    voter: Netlist
    composed: Netlist
    copy_outputs: tuple[int, int, int]
    voter_id: Optional[VoterId] = None

    @property
    def width(self) -> int:
        return len(self.module.primary_inputs)

    def evaluate(self, inputs: Sequence[int], faults: Iterable[FaultSite] = ()) -> int:
        """System output for one module input vector, shared by all three copies."""
        overrides = self._overrides(faults)
        return evaluate(self.composed, list(inputs) * 3, overrides)[self.composed.primary_output]

    def _overrides(self, faults: Iterable[FaultSite]):
        overrides = {}
        for f in faults:
            if f.location != "module_output":
                raise ValueError("TmrSystem injects module_output faults only")
            overrides[self.copy_outputs[f.index - 1]] = _OVERRIDES[f.model]
        return overrides


def compose_tmr(module: Netlist, voter: Union[Netlist, VoterId, str]) -> TmrSystem:
    voter_id = None
    if not isinstance(voter, Netlist):
        voter_id = voter if isinstance(voter, VoterId) else VoterId.parse(voter)
        voter = build_voter(voter_id)
    validate(module)
    validate(voter)
    if len(voter.primary_inputs) != 3:
        raise ValueError(f"voter must have 3 inputs, got {len(voter.primary_inputs)}")
    if not check_majority(voter).equivalent:
        raise ValueError("voter is not equivalent to 3-input majority")

    names: list[str] = []
    instances: list[Instance] = []
    inputs: list[int] = []
    copy_outputs = []
    for copy in (1, 2, 3):
        base = len(names)
        names.extend(f"m{copy}_{n}" for n in module.names)
        inputs.extend(base + i for i in module.primary_inputs)
        instances.extend(
            Instance(inst.kind, tuple(base + x for x in inst.inputs), base + inst.output)
            for inst in module.instances
        )
        copy_outputs.append(base + module.primary_output)

    # Voter primary inputs are replaced by the copy outputs.
    remap = dict(zip(voter.primary_inputs, copy_outputs))
    for net, name in enumerate(voter.names):
        if net not in remap:
            remap[net] = len(names)
            names.append(f"v_{name}")
    instances.extend(
        Instance(inst.kind, tuple(remap[x] for x in inst.inputs), remap[inst.output])
        for inst in voter.instances
    )
    composed = Netlist(tuple(names), tuple(inputs), remap[voter.primary_output], tuple(instances))
    validate(composed)
    return TmrSystem(module, voter, composed, tuple(copy_outputs), voter_id)


def _module_patterns(width: int, samples: Optional[int], seed: int):
    if samples is None:
        if width > MAX_EXHAUSTIVE_INPUTS:
            raise CampaignError(
                f"module has {width} inputs; exhaustive injection is limited to "
                f"{MAX_EXHAUSTIVE_INPUTS}, pass samples=N to use sampling mode"
            )
        return input_columns(width)
    if samples < 1:
        raise CampaignError("samples must be >= 1")
    return pack_vectors(random_vectors(width, samples, seed), width)


def module_fault_masking(
    system: TmrSystem,
    models: Sequence[str] = FAULT_MODELS,
    multiplicity: int = 1,
    samples: Optional[int] = None,
    seed: int = DEFAULT_SEED,
) -> MaskingReport:
    """Inject faults at module copy outputs over every module input vector.

    Each case is one input vector with ``multiplicity`` distinct copies all
    faulted with the same model. Exhaustive by default; ``samples`` switches
    to that many pseudo-random vectors.
    """
    if not 1 <= multiplicity <= 3:
        raise ValueError("multiplicity must be 1, 2 or 3")
    words, mask = _module_patterns(system.width, samples, seed)
    n_patterns = mask.bit_length()
    out = system.composed.primary_output
    golden = simulate(system.composed, words * 3, mask)[out]

    report = MaskingReport()
    for copies in itertools.combinations((1, 2, 3), multiplicity):
        for model in models:
            sites = [FaultSite("module_output", c, model) for c in copies]
            faulty = simulate(system.composed, words * 3, mask, system._overrides(sites))[out]
            report.add(sites, n_patterns, (faulty ^ golden).bit_count())
    return report


def _as_voter(voter: Union[Netlist, VoterId, str]) -> Netlist:
    if isinstance(voter, Netlist):
        validate(voter)
        if len(voter.primary_inputs) != 3:
            raise ValueError(f"voter must have 3 inputs, got {len(voter.primary_inputs)}")
        return voter
    return build_voter(voter)


def mutate(nl: Netlist, net: int, model: str = "flip") -> Netlist:
    """Rewrite the netlist so ``net`` carries the faulty value.

    The original driver now drives a new net ``<name>_raw``; ``net`` itself is
    re-driven by INV(raw) for a flip, AND2(raw, INV(raw)) for stuck-at-0 and
    OR2(raw, INV(raw)) for stuck-at-1.
    """
    drivers = nl.drivers
    if net not in drivers:
        raise ValueError(f"net {nl.names[net]!r} is not an instance output")
    names = list(nl.net_names)
    raw = len(names)
    names.append(f"{nl.names[net]}_raw")
    instances = list(nl.instances)
    d = drivers[net]
    instances[d] = Instance(instances[d].kind, instances[d].inputs, raw)
    if model == "flip":
        instances.append(Instance(CellKind.INV, (raw,), net))
    elif model in ("stuck0", "stuck1"):
        inv = len(names)
        names.append(f"{nl.names[net]}_inv")
        instances.append(Instance(CellKind.INV, (raw,), inv))
        kind = CellKind.AND2 if model == "stuck0" else CellKind.OR2
        instances.append(Instance(kind, (raw, inv), net))
    else:
        raise ValueError(f"unknown fault model {model!r}")
    mutant = Netlist(tuple(names), nl.primary_inputs, nl.primary_output, tuple(instances))
    validate(mutant)
    return mutant


def voter_set_sensitivity(
    voter: Union[Netlist, VoterId, str],
    models: Sequence[str] = ("flip",),
    method: str = "override",
) -> MaskingReport:
    """Single-net fault sensitivity of a voter over all eight input vectors.

    Sites are instance outputs in topological order. ``method="override"``
    injects by value override during bit-parallel simulation;
    ``method="mutation"`` rewrites the netlist per site and evaluates vector
    by vector. Both give identical tallies.
    """
    nl = _as_voter(voter)
    sites = nl.instance_output_nets()
    report = MaskingReport()
    if method == "override":
        cols, mask = input_columns(3)
        out = nl.primary_output
        golden = simulate(nl, cols, mask)[out]
        for net in sites:
            for model in models:
                faulty = simulate(nl, cols, mask, {net: _OVERRIDES[model]})[out]
                report.add([FaultSite("voter_net", net, model)], 8, (faulty ^ golden).bit_count())
    elif method == "mutation":
        vectors = list(itertools.product((0, 1), repeat=3))
        good = [evaluate(nl, v)[nl.primary_output] for v in vectors]
        for net in sites:
            for model in models:
                mutant = mutate(nl, net, model)
                bad = sum(
                    evaluate(mutant, v)[mutant.primary_output] != g
                    for v, g in zip(vectors, good)
                )
                report.add([FaultSite("voter_net", net, model)], 8, bad)
    else:
        raise ValueError(f"unknown method {method!r}")
    return report


CAMPAIGN_COLUMNS = ("voter", "nets", "cases", "propagated", "sensitivity", "area_proxy", "delay_proxy")


@dataclass(frozen=True)
class CampaignRow:
    voter: str
    nets: int
    cases: int
    propagated: int
    sensitivity: float
    area_proxy: int
    delay_proxy: float
    power_proxy: float
    fom_proxy: Optional[float]


@dataclass(frozen=True)
class _CampaignJob:
    table: CellTable
    vectors: int
    seed: int
    models: tuple[str, ...]

    def __call__(self, voter: VoterId) -> CampaignRow:
        nl = build_voter(voter)
        rep = voter_set_sensitivity(nl, self.models)
        est = estimate_ppa(nl, self.table, self.vectors, self.seed, name=voter.value)
        return CampaignRow(
            voter=voter.value,
            nets=len(nl.instances),
            cases=rep.total_cases,
            propagated=rep.propagated,
            sensitivity=rep.sensitivity,
            area_proxy=area_proxy(nl, self.table),
            delay_proxy=logic_depth(nl, self.table),
            power_proxy=est.power,
            fom_proxy=est.fom if est.power > 0 else None,
        )


def campaign(
    ids: Iterable[Union[VoterId, str]],
    table: Optional[CellTable] = None,
    vectors: int = DEFAULT_VECTORS,
    seed: int = DEFAULT_SEED,
    models: Sequence[str] = ("flip",),
    workers: int = 1,
) -> list[CampaignRow]:
    """SET sensitivity next to the proxy PPA/FOM for each voter.

    Rows come back in voter declaration order whatever ``workers`` is.
    """
    ids = [v if isinstance(v, VoterId) else VoterId.parse(v) for v in ids]
    if not ids:
        raise ValueError("campaign needs at least one voter")
    ids = sorted(set(ids), key=lambda v: v.position)
    job = _CampaignJob(table or default_cell_table(), vectors, seed, tuple(models))
    return parallel_map(job, ids, workers)
