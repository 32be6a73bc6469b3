"""Gate-level models of TMR majority voters.

Build the fourteen voter netlists, check them against the majority function,
inject faults, and compare power/delay/area through a figure of merit.
"""

from .analysis import (
    FomRecord,
    PpaEstimate,
    compute_fom,
    estimate_ppa,
    ingest_measurements,
    rank_and_classify,
)
from .faultsim import (
    FaultSite,
    MaskingReport,
    TmrSystem,
    campaign,
    compose_tmr,
    module_fault_masking,
    voter_set_sensitivity,
)
from .gatelib import CellKind, CellParams, CellTable, cell_eval, default_cell_table, load_cell_table
from .netlist import (
    Instance,
    Netlist,
    NetlistBuilder,
    evaluate,
    export_netlist,
    logic_depth,
    parse_netlist,
    truth_table,
    validate,
)
from .voters import VoterId, build_voter, majority, verify_voter

__version__ = "0.1.0"
