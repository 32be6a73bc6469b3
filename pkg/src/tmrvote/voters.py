"""The fourteen majority voter structures and the majority reference."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

from .gatelib import CellKind as K
from .netlist import Netlist, NetlistBuilder, evaluate


class VoterId(enum.Enum):
    AO_MV = "AO_MV"
    NAND_MV = "NAND_MV"
    KP_MV = "KP_MV"
    BN_MV = "BN_MV"
    XNM_MV = "XNM_MV"
    X2AO_MV = "X2AO_MV"
    XAO22_MV = "XAO22_MV"
    OAO22_MV = "OAO22_MV"
    AOA22_MV = "AOA22_MV"
    OAAO_MV = "OAAO_MV"
    AOOA_MV = "AOOA_MV"
    AO222_MV = "AO222_MV"
    OA222_MV = "OA222_MV"
    MUX41_MV = "MUX41_MV"

    @classmethod
    def parse(cls, name: str) -> "VoterId":
        key = normalize_name(name)
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f"unknown voter {name!r}") from None

    @property
    def position(self) -> int:
        return _POSITION[self]

    def __str__(self) -> str:
        return self.value


_POSITION = {v: i for i, v in enumerate(VoterId)}

# Table 1 prints OAO22_MV with a zero in place of the letter O.
ALIASES = {"OA022_MV": "OAO22_MV"}


def normalize_name(name: str) -> str:
    key = name.strip().upper()
    return ALIASES.get(key, key)


def majority(x: int, y: int, z: int) -> int:
    """1 iff at least two of the three bits are 1."""
    return (x & y) | (y & z) | (x & z)


def _ao_mv(b):
    X, Y, Z = b.inputs
    p1 = b.add(K.AND2, X, Y, name="p1")
    p2 = b.add(K.AND2, Y, Z, name="p2")
    p3 = b.add(K.AND2, X, Z, name="p3")
    b.add(K.OR3, p1, p2, p3, name="V")


def _nand_mv(b):
    X, Y, Z = b.inputs
    n1 = b.add(K.NAND2, X, Y, name="n1")
    n2 = b.add(K.NAND2, Y, Z, name="n2")
    n3 = b.add(K.NAND2, X, Z, name="n3")
    b.add(K.NAND3, n1, n2, n3, name="V")


def _kp_mv(b):
    # Priority encoder: select Z only when X differs from Y and Y agrees with Z.
    X, Y, Z = b.inputs
    e1 = b.add(K.XOR2, X, Y, name="e1")
    e2 = b.add(K.XOR2, Y, Z, name="e2")
    ne2 = b.add(K.INV, e2, name="ne2")
    sel = b.add(K.AND2, e1, ne2, name="sel")
    b.add(K.MUX2, sel, X, Z, name="V")


def _bn_mv(b):
    X, Y, Z = b.inputs
    s = b.add(K.XOR2, X, Y, name="s")
    b.add(K.MUX2, s, Y, Z, name="V")


def _xnm_mv(b):
    X, Y, Z = b.inputs
    s = b.add(K.XNOR2, X, Y, name="s")
    b.add(K.MUX2, s, Z, Y, name="V")


def _x2ao_mv(b):
    X, Y, Z = b.inputs
    w = b.add(K.XOR2, X, Y, name="w")
    a1 = b.add(K.AND2, w, Z, name="a1")
    a2 = b.add(K.AND2, X, Y, name="a2")
    b.add(K.OR2, a1, a2, name="V")


def _xao22_mv(b):
    X, Y, Z = b.inputs
    w = b.add(K.XOR2, X, Y, name="w")
    b.add(K.AO22, w, Z, X, Y, name="V")


def _oao22_mv(b):
    X, Y, Z = b.inputs
    w = b.add(K.OR2, X, Y, name="w")
    b.add(K.AO22, w, Z, X, Y, name="V")


def _aoa22_mv(b):
    X, Y, Z = b.inputs
    w = b.add(K.AND2, Y, Z, name="w")
    b.add(K.OA22, X, w, Y, Z, name="V")


def _oaao_mv(b):
    X, Y, Z = b.inputs
    n = b.add(K.OA21, X, Y, Z, name="N")
    b.add(K.AO21, X, Y, n, name="V")


def _aooa_mv(b):
    X, Y, Z = b.inputs
    k = b.add(K.AO21, Y, Z, X, name="K")
    b.add(K.OA21, Y, Z, k, name="V")


def _ao222_mv(b):
    X, Y, Z = b.inputs
    b.add(K.AO222, X, Y, Y, Z, X, Z, name="V")


def _oa222_mv(b):
    X, Y, Z = b.inputs
    b.add(K.OA222, X, Y, Y, Z, X, Z, name="V")


def _mux41_mv(b):
    # Select lines X (MSB), Y; data in the order of the four product terms.
    X, Y, Z = b.inputs
    b.add(K.MUX4, X, Y, X, Z, Z, Y, name="V")


_BUILDERS = {
    VoterId.AO_MV: _ao_mv,
    VoterId.NAND_MV: _nand_mv,
    VoterId.KP_MV: _kp_mv,
    VoterId.BN_MV: _bn_mv,
    VoterId.XNM_MV: _xnm_mv,
    VoterId.X2AO_MV: _x2ao_mv,
    VoterId.XAO22_MV: _xao22_mv,
    VoterId.OAO22_MV: _oao22_mv,
    VoterId.AOA22_MV: _aoa22_mv,
    VoterId.OAAO_MV: _oaao_mv,
    VoterId.AOOA_MV: _aooa_mv,
    VoterId.AO222_MV: _ao222_mv,
    VoterId.OA222_MV: _oa222_mv,
    VoterId.MUX41_MV: _mux41_mv,
}


def build_voter(voter) -> Netlist:
    """Canonical netlist for a voter id (or its name), inputs X, Y, Z and output V."""
    if not isinstance(voter, VoterId):
        voter = VoterId.parse(voter)
    b = NetlistBuilder(("X", "Y", "Z"))
    _BUILDERS[voter](b)
    return b.build("V")


def all_voters() -> dict[VoterId, Netlist]:
    return {v: build_voter(v) for v in VoterId}


@dataclass
class EquivalenceReport:
    name: str
    checked: int
    counterexamples: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def equivalent(self) -> bool:
        return not self.counterexamples


def check_majority(netlist: Netlist, name: str = "netlist") -> EquivalenceReport:
    """Compare a 3-input netlist with :func:`majority` on all eight vectors."""
    if len(netlist.primary_inputs) != 3:
        raise ValueError(f"{name}: a voter has 3 inputs, got {len(netlist.primary_inputs)}")
    report = EquivalenceReport(name=name, checked=0)
    for vec in itertools.product((0, 1), repeat=3):
        got = evaluate(netlist, vec)[netlist.primary_output]
        report.checked += 1
        if got != majority(*vec):
            report.counterexamples.append(vec)
    return report


def verify_voter(voter) -> EquivalenceReport:
    if not isinstance(voter, VoterId):
        voter = VoterId.parse(voter)
    return check_majority(build_voter(voter), voter.value)
