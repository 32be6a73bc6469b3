import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import expr_eval, majority_oracle
from tmrvote.gatelib import CellKind
from tmrvote.netlist import NetlistBuilder, evaluate, truth_table
from tmrvote.voters import VoterId, build_voter, check_majority, majority, verify_voter

VECTORS = list(itertools.product((0, 1), repeat=3))
bits = st.integers(0, 1)

INSTANCE_COUNTS = {
    "AO_MV": 4, "NAND_MV": 4, "KP_MV": 5, "BN_MV": 2, "XNM_MV": 2, "X2AO_MV": 4,
    "XAO22_MV": 2, "OAO22_MV": 2, "AOA22_MV": 2, "OAAO_MV": 2, "AOOA_MV": 2,
    "AO222_MV": 1, "OA222_MV": 1, "MUX41_MV": 1,
}


def test_fourteen_ids():
    assert [v.value for v in VoterId] == list(INSTANCE_COUNTS)


def test_table_spelling_is_normalized():
    assert VoterId.parse("OA022_MV") is VoterId.OAO22_MV
    assert VoterId.parse("oa222_mv") is VoterId.OA222_MV
    with pytest.raises(ValueError):
        VoterId.parse("TMR_MV")


@pytest.mark.parametrize("x, y, z, expected", [
    (0, 1, 1, 1), (0, 0, 1, 0), (1, 1, 1, 1), (0, 0, 0, 0), (1, 0, 1, 1),
])
def test_majority_examples(x, y, z, expected):
    assert majority(x, y, z) == expected


def test_majority_matches_counting_oracle():
    for v in VECTORS:
        assert majority(*v) == majority_oracle(*v)


@given(bits, bits, bits)
def test_majority_symmetric(x, y, z):
    m = majority(x, y, z)
    assert all(majority(*p) == m for p in itertools.permutations((x, y, z)))


@given(bits, bits, bits)
def test_majority_self_dual(x, y, z):
    assert majority(1 - x, 1 - y, 1 - z) == 1 - majority(x, y, z)


def test_instance_counts(voters):
    assert {v.value: len(nl.instances) for v, nl in voters.items()} == INSTANCE_COUNTS


def test_interfaces(voters):
    for nl in voters.values():
        assert [nl.names[i] for i in nl.primary_inputs] == ["X", "Y", "Z"]
        assert nl.names[nl.primary_output] == "V"


def test_named_internal_nets(voters):
    assert "N" in voters[VoterId.OAAO_MV].names
    assert "K" in voters[VoterId.AOOA_MV].names


def test_structures(voters):
    kinds = {v: sorted(i.kind.value for i in nl.instances) for v, nl in voters.items()}
    assert kinds[VoterId.NAND_MV] == ["NAND2", "NAND2", "NAND2", "NAND3"]
    assert kinds[VoterId.KP_MV] == ["AND2", "INV", "MUX2", "XOR2", "XOR2"]
    assert kinds[VoterId.MUX41_MV] == ["MUX4"]
    assert kinds[VoterId.XNM_MV] == ["MUX2", "XNOR2"]


def test_every_voter_is_majority(voters):
    for vid, nl in voters.items():
        assert truth_table(nl) == tuple(majority_oracle(*v) for v in VECTORS), vid
        for v in VECTORS:
            assert expr_eval(nl, v) == majority_oracle(*v)


def test_voters_inherit_self_duality(voters):
    for nl in voters.values():
        for v in VECTORS:
            comp = tuple(1 - b for b in v)
            out = nl.primary_output
            assert evaluate(nl, comp)[out] == 1 - evaluate(nl, v)[out]


def test_verify_reports():
    rep = verify_voter(VoterId.KP_MV)
    assert rep.equivalent and rep.checked == 8
    assert all(verify_voter(v).equivalent for v in VoterId)
    assert verify_voter("OA022_MV").name == "OAO22_MV"


def test_mutated_bn_mv_has_counterexample():
    b = NetlistBuilder()
    s = b.add(CellKind.XOR2, "X", "Y", name="s")
    b.add(CellKind.MUX2, s, "Z", "Y", name="V")  # data inputs swapped
    rep = check_majority(b.build("V"), "BN_swapped")
    assert not rep.equivalent
    assert (0, 1, 0) in rep.counterexamples
    # enumerate the swapped mux directly: sel = X^Y picks Y when 1, Z when 0
    expected = [v for v in VECTORS if (v[1] if v[0] ^ v[1] else v[2]) != majority_oracle(*v)]
    assert rep.counterexamples == expected


def test_check_majority_needs_three_inputs():
    b = NetlistBuilder(["a"])
    b.add(CellKind.INV, "a", name="q")
    with pytest.raises(ValueError):
        check_majority(b.build("q"))


def test_build_is_pure():
    assert build_voter(VoterId.AO_MV) == build_voter("AO_MV")
