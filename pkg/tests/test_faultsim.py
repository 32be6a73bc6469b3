import itertools

import pytest

from oracles import expr_eval, majority_oracle
from tmrvote.faultsim import (
    CAMPAIGN_COLUMNS,
    CampaignError,
    FaultSite,
    MaskingReport,
    campaign,
    compose_tmr,
    module_fault_masking,
    mutate,
    voter_set_sensitivity,
)
from tmrvote.gatelib import CellKind
from tmrvote.netlist import NetlistBuilder, evaluate, truth_table
from tmrvote.voters import VoterId, build_voter

VECTORS = list(itertools.product((0, 1), repeat=3))


def inv_module():
    b = NetlistBuilder(["a"])
    b.add(CellKind.INV, "a", name="q")
    return b.build("q")


def three_input_module():
    # an arbitrary non-symmetric function: (a ^ b) | c'
    b = NetlistBuilder(["a", "b", "c"])
    x = b.add(CellKind.XOR2, "a", "b", name="x")
    nc = b.add(CellKind.INV, "c", name="nc")
    b.add(CellKind.OR2, x, nc, name="q")
    return b.build("q")


def wide_module(n):
    b = NetlistBuilder([f"i{k}" for k in range(n)])
    net = b.inputs[0]
    for k in range(1, n):
        net = b.add(CellKind.XOR2, net, b.inputs[k])
    return b.build(net)


def brute_force_sensitivity(nl):
    """Propagated count per instance-output net via recursive re-evaluation."""
    counts = {}
    for inst in nl.instances:
        counts[inst.output] = sum(
            expr_eval(nl, v, flip=inst.output) != expr_eval(nl, v) for v in VECTORS
        )
    return counts


# --- composition ---------------------------------------------------------

def test_compose_inv_with_ao_mv():
    sys_ = compose_tmr(inv_module(), VoterId.AO_MV)
    kinds = [i.kind for i in sys_.composed.instances]
    assert kinds.count(CellKind.INV) == 3
    assert len(kinds) == 3 + 4
    assert len(sys_.composed.primary_inputs) == 3


def test_compose_bn_mv_as_module():
    sys_ = compose_tmr(build_voter(VoterId.BN_MV), build_voter(VoterId.NAND_MV))
    assert len(sys_.composed.primary_inputs) == 9
    assert len(sys_.composed.instances) == 3 * 2 + 4


@pytest.mark.parametrize("module", [inv_module(), three_input_module()], ids=["inv", "f3"])
def test_fault_free_system_computes_module(module):
    for vid in VoterId:
        sys_ = compose_tmr(module, vid)
        for vec in itertools.product((0, 1), repeat=sys_.width):
            assert sys_.evaluate(vec) == evaluate(module, vec)[module.primary_output]


def test_copies_are_identical():
    sys_ = compose_tmr(three_input_module(), VoterId.XAO22_MV)
    comp = sys_.composed
    per_copy = [
        [(i.kind, tuple(comp.names[x][3:] for x in i.inputs)) for i in comp.instances
         if comp.names[i.output].startswith(f"m{c}_")]
        for c in (1, 2, 3)
    ]
    assert per_copy[0] == per_copy[1] == per_copy[2]


def test_compose_rejects_bad_voters():
    with pytest.raises(ValueError):
        compose_tmr(inv_module(), inv_module())
    b = NetlistBuilder()
    b.add(CellKind.OR3, "X", "Y", "Z", name="V")
    with pytest.raises(ValueError, match="majority"):
        compose_tmr(inv_module(), b.build("V"))


# --- module faults -------------------------------------------------------

@pytest.mark.parametrize("module", [inv_module(), three_input_module()], ids=["inv", "f3"])
def test_single_module_faults_always_masked(module):
    for vid in VoterId:
        rep = module_fault_masking(compose_tmr(module, vid))
        n = len(module.primary_inputs)
        assert rep.total_cases == 2 ** n * 3 * 3
        assert rep.propagated == 0 and rep.masked == rep.total_cases
        assert rep.sensitivity == 0
        assert len(rep.per_site) == 9


def test_double_flip_propagates():
    # enumerate by hand: two copies of INV(a) inverted, one correct
    expected = 0
    for a in (0, 1):
        good = 1 - a
        for pair in itertools.combinations(range(3), 2):
            outs = [1 - good if c in pair else good for c in range(3)]
            expected += majority_oracle(*outs) != good
    rep = module_fault_masking(compose_tmr(inv_module(), VoterId.BN_MV), models=["flip"], multiplicity=2)
    assert rep.propagated == expected == 6
    assert rep.total_cases == 2 * 3


def test_double_stuck_propagates_only_when_wrong():
    rep = module_fault_masking(compose_tmr(inv_module(), VoterId.AO_MV), multiplicity=2)
    by_model = {}
    for s in rep.per_site:
        by_model[s.sites[0].model] = by_model.get(s.sites[0].model, 0) + s.propagated
    # stuck-at-v is wrong for exactly one of the two inputs
    assert by_model == {"stuck0": 3, "stuck1": 3, "flip": 6}


def test_system_evaluate_with_faults():
    sys_ = compose_tmr(inv_module(), VoterId.OA222_MV)
    one = [FaultSite("module_output", 2, "stuck1")]
    two = one + [FaultSite("module_output", 3, "stuck1")]
    assert sys_.evaluate((1,), one) == 0
    assert sys_.evaluate((1,), two) == 1


def test_exhaustive_guard_and_sampling():
    sys_ = compose_tmr(wide_module(17), VoterId.AO_MV)
    with pytest.raises(CampaignError, match="sampl"):
        module_fault_masking(sys_)
    rep = module_fault_masking(sys_, samples=200, seed=3)
    assert rep.total_cases == 200 * 9
    assert rep.propagated == 0
    assert module_fault_masking(sys_, samples=200, seed=3) == rep


def test_sixteen_inputs_still_exhaustive():
    rep = module_fault_masking(compose_tmr(wide_module(16), VoterId.NAND_MV), models=["flip"])
    assert rep.total_cases == 2 ** 16 * 3
    assert rep.propagated == 0


def test_fault_site_invariants():
    with pytest.raises(ValueError):
        FaultSite("module_output", 4, "flip")
    with pytest.raises(ValueError):
        FaultSite("voter_net", 0, "bridge")
    with pytest.raises(ValueError):
        FaultSite("wire", 0, "flip")


# --- voter SETs ----------------------------------------------------------

def test_output_flip_always_propagates(voters):
    for nl in voters.values():
        rep = voter_set_sensitivity(nl)
        out_site = [s for s in rep.per_site if s.sites[0].index == nl.primary_output]
        assert out_site[0].propagated == 8


def test_ao222_single_net():
    rep = voter_set_sensitivity(VoterId.AO222_MV)
    assert rep.total_cases == 8 and rep.sensitivity == 1.0


def test_ao_mv_sensitivity_against_brute_force(voters):
    nl = voters[VoterId.AO_MV]
    expected = brute_force_sensitivity(nl)
    rep = voter_set_sensitivity(nl)
    assert {s.sites[0].index: s.propagated for s in rep.per_site} == expected
    assert rep.propagated == sum(expected.values())
    assert 0 < rep.sensitivity < 1
    assert rep.total_cases == 4 * 8


def test_override_equals_mutation_every_triple(voters):
    for vid, nl in voters.items():
        for net in nl.instance_output_nets():
            for model in ("flip", "stuck0", "stuck1"):
                fault = {"flip": lambda v, m: ~v & m, "stuck0": lambda v, m: 0,
                         "stuck1": lambda v, m: m}[model]
                mutant = mutate(nl, net, model)
                for v in VECTORS:
                    by_value = evaluate(nl, v, {net: fault})[nl.primary_output]
                    by_mutation = evaluate(mutant, v)[mutant.primary_output]
                    assert by_value == by_mutation, (vid, net, model, v)


def test_sensitivity_methods_agree(voters):
    for nl in voters.values():
        models = ("stuck0", "stuck1", "flip")
        assert voter_set_sensitivity(nl, models, "override") == voter_set_sensitivity(nl, models, "mutation")


def test_mutate_structure(voters):
    nl = voters[VoterId.BN_MV]
    s = nl.net_id("s")
    m = mutate(nl, s)
    assert len(m.instances) == len(nl.instances) + 1
    assert "s_raw" in m.names
    with pytest.raises(ValueError):
        mutate(nl, nl.net_id("X"))


def test_mutant_of_flip_truth_table(voters):
    nl = voters[VoterId.BN_MV]
    m = mutate(nl, nl.net_id("s"), "flip")
    # select inverted: picks Z when X == Y and Y otherwise
    assert truth_table(m) == tuple((v[1] if v[0] ^ v[1] else v[2]) for v in VECTORS)


def test_masking_report_tallies():
    rep = MaskingReport()
    rep.add([FaultSite("voter_net", 3, "flip")], 8, 3)
    rep.add([FaultSite("voter_net", 4, "flip")], 8, 8)
    assert (rep.total_cases, rep.propagated, rep.masked) == (16, 11, 5)
    assert rep.sensitivity == 11 / 16
    assert MaskingReport().sensitivity == 0


def test_unknown_method():
    with pytest.raises(ValueError):
        voter_set_sensitivity(VoterId.AO_MV, method="guess")


# --- campaign ------------------------------------------------------------

def test_campaign_rows(voters):
    rows = campaign(list(VoterId), vectors=256)
    assert [r.voter for r in rows] == [v.value for v in VoterId]
    for r in rows:
        nl = voters[VoterId[r.voter]]
        assert r.nets == len(nl.instances)
        assert r.cases == 8 * r.nets
        assert r.propagated == sum(brute_force_sensitivity(nl).values())
        assert r.sensitivity == r.propagated / r.cases
    assert len(CAMPAIGN_COLUMNS) == 7


def test_campaign_nand_vs_ao222(voters):
    rows = {r.voter: r for r in campaign(["NAND_MV", "AO222_MV"], vectors=64)}
    nand = brute_force_sensitivity(voters[VoterId.NAND_MV])
    ao222 = brute_force_sensitivity(voters[VoterId.AO222_MV])
    assert rows["NAND_MV"].sensitivity == sum(nand.values()) / (8 * len(nand))
    assert rows["AO222_MV"].sensitivity == sum(ao222.values()) / (8 * len(ao222))
    assert rows["NAND_MV"].sensitivity < rows["AO222_MV"].sensitivity


def test_campaign_deterministic_across_workers():
    ids = [VoterId.MUX41_MV, VoterId.AO_MV, VoterId.KP_MV, VoterId.AO_MV]
    a = campaign(ids, vectors=128, seed=9)
    assert campaign(ids, vectors=128, seed=9) == a
    assert campaign(ids, vectors=128, seed=9, workers=3) == a
    assert [r.voter for r in a] == ["AO_MV", "KP_MV", "MUX41_MV"]


def test_campaign_needs_ids():
    with pytest.raises(ValueError):
        campaign([])
