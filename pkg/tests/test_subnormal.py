import pytest
from hypothesis import given, strategies as st

from sigmasub.errors import NotContained, TrivialGroup
from sigmasub.group import Cyclic, construct, iter_bits, prime_factors
from sigmasub.lattice import Subgroup, is_subnormal, lattice_of, whole
from sigmasub.sigma import SigmaPartition, is_sigma_soluble
from sigmasub.subnormal import (
    ChainWitness,
    analysis,
    chains_without_sn_entry,
    is_sigma_quasinormal,
    is_sigma_subnormal,
    m_sigma,
    m_sigma_q,
    maximality_invariants,
    sigma_quasinormal_set,
    sigma_subnormal_set,
    spencer_height,
)

import oracles
from oracles import grp
from strategies import coarsen, group_and_partition

FINEST = SigmaPartition.finest()
ONE = SigmaPartition.one_block()

# finest σ: (#σ-subnormal, m_σ, m_σq, h_σ), frozen after agreeing with the
# chain-definition oracles in tests/oracles.py
FROZEN = {
    "S3": (3, 2, 2, 2),
    "A4": (6, 2, 3, 2),
    "S4": (7, 4, 4, 4),
    "D8": (10, 1, 1, 1),
    "Q8": (6, 1, 1, 1),
    "SL(2,3)": (7, 3, 3, 3),
    "C3:C4": (5, 2, 2, 2),
    "D12": (7, 3, 3, 3),
    "A5": (2, 4, 4, 4),
    "C7:C6": (5, 3, 3, 3),
    "(C3xC3):C2": (7, 3, 3, 3),
    "C2xA4": (18, 3, 4, 3),
    "D30": (5, 3, 3, 3),
    "S3xC5": (6, 3, 3, 3),
}


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_frozen_invariants(name):
    G = grp(name)
    inv = maximality_invariants(G, FINEST)
    n_sn, m, mq, h = FROZEN[name]
    assert len(sigma_subnormal_set(G, FINEST)) == n_sn
    assert (inv.m_sigma, inv.m_sigma_q, inv.spencer_height) == (m, mq, h)
    assert inv.monotonicity_flag


@pytest.mark.parametrize("name", ["S3", "A4", "S4", "SL(2,3)", "D12", "C7:C6", "C2xA4", "A5"])
@pytest.mark.parametrize("sigma", [FINEST, SigmaPartition.two_block({2})], ids=["finest", "2|rest"])
def test_against_chain_oracles(name, sigma):
    G = grp(name)
    lat = lattice_of(G)
    subs = set(lat.masks)
    s = analysis(G, sigma)
    sn = oracles.sn_oracle(G, sigma, subs)
    assert {lat.masks[i] for i in iter_bits(s.sn_bits())} == sn
    assert s.m_sigma() == oracles.m_sigma_oracle(G, sn, subs)
    assert s.spencer_height()[0] == oracles.h_sigma_oracle(G, sn, subs)


@pytest.mark.parametrize("name", ["S3", "A4", "S4", "SL(2,3)", "D12", "C2xA4", "A5", "F20"])
def test_finest_quasinormal_is_sylow_permutable(name):
    G = grp(name)
    lat = lattice_of(G)
    qn = {H.mask for H in sigma_quasinormal_set(G, FINEST)}
    assert qn == oracles.s_quasinormal_oracle(G, set(lat.masks))
    assert m_sigma_q(G, FINEST) == oracles.m_sigma_oracle(G, qn, set(lat.masks))


def test_a5_sets():
    A5 = grp("A5")
    assert {H.order for H in sigma_subnormal_set(A5, FINEST)} == {1, 60}
    assert m_sigma_q(A5, FINEST) == 4
    assert spencer_height(A5, FINEST) == (4, True)


def test_witnesses_validate():
    for name in ["S4", "SL(2,3)", "C2xA4", "C7:C6"]:
        G = grp(name)
        for sigma in (FINEST, SigmaPartition.two_block({3})):
            lat = lattice_of(G)
            for i in range(len(lat)):
                ok, w = is_sigma_subnormal(lat.sub(i), G, sigma)
                if ok:
                    assert w.chain[0] == G.full_mask and w.chain[-1] == lat.masks[i]
                    assert w.validate(G, sigma)
                else:
                    assert w is None


def test_witness_rejects_tampering():
    G = grp("S3")
    lat = lattice_of(G)
    c2 = next(i for i in range(len(lat)) if lat.orders[i] == 2)
    # C2 is not normal in S3 and |S3 : core| = 6 is not σ-primary, yet claim a normal step
    bogus = ChainWitness((G.full_mask, lat.masks[c2]), ("normal",))
    assert not bogus.validate(G, FINEST)
    ok, w = is_sigma_subnormal(lat.sub(c2), G, SigmaPartition.two_block({2, 3}))
    assert ok and w.validate(G, SigmaPartition.two_block({2, 3}))
    assert w.to_json()["steps"] == ["primary:2"]


def test_relative_subnormality_and_errors():
    S4 = grp("S4")
    lat = lattice_of(S4)
    a4 = next(i for i in range(len(lat)) if lat.orders[i] == 12)
    v4 = next(i for i in range(len(lat)) if lat.orders[i] == 4 and lat.normal[i])
    ok, _ = is_sigma_subnormal(lat.sub(v4), lat.sub(a4), FINEST)
    assert ok
    c3 = next(i for i in range(len(lat)) if lat.orders[i] == 3)
    assert not is_sigma_subnormal(lat.sub(c3), lat.sub(a4), FINEST)[0]
    with pytest.raises(NotContained):
        is_sigma_subnormal(lat.sub(a4), lat.sub(v4), FINEST)
    with pytest.raises(NotContained):
        is_sigma_subnormal(Subgroup(grp("S3"), 1), S4, FINEST)


def test_quasinormal_without_hall_set():
    A5 = grp("A5")
    s = SigmaPartition.two_block({3, 5})
    res = is_sigma_quasinormal(whole(A5), A5, s)
    assert res.value is False and res.diagnostic == "NoCompleteHallSet"
    assert maximality_invariants(A5, s).no_complete_hall_set
    val, hall = is_sigma_quasinormal(whole(grp("S3")), grp("S3"), FINEST)
    assert val and len(hall) == 2


def test_trivial_group():
    G = construct(Cyclic(1))
    assert m_sigma(G, FINEST) == 1
    with pytest.raises(TrivialGroup):
        spencer_height(G, FINEST)


def test_chains_without_sn_entry():
    S3 = grp("S3")
    chains = list(chains_without_sn_entry(S3, FINEST, 1))
    assert len(chains) == 3  # S3 > C2, three times
    assert list(chains_without_sn_entry(S3, FINEST, 2)) == []


# ---------------------------------------------------------------------------
# properties


@given(group_and_partition())
def test_basic_set_relations(gs):
    G, sigma = gs
    s = analysis(G, sigma)
    lat = s.lat
    sn = s.sn_bits()
    # normal subgroups, 1 and G are σ-subnormal
    assert all((sn >> i) & 1 for i in lat.normal_indices())
    # σ-subnormality is invariant under conjugation
    for cls in lat.classes:
        assert len({(sn >> i) & 1 for i in cls}) == 1
    inv = s.invariants()
    if G.order > 1:
        assert inv.spencer_height <= inv.m_sigma
    if not inv.no_complete_hall_set:
        assert inv.m_sigma <= inv.m_sigma_q
    if is_sigma_soluble(G, sigma):
        assert s.qn_bits() & ~sn == 0


@given(group_and_partition())
def test_coarser_partition_has_more_sigma_subnormal(gs):
    G, sigma = gs
    coarse = coarsen(sigma, prime_factors(G.order))
    a, b = analysis(G, sigma), analysis(G, coarse)
    assert a.sn_bits() & ~b.sn_bits() == 0
    assert b.m_sigma() <= a.m_sigma()


@given(st.sampled_from(list(FROZEN) + ["C30", "Dic16", "C5:C4", "D24"]))
def test_finest_matches_classical_subnormality(name):
    G = grp(name)
    lat = lattice_of(G)
    W = whole(G)
    s = analysis(G, FINEST)
    classical = sum(1 << i for i in range(len(lat)) if is_subnormal(lat.sub(i), W))
    assert s.sn_bits() == classical


@given(group_and_partition())
def test_one_block_everything_sigma_subnormal(gs):
    G, _ = gs
    s = analysis(G, ONE)
    assert s.sn_bits() == (1 << len(s.lat)) - 1
    inv = s.invariants()
    assert (inv.m_sigma, inv.m_sigma_q, inv.spencer_height) == (1, 1, 1)
