import json

import pytest
from hypothesis import given

from sigmasub.errors import NotChiefFactor, NotSigmaSoluble, ParseError, ValidationError
from sigmasub.group import prime_factors, subgroup_as_group
from sigmasub.lattice import is_nilpotent, is_soluble, lattice_of, whole
from sigmasub.sigma import (
    F_sigma,
    F_sigma_by_scan,
    O_Pi,
    O_upper,
    SigmaPartition,
    all_chief_factors_sigma_central,
    complete_hall_sigma_sets,
    count_complete_hall_sets,
    group_blocks,
    hall_subgroups,
    has_complete_hall_set,
    is_pi_closed,
    is_sigma_central,
    is_sigma_coprime,
    is_sigma_fiber,
    is_sigma_nilpotent,
    is_sigma_primary,
    is_sigma_soluble,
    l_sigma,
    load_partition_file,
    pi_part,
    sigma_basis_sets,
    sigma_block_label,
    sigma_of,
    sigma_residual,
    upper_sigma_series,
)
from sigmasub.errors import HallSetCapExceeded

import oracles
from oracles import grp
from strategies import coarsen, group_and_partition

FINEST = SigmaPartition.finest()
ONE = SigmaPartition.one_block()


def test_partition_validation_and_names():
    with pytest.raises(ValidationError):
        SigmaPartition.from_blocks([[2, 4]])
    with pytest.raises(ValidationError):
        SigmaPartition.from_blocks([[2, 3], [3]])
    with pytest.raises(ValidationError):
        SigmaPartition.from_blocks([[]])
    with pytest.raises(ValidationError):
        SigmaPartition.two_block([])
    assert FINEST.describe() == "finest"
    assert ONE.describe() == "one-block"
    assert SigmaPartition.two_block({3, 2}).describe() == "two-block:2,3"
    assert SigmaPartition.from_blocks([[5], [3, 2]]).describe() == "blocks:2,3|5"


def test_block_ids():
    s = SigmaPartition.two_block({3, 5})
    assert s.block_of(5) == 3 and s.block_of(2) == 0 and s.block_of(7) == 0
    assert FINEST.block_of(7) == 7
    assert s.induced([2, 3, 5, 7]) == ((2, 7), (3, 5))
    assert sigma_block_label(s, 0) == "rest" and sigma_block_label(s, 3) == "{3,5}"


def test_partition_files(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"blocks": [[2, 3], [5]]}))
    assert load_partition_file(p).induced([2, 3, 5]) == ((2, 3), (5,))
    p.write_text("{")
    with pytest.raises(ParseError):
        load_partition_file(p)
    p.write_text(json.dumps({"blocks": [[2, 3], [3]]}))
    with pytest.raises(ValidationError):
        load_partition_file(p)
    p.write_text(json.dumps({"blocks": "2,3"}))
    with pytest.raises(ValidationError):
        load_partition_file(p)


def test_number_helpers():
    s = SigmaPartition.two_block({2, 3})
    assert sigma_of(s, 60) == {2, 0}
    assert is_sigma_primary(s, 12) and not is_sigma_primary(FINEST, 12)
    assert is_sigma_primary(FINEST, 1)
    assert pi_part(s, 60, {2}) == 12
    assert is_sigma_coprime(s, 12, 5) and not is_sigma_coprime(FINEST, 6, 3)
    assert is_sigma_fiber(grp("S3"), FINEST) and not is_sigma_fiber(grp("S3"), ONE)
    assert group_blocks(s, 60) == [2, 0]


def test_hall_subgroups():
    A5 = grp("A5")
    assert [h.order for h in hall_subgroups(A5, {2, 3}, FINEST)] == [12] * 5
    assert hall_subgroups(A5, {3, 5}, FINEST) == []
    assert count_complete_hall_sets(A5, FINEST) == 300
    assert has_complete_hall_set(A5, FINEST)
    assert not has_complete_hall_set(A5, SigmaPartition.two_block({3, 5}))
    with pytest.raises(HallSetCapExceeded):
        complete_hall_sigma_sets(A5, FINEST, cap=100)
    assert len(sigma_basis_sets(grp("S3"), FINEST)) == 3
    assert sigma_basis_sets(A5, FINEST) == []


def test_characteristic_subgroups_s3():
    S3 = grp("S3")
    assert O_Pi(S3, {3}, FINEST).order == 3
    assert O_Pi(S3, {2}, FINEST).order == 1
    assert O_upper(S3, 2, FINEST).order == 3
    assert O_upper(S3, 3, FINEST).order == 6
    assert is_pi_closed(S3, {3}, FINEST) and not is_pi_closed(S3, {2}, FINEST)
    assert F_sigma(S3, FINEST).order == 3
    assert sigma_residual(S3, FINEST).order == 3
    assert [F.order for F in upper_sigma_series(S3, FINEST)] == [1, 3, 6]
    # O_Π for a two-block Π is not inside F_σ in general
    assert O_Pi(S3, {2, 3}, FINEST).order == 6 and F_sigma(S3, FINEST).order == 3


def test_l_sigma_values():
    assert l_sigma(grp("S3"), FINEST) == 2
    assert l_sigma(grp("S4"), FINEST) == 3
    assert l_sigma(grp("Q8"), FINEST) == 1
    with pytest.raises(NotSigmaSoluble):
        l_sigma(grp("A5"), FINEST)
    assert l_sigma(grp("A5"), ONE) == 1


def test_sigma_central():
    S3 = grp("S3")
    lat = lattice_of(S3)
    c3 = lat.sub(next(i for i in range(len(lat)) if lat.orders[i] == 3))
    assert not is_sigma_central(S3, FINEST, c3, lat.sub(0))
    assert is_sigma_central(S3, FINEST, whole(S3), c3)
    with pytest.raises(NotChiefFactor):
        is_sigma_central(S3, FINEST, whole(S3), lat.sub(0))
    assert not all_chief_factors_sigma_central(S3, FINEST)
    assert all_chief_factors_sigma_central(S3, ONE)


def lower_sigma_length(G, sigma):
    """Length of the iterated σ-residual series, a second route to l_σ."""
    n, cur = 0, G
    while cur.order > 1:
        R = sigma_residual(cur, sigma)
        if R.order == cur.order:
            return None
        cur = subgroup_as_group(cur, R.mask)[0]
        n += 1
    return n


@given(group_and_partition())
def test_fitting_routes_agree(gs):
    G, sigma = gs
    assert F_sigma(G, sigma) == F_sigma_by_scan(G, sigma)
    assert is_sigma_nilpotent(F_sigma(G, sigma), sigma)


@given(group_and_partition())
def test_upper_and_lower_lengths_agree(gs):
    G, sigma = gs
    lower = lower_sigma_length(G, sigma)
    if is_sigma_soluble(G, sigma):
        assert l_sigma(G, sigma) == lower
    else:
        assert lower is None


@given(group_and_partition())
def test_sigma_nilpotent_iff_chief_factors_central(gs):
    G, sigma = gs
    assert is_sigma_nilpotent(G, sigma) == all_chief_factors_sigma_central(G, sigma)
    assert is_sigma_nilpotent(G, sigma) == (sigma_residual(G, sigma).order == 1)


@given(group_and_partition())
def test_coarsening_is_monotone(gs):
    G, sigma = gs
    coarse = coarsen(sigma, prime_factors(G.order))
    if is_sigma_nilpotent(G, sigma):
        assert is_sigma_nilpotent(G, coarse)
    if is_sigma_soluble(G, sigma):
        assert is_sigma_soluble(G, coarse)
    assert F_sigma(G, sigma) <= F_sigma(G, coarse)


@pytest.mark.parametrize("name", ["S3", "S4", "A4", "SL(2,3)", "A5", "C7:C6", "D30", "C2xA4", "Q8"])
def test_finest_specialisation(name):
    G = grp(name)
    assert is_sigma_nilpotent(G, FINEST) == is_nilpotent(G)
    assert is_sigma_soluble(G, FINEST) == is_soluble(G)
    assert sigma_residual(G, FINEST).mask == oracles.lower_central_limit(G)
    assert is_sigma_nilpotent(G, ONE) and is_sigma_soluble(G, ONE)
