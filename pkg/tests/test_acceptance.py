"""Acceptance suite: one test per criterion, each printing a single
PASS/FAIL line.  Budgets are wall-clock seconds and are asserted."""
import collections
import subprocess
import sys
import time

import pytest

from sigmasub.corpus import AllTwoBlocks, Finest, builtin_corpus
from sigmasub.group import Alternating, construct, iter_bits, prime_factors
from sigmasub.lattice import (
    enumerate_subgroups,
    is_nilpotent,
    is_soluble,
    lattice_of,
    rank,
    subgroups_by_subset_filter,
)
from sigmasub.sigma import (
    SigmaPartition,
    is_sigma_nilpotent,
    is_sigma_primary,
    is_sigma_soluble,
    l_sigma,
    sigma_residual,
)
from sigmasub.subnormal import analysis, m_sigma, m_sigma_q, sigma_subnormal_set, spencer_height
from sigmasub.verifier import CHECK_IDS, VerifyConfig, verify_corpus

import oracles
from test_sigma import lower_sigma_length

FINEST = SigmaPartition.finest()
ONE = SigmaPartition.one_block()

BUDGET = {1: 30.0, 2: 10.0, 3: 60.0, 4: 300.0, 5: 120.0, 7: 300.0}


@pytest.fixture
def emit(capsys):
    def _emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {n}] {'PASS' if ok else 'FAIL'}: {detail}")
    return _emit


def test_criterion_1_a5_quasinormal_depth(emit):
    t = time.perf_counter()
    A5 = construct(Alternating(5))  # fresh instance, nothing cached
    value = m_sigma_q(A5, FINEST)
    dt = time.perf_counter() - t
    ok = value == 4 and dt < BUDGET[1]
    emit(1, ok, f"m_sigma_q(A5, finest) = {value} (want 4) in {dt:.2f}s (< {BUDGET[1]:.0f}s)")
    assert value == 4
    assert dt < BUDGET[1]


def test_criterion_2_lattice_matches_subset_filter(emit):
    t = time.perf_counter()
    checked, bad = [], []
    for e in builtin_corpus(include_optional=True, with_tags=False):
        G = e.build()
        if G.order > 12:
            continue
        checked.append(e.name)
        if set(enumerate_subgroups(G).masks) != subgroups_by_subset_filter(G):
            bad.append(e.name)
    dt = time.perf_counter() - t
    ok = not bad and len(checked) > 0 and dt < BUDGET[2]
    emit(2, ok, f"{len(checked)} groups of order <= 12, mismatches {bad}, {dt:.2f}s (< {BUDGET[2]:.0f}s)")
    assert not bad and checked
    assert dt < BUDGET[2]


def test_criterion_3_fixture_values(emit):
    t = time.perf_counter()
    g = oracles.grp
    facts = {}

    def sn_and_subs(name):
        G = g(name)
        subs = oracles.k_generated(G, 2)
        return G, subs, oracles.sn_oracle(G, FINEST, subs)

    for name, want in (("S3", 2), ("A4", 2), ("S4", 4)):
        G, subs, sn = sn_and_subs(name)
        got = m_sigma(G, FINEST)
        facts[f"m_sigma({name})"] = (got, oracles.m_sigma_oracle(G, sn, subs), want)
    for name, want in (("S3", 2), ("A5", 4)):
        G, subs, sn = sn_and_subs(name)
        got = spencer_height(G, FINEST)[0]
        facts[f"h_sigma({name})"] = (got, oracles.h_sigma_oracle(G, sn, subs), want)
    for name, want in (("S3", 2), ("S4", 3)):
        G = g(name)
        facts[f"l_sigma({name})"] = (l_sigma(G, FINEST), lower_sigma_length(G, FINEST), want)
    S4 = g("S4")
    chief = oracles.chief_orders_oracle(S4, oracles.k_generated(S4, 2))
    facts["rank(S4)"] = (rank(S4), max(sum(prime_factors(f).values()) for f in chief), 2)
    S3 = g("S3")
    R = sigma_residual(S3, FINEST)
    c3 = next(m for m in oracles.k_generated(S3, 1) if m.bit_count() == 3)
    facts["residual(S3) is C3"] = (R.mask, oracles.lower_central_limit(S3), c3)
    A5 = g("A5")
    got = {H.mask for H in sigma_subnormal_set(A5, FINEST)}
    _, _, sn = sn_and_subs("A5")
    facts["SN(A5)"] = (got, sn, {1, A5.full_mask})
    dt = time.perf_counter() - t

    wrong = [k for k, (got, oracle, want) in facts.items() if not got == oracle == want]
    ok = not wrong and dt < BUDGET[3]
    emit(3, ok, f"{len(facts)} fixtures, library == oracle == expected except {wrong}, {dt:.2f}s (< {BUDGET[3]:.0f}s)")
    assert not wrong
    assert dt < BUDGET[3]


def test_criterion_4_theorem_suite(emit):
    t = time.perf_counter()
    rep = verify_corpus(builtin_corpus(with_tags=False), [Finest(), AllTwoBlocks()],
                       VerifyConfig(selectors=("finest", "all-two-blocks")))
    dt = time.perf_counter() - t
    fails = [(r.check, r.group, r.sigma) for r in rep.results if r.status == "fail"]
    live = collections.Counter(r.check for r in rep.results if r.status in ("pass", "fail"))
    uncovered = [c for c in CHECK_IDS if live[c] == 0]
    fired = {(r.check, r.group) for r in rep.results if r.sigma == "finest" and r.status == "pass"}
    named = {
        "C1.7 on S3": ("C1.7", "S3") in fired,
        "C1.7 on A4": ("C1.7", "A4") in fired,
        "T1.10 on a Schmidt/Frobenius entry": any(
            ("T1.10.fwd", n) in fired and ("T1.10.conv", n) in fired
            for n in ("S3", "A4", "D10", "C7:C3", "C13:C3", "C11:C5", "C3:C4")),
        "T1.4.ii on SL(2,3) or A4": ("T1.4.ii", "SL(2,3)") in fired or ("T1.4.ii", "A4") in fired,
    }
    missing = [k for k, v in named.items() if not v]
    ok = not fails and not uncovered and not missing and not rep.errors and dt < BUDGET[4]
    emit(4, ok, f"{len(rep.results)} results, fails {len(fails)}, uncovered {uncovered}, "
                f"named instances missing {missing}, errors {len(rep.errors)}, {dt:.1f}s (< {BUDGET[4]:.0f}s)")
    assert not fails, fails[:5]
    assert not uncovered and not missing and not rep.errors
    assert dt < BUDGET[4]


def test_criterion_5_sigma_subnormal_sublattice(emit):
    t = time.perf_counter()
    pairs = violations = 0
    groups = 0
    for e in builtin_corpus(with_tags=False):
        G = e.build()
        if G.order > 60:
            continue
        groups += 1
        p = min(prime_factors(G.order), default=2)
        for sigma in (FINEST, SigmaPartition.two_block({p})):
            s = analysis(G, sigma)
            lat = s.lat
            sn = [lat.masks[i] for i in iter_bits(s.sn_bits())]
            snset = set(sn)
            for i, a in enumerate(sn):
                for b in sn[i + 1:]:
                    pairs += 1
                    join = oracles.closure(G, iter_bits(a | b))
                    if join not in snset or (a & b) not in snset:
                        violations += 1
    dt = time.perf_counter() - t
    ok = violations == 0 and pairs > 0 and dt < BUDGET[5]
    emit(5, ok, f"{groups} groups x 2 partitions, {pairs} pairs, {violations} violations, "
                f"{dt:.2f}s (< {BUDGET[5]:.0f}s)")
    assert violations == 0 and pairs > 0
    assert dt < BUDGET[5]


def test_criterion_6_specialisation(emit):
    bad = []
    n = 0
    for e in builtin_corpus(include_optional=True, with_tags=False):
        G = e.build()
        n += 1
        if is_sigma_nilpotent(G, FINEST) != is_nilpotent(G):
            bad.append((e.name, "finest nilpotent"))
        if is_sigma_soluble(G, FINEST) != is_soluble(G):
            bad.append((e.name, "finest soluble"))
        s = analysis(G, ONE)
        one_ok = (is_sigma_nilpotent(G, ONE) and is_sigma_soluble(G, ONE) and is_sigma_primary(ONE, G)
                  and s.sn_bits() == (1 << len(lattice_of(G))) - 1 and s.m_sigma() == 1)
        if not one_ok:
            bad.append((e.name, "one-block"))
    ok = not bad
    emit(6, ok, f"{n} groups, violations {bad}")
    assert not bad


def test_criterion_7_report_determinism(emit, tmp_path):
    t = time.perf_counter()
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        subprocess.run([sys.executable, "-m", "sigmasub", "verify", "--report", str(p)],
                       check=True, capture_output=True)

    def body(p):
        return b"\n".join(line for line in p.read_bytes().splitlines() if b'"timestamp"' not in line)
    a, b = (body(p) for p in paths)
    had_stamp = all(b'"timestamp"' in p.read_bytes() for p in paths)
    dt = time.perf_counter() - t
    ok = a == b and had_stamp and dt < BUDGET[7]
    emit(7, ok, f"two verify runs, {len(a)} bytes each, identical={a == b} (timestamp line excluded), {dt:.1f}s")
    assert a == b and had_stamp
    assert dt < BUDGET[7]
