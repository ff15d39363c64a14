import json

import pytest

from sigmasub import cli
from sigmasub.corpus import AllTwoBlocks, Finest, builtin_corpus, directory_corpus, partitions_for
from sigmasub.errors import HallSetCapExceeded
from sigmasub.group import Cyclic, construct, save_group_file
from sigmasub.sigma import SigmaPartition
from sigmasub.verifier import (
    CHECK_IDS,
    CHECKS,
    PRECONDITIONS,
    Context,
    Outcome,
    VerifyConfig,
    export_dot,
    marked_nodes,
    revalidate,
    run_check,
    verify_corpus,
    verify_group,
)

from oracles import grp

FINEST = SigmaPartition.finest()


def by_check(results):
    return {r.check: r for r in results}


def test_catalogue_is_complete():
    assert len(CHECK_IDS) == 28 and set(CHECKS) == set(CHECK_IDS)


def test_a5_examples():
    res = by_check(verify_group(grp("A5"), FINEST))
    assert res["T1.4.ii"].status == "skipped"
    assert res["T1.4.ii"].precondition == "m_sigma_between_2_and_3"
    assert res["P3.4"].status == "pass"
    assert not any(res["P3.4"].details.values())
    assert res["L4.2.1"].details == {"m_sigma": 4, "m_sigma_q": 4}


def test_s3_and_c12_examples():
    s3 = by_check(verify_group(grp("S3"), FINEST))
    assert s3["C1.7"].status == "pass"
    assert s3["C1.7"].details == {"m_sigma_is_2": True, "schmidt_abelian_sylows_fiber": True}
    c12 = by_check(verify_group(grp("C12"), FINEST))
    assert c12["P3.4"].status == "pass" and all(c12["P3.4"].details.values())


@pytest.mark.parametrize("name, check", [
    ("A4", "C1.7"), ("SL(2,3)", "T1.4.ii"), ("A4", "T1.4.ii"), ("S3", "L3.7"),
    ("SL(2,3)", "L3.7"), ("A4", "C3.9"), ("C7:C6", "T1.10.fwd"), ("C30", "L3.6"),
])
def test_non_vacuous_passes(name, check):
    (r,) = verify_group(grp(name), FINEST, [check])
    assert r.status == "pass"


def test_t110_reports_both_readings():
    (r,) = verify_group(grp("A4"), FINEST, ["T1.10.fwd"])
    assert r.details["type_ii"] and r.details["type_ii_exists_reading"]
    assert {"a_basis_all", "a_basis_exists"} <= set(r.details["clauses"])


def test_skip_soundness_over_corpus():
    entries = builtin_corpus(with_tags=False)
    n = 0
    for e in entries:
        G = e.build()
        for sp in partitions_for(G, [Finest(), AllTwoBlocks()]):
            ctx = Context(G, sp)
            for r in verify_group(G, sp):
                if r.status == "skipped":
                    assert r.precondition in PRECONDITIONS
                    assert PRECONDITIONS[r.precondition](ctx) is False
                    n += 1
    assert n > 0


def bogus_check(ctx):
    # a deliberately false claim: every group has m_σ = 1
    return Outcome(ctx.m == 1, {"m_sigma": ctx.m})


def test_fail_path_and_witness_revalidation():
    G = grp("S4")
    r = run_check("L4.2.1", Context(G, FINEST), bogus_check)
    assert r.status == "fail" and r.witness == {"m_sigma": 4}
    assert revalidate(r, G, FINEST, bogus_check)
    # the real check passes on the same pair, so the false witness does not survive it
    assert not revalidate(r, G, FINEST)


def test_capped_path():
    def capped(ctx):
        raise HallSetCapExceeded("too many")
    r = run_check("P3.2.iii", Context(grp("S3"), FINEST), capped)
    assert r.status == "capped" and "too many" in r.details["reason"]


def test_corpus_run_reports_injected_failure(monkeypatch):
    monkeypatch.setitem(CHECKS, "L4.2.1", bogus_check)
    entries = [e for e in builtin_corpus(with_tags=False) if e.name in ("S3", "C4")]
    rep = verify_corpus(entries, [Finest()], VerifyConfig(checks=("L4.2.1",)))
    assert rep.failed()
    assert [(r.group, r.status) for r in rep.results] == [("C4", "pass"), ("S3", "fail")]


def test_empty_corpus():
    rep = verify_corpus([], [Finest()])
    assert rep.results == [] and rep.summary["total"] == 0 and rep.summary["fail"] == 0
    assert json.loads(rep.to_json())["schema"] == 1


def test_error_isolation(tmp_path):
    save_group_file(grp("S3"), tmp_path / "good.json")
    (tmp_path / "bad.json").write_text('{"kind": "cayley", "table": [[0, 1], [1, 1]]}')
    rep = verify_corpus(directory_corpus(tmp_path), [Finest()])
    assert [e["entry"] for e in rep.errors] == ["bad"]
    assert {r.group for r in rep.results} == {"good"}  # entries are named by file stem
    assert rep.summary["errors"] == 1


def test_max_order_excludes():
    entries = [e for e in builtin_corpus(with_tags=False) if e.name in ("A5", "S3")]
    rep = verify_corpus(entries, [Finest()], VerifyConfig(max_order=10))
    assert rep.excluded == [{"entry": "A5", "order": 60}]


def test_report_is_deterministic_across_worker_counts():
    entries = [e for e in builtin_corpus(with_tags=False) if e.order and e.order <= 24]
    a = verify_corpus(entries, [Finest(), AllTwoBlocks()], VerifyConfig(jobs=1))
    b = verify_corpus(entries, [Finest(), AllTwoBlocks()], VerifyConfig(jobs=3))
    assert a.to_json(with_timestamp=False) == b.to_json(with_timestamp=False)
    assert "timestamp" in json.loads(a.to_json())


def test_report_rows_include_question_gaps():
    entries = [e for e in builtin_corpus(with_tags=False) if e.name == "A5"]
    rep = verify_corpus(entries, [Finest()])
    (row,) = rep.invariants
    assert row["m_sigma_q"] == 4
    assert row["pi_minus_m_sigma"] == 3 - 4 and row["pi_minus_h_sigma"] == 3 - 4


def test_dot_export():
    dot = export_dot(grp("S3"), FINEST, ["sigma-subnormal"])
    assert dot.count("label=") == 6 and marked_nodes(dot, "sigma-subnormal") == 3
    assert "rankdir=BT" in dot and dot == export_dot(grp("S3"), FINEST, ["sigma-subnormal"])
    assert export_dot(construct(Cyclic(1)), FINEST).count("label=") == 1
    dot = export_dot(grp("A5"), FINEST, ["sigma-subnormal"])
    assert dot.count("label=") == 59 and marked_nodes(dot, "sigma-subnormal") == 2
    assert 'label="2:15-' in dot  # fifteen involutions
    with pytest.raises(ValueError):
        export_dot(grp("S3"), FINEST, ["pretty"])


# ---------------------------------------------------------------------------
# command line


def test_cli_analyze(capsys):
    assert cli.main(["analyze", "builtin:S4", "--json"]) == 0
    (row,) = json.loads(capsys.readouterr().out)
    assert (row["m_sigma"], row["l_sigma"], row["rank"], row["sigma_residual_order"]) == (4, 3, 2, 12)


def test_cli_verify_and_exit_codes(tmp_path, capsys, monkeypatch):
    out = tmp_path / "r.json"
    assert cli.main(["verify", "--max-order", "12", "--sigma", "finest", "--report", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["schema"] == 1 and rep["summary"]["fail"] == 0
    assert cli.main(["verify", "--sigma", "bogus"]) == 2
    assert cli.main(["verify", "--corpus", f"dir:{tmp_path / 'missing'}"]) == 2
    assert cli.main(["verify", "--checks", "T9.9"]) == 2
    assert cli.main(["verify", "--sigma", f"file:{tmp_path / 'none.json'}"]) == 2
    monkeypatch.setitem(CHECKS, "L4.2.1", bogus_check)
    assert cli.main(["verify", "--max-order", "6", "--sigma", "finest", "--checks", "L4.2.1"]) == 1
    assert "FAIL L4.2.1" in capsys.readouterr().out


def test_cli_lattice_and_list(tmp_path, capsys):
    dot = tmp_path / "s3.dot"
    assert cli.main(["lattice", "builtin:S3", "--dot", str(dot), "--mark", "normal,sigma-subnormal"]) == 0
    assert marked_nodes(dot.read_text(), "normal") == 3
    dot4 = export_dot(grp("S4"), FINEST, ["normal", "sigma-subnormal"])
    assert (marked_nodes(dot4, "normal"), marked_nodes(dot4, "sigma-subnormal")) == (4, 7)
    assert cli.main(["lattice", "builtin:S3", "--dot", str(dot), "--mark", "shiny"]) == 2
    assert cli.main(["list-corpus", "--json"]) == 0
    rows = json.loads(capsys.readouterr().out.split("\n", 1)[1])
    assert {"name": "S5", "order": 120, "optional": True, "tags": []} in rows
