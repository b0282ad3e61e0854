import json
import math

import pytest

from corel import Cospan, Span, gamma, pi
from corel.finset import FinFn, FinSetEngine
from corel.harness import (
    COVERAGE_NOTE,
    Job,
    SuiteReport,
    default_plan,
    normalise_suite,
    report_json,
    report_text,
    report_tsv,
    run_job,
    suite_abelian_iso,
    suite_assumption,
    suite_counts,
    suite_functoriality,
    suite_iso_factorisation,
    suite_lattice,
    suite_monoidal,
    suite_presentation,
    suite_scalars,
    suite_square_commutes,
)
from corel.jsonio import engine_from_flag
from corel.lattice import FiniteLattice, builtin_lattice
from corel.linalg import QQ, PrimeField

F = FinSetEngine()
INJ = F.with_subcategory("M")


def fn(table, cod):
    return FinFn.of(table, cod)


def injection_count(bound):
    return sum(math.perm(m, n) for m in range(bound + 1) for n in range(m + 1))


# --- report bookkeeping ----------------------------------------------------


def test_status_table():
    rep = SuiteReport("x", "e")
    rep.check(True, lambda: 1 / 0)  # describe is only called on failure
    assert rep.status == "pass" and rep.ok
    rep.check(False, lambda: ("in", "want", "got"))
    assert rep.status == "fail" and not rep.ok
    assert rep.witness.to_dict() == {"input": "in", "expected": "want", "got": "got"}
    rep.expect_fail = True
    assert rep.status == "xfail" and rep.ok
    assert SuiteReport("x", "e", expect_fail=True).status == "xpass"


def test_only_the_first_failures_are_kept_but_all_are_counted():
    rep = SuiteReport("x", "e")
    for k in range(20):
        rep.check(False, lambda k=k: (k, None, None))
    assert rep.failure_count == 20 and len(rep.failures) < 20
    assert rep.witness.input == 0


def test_elapsed_time_only_serialised_on_request():
    rep = SuiteReport("x", "e", elapsed=1.5)
    assert "elapsed" not in rep.to_dict()
    assert rep.to_dict(timings=True)["elapsed"] == 1.5


def test_suite_name_aliases():
    assert normalise_suite("square_commutes") == "square"
    assert normalise_suite("er-per-iso") == "er-per"
    with pytest.raises(KeyError):
        normalise_suite("nope")


# --- individual suites -----------------------------------------------------


def test_square_at_bound_zero_has_one_instance():
    rep = suite_square_commutes(INJ, 0)
    assert rep.status == "pass" and rep.instances == 1


def test_square_covers_every_small_injection():
    rep = suite_square_commutes(INJ, 3)
    assert rep.status == "pass"
    assert rep.instances >= injection_count(3) == 24


def test_square_over_gf2():
    assert suite_square_commutes(engine_from_flag("linfp:2", "C"), 2).status == "pass"


def test_functoriality_trivial_and_sampled():
    assert suite_functoriality(INJ, 0).status == "pass"
    rep = suite_functoriality(engine_from_flag("linq", "C"), 2, samples=30)
    assert rep.status == "pass" and rep.params.get("seed") is not None


def test_assumption_holds_for_injections():
    rep = suite_assumption(INJ, 3)
    assert rep.status == "pass" and rep.instances > 0


def test_assumption_fails_for_all_functions_with_minimal_witness():
    rep = suite_assumption(F.with_subcategory("C"), 2, expect_fail=True)
    assert rep.status == "xfail"
    w = rep.witness
    # the cospan 0 -> 1 <- 2 whose mediator 2 -> 1 is not injective
    assert (w.input["dom"], w.input["cod"]) == (0, 2)
    assert w.input["right"]["table"] == [0, 0]
    assert w.got["mediator"] == {"dom": 2, "cod": 1, "table": [0, 0]}


def test_dual_assumption_fails_with_non_surjective_mediator():
    rep = suite_assumption(F.with_subcategory("C"), 3, dual=True, expect_fail=True)
    assert rep.status == "xfail"
    w = rep.witness
    assert (w.input["dom"], w.input["cod"]) == (2, 2)
    assert w.input["left"]["dom"] == 3
    med = w.got["mediator"]
    assert (med["dom"], med["cod"]) == (3, 4)
    assert len(set(med["table"])) < 4


def test_dual_witness_with_both_legs_surjective():
    """The span 2 <- 3 -> 2 with legs [0,0,1] and [0,1,1]."""
    p, q = fn([0, 0, 1], 2), fn([0, 1, 1], 2)
    f, g = F.pushout(p, q)
    assert f.cod == 1
    a, b = F.pullback(f, g)
    assert a.dom == 4
    mediator = F.pullback_mediator(a, b, p, q)
    assert (mediator.dom, mediator.cod) == (3, 4)
    assert not F.epi(mediator)


def test_unexpected_pass_is_reported():
    rep = suite_assumption(INJ, 1, expect_fail=True)
    assert rep.status == "xpass" and not rep.ok


def test_presentation_generator_equation():
    empty_cospan = Cospan(INJ, fn([], 1), fn([], 1))
    empty_span = Span(INJ, fn([], 0), fn([], 0))
    assert gamma(empty_cospan) == pi(empty_span)
    assert suite_presentation(INJ, 2).status == "pass"


def test_presentation_scalar_squares_over_q():
    rep = suite_presentation(engine_from_flag("linq", "C"), 1, samples=20)
    assert rep.status == "pass"


def test_monoidal_suite_small():
    assert suite_monoidal(INJ, 2).status == "pass"
    assert suite_monoidal(engine_from_flag("linfp:2", "C"), 1).status == "pass"


def test_iso_factorisation_small():
    assert suite_iso_factorisation(F, 2).status == "pass"


def test_abelian_iso_small():
    assert suite_abelian_iso(PrimeField(2), 1).status == "pass"
    assert suite_abelian_iso(QQ, 2, samples=25).status == "pass"


def test_counts_and_scalars():
    assert suite_counts(2).status == "pass"
    assert suite_scalars().status == "pass"


def test_lattice_suite_on_builtins_and_a_chain():
    for name in ("chain2", "diamond", "two-points", "chain2+diamond"):
        assert suite_lattice(builtin_lattice(name), name).status == "pass"
    assert suite_lattice(FiniteLattice.chain(4)).status == "pass"


# --- jobs and determinism --------------------------------------------------


def test_expected_failures_are_derived_from_the_job():
    assert Job("assumption", "finset", "C").expect_fail
    assert Job("assumption", "finset", "F", dual=True).expect_fail
    assert not Job("assumption", "finset", "M").expect_fail
    assert Job("functoriality", "z", "M", part="pi").expect_fail
    assert not Job("functoriality", "z", "M", part="gamma").expect_fail
    assert Job("presentation", "z", part="pullback").expect_fail
    assert not Job("presentation", "z", part="pushout").expect_fail


def test_default_plan_has_unique_jobs():
    plan = default_plan()
    assert len(plan) == len(set(plan))
    assert sum(j.expect_fail for j in plan) >= 3


def test_sampled_reports_are_reproducible():
    job = Job("functoriality", "z", "M", bound=1, samples=20, part="gamma")
    a, b = run_job(job), run_job(job)
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
    c = run_job(Job("functoriality", "z", "M", bound=1, samples=20, part="gamma", seed=5))
    assert c.params["seed"] == 5


def test_renderers_agree_on_outcome():
    reps = [run_job(Job("scalars")), run_job(Job("assumption", "finset", "C", bound=2))]
    doc = report_json(reps, 1)
    assert doc["ok"] and doc["note"] == COVERAGE_NOTE
    assert [s["status"] for s in doc["suites"]] == [r.status for r in reps]
    text = report_text(reps, 1)
    assert text.endswith("overall OK\n")
    tsv = report_tsv(reps).splitlines()
    assert tsv[0].split("\t")[:3] == ["suite", "engine", "status"] and len(tsv) == 3


def test_plots_are_written(tmp_path):
    from corel.plotting import plot_failures, plot_summary

    reps = [run_job(Job("scalars")), run_job(Job("assumption", "finset", "C", bound=2))]
    a, b = plot_summary(reps, tmp_path / "s.png"), plot_failures(reps, tmp_path / "f.png")
    assert a.stat().st_size > 0 and b.stat().st_size > 0
