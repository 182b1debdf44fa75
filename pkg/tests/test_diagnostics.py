import numpy as np
import pytest

from riemopt.diagnostics import (
    MANIFOLD_NAMES,
    check_connection_axioms,
    check_gradient_fd,
    check_hessian_duality,
    check_projection,
    default_suite,
    run_checks,
)
from riemopt.flag import FlagQuotient
from riemopt.linalg import BlockPartition, sym
from riemopt.problems import flag_quadratic_problem, random_spd_matrix, weighted_pca_problem
from riemopt.psd_fixed_rank import PsdFixedRank
from riemopt.spd import SymmetricPositiveDefinite, logdet_problem
from riemopt.sphere import Sphere
from riemopt.stiefel import Stiefel, rayleigh_problem

from mutants import (
    FlagProjectionWrongBlockRule,
    PsdGammaMissingProjectionDerivative,
    StiefelGammaDropsMetricTerm,
    StiefelRgradSwappedParams,
)


def test_all_default_suites_pass():
    for name in MANIFOLD_NAMES:
        reports = default_suite(name, trials=20, seed=0)
        for report in reports:
            assert report.passed, report.row()


def test_sphere_gamma_against_framework_is_tight():
    report = check_connection_axioms(Sphere(7), trials=10, seed=3)
    assert report.passed


def test_reports_are_deterministic():
    a = check_projection(Stiefel(7, 3, 1.0, 0.5), trials=15, seed=5)
    b = check_projection(Stiefel(7, 3, 1.0, 0.5), trials=15, seed=5)
    assert a == b


def test_worst_seed_replays_worst_error():
    man = PsdFixedRank(8, 3, 1.0, 0.5, 2.0)
    full = check_projection(man, trials=25, seed=11)
    replay = check_projection(man, trials=1, seed=full.worst_seed)
    assert replay.max_error == pytest.approx(full.max_error, rel=1e-12)


def test_grassmann_case_matches_closed_form_projection():
    man = FlagQuotient(9, BlockPartition((4,), 4), 1.0, 0.5)
    report = check_projection(man, trials=50, seed=2)
    assert report.passed


# -- negative controls ---------------------------------------------------------

def test_mutant_dropped_metric_term_detected():
    mutant = StiefelGammaDropsMetricTerm(8, 3, 1.0, 0.5)
    report = check_connection_axioms(mutant, trials=10, seed=0)
    assert not report.passed
    assert report.max_error > 0
    # the clean geometry passes the identical check
    assert check_connection_axioms(Stiefel(8, 3, 1.0, 0.5), trials=10, seed=0).passed


def test_mutant_wrong_block_rule_detected():
    part = BlockPartition((2, 2), 4)
    mutant = FlagProjectionWrongBlockRule(8, part, 1.0, 0.5)
    report = check_projection(mutant, trials=10, seed=0)
    assert not report.passed
    assert check_projection(FlagQuotient(8, part, 1.0, 0.5), trials=10, seed=0).passed


def test_mutant_missing_projection_derivative_detected():
    mutant = PsdGammaMissingProjectionDerivative(8, 3, 1.0, 0.5, 2.0)
    report = check_connection_axioms(mutant, trials=10, seed=0)
    assert not report.passed
    assert check_connection_axioms(
        PsdFixedRank(8, 3, 1.0, 0.5, 2.0), trials=10, seed=0
    ).passed


def test_mutant_swapped_metric_params_detected(rng):
    a = random_spd_matrix(rng, 8)
    prob = rayleigh_problem(a)
    mutant = StiefelRgradSwappedParams(8, 3, 1.0, 0.25)
    report = check_gradient_fd(mutant, prob, trials=10, seed=0)
    assert not report.passed
    assert check_gradient_fd(Stiefel(8, 3, 1.0, 0.25), prob, trials=10, seed=0).passed


# -- problem-coupled checks ---------------------------------------------------------

def test_hessian_duality_across_problems(rng):
    part = BlockPartition((2, 1), 3)
    lam = np.array([2.0, 2.0, 1.0])
    cases = [
        (
            FlagQuotient(8, part, 1.0, 0.5),
            flag_quadratic_problem(random_spd_matrix(rng, 8), lam),
        ),
        (
            PsdFixedRank(8, 3, 1.0, 1.0, 0.7),
            weighted_pca_problem(
                sym(rng.standard_normal((8, 8))), rng.uniform(0.5, 1.5, size=8)
            ),
        ),
        (SymmetricPositiveDefinite(5), logdet_problem(random_spd_matrix(rng, 5))),
    ]
    for man, prob in cases:
        report = check_hessian_duality(man, prob, trials=10, seed=1)
        assert report.passed, report.row()


def test_gradient_fd_linear_cost_on_sphere_is_tight(rng):
    from riemopt.sphere import rayleigh_problem as sphere_rayleigh

    a = np.diag(rng.uniform(1.0, 2.0, size=6))
    report = check_gradient_fd(Sphere(6), sphere_rayleigh(a), trials=10, seed=4)
    assert report.passed
    assert report.max_error <= 1e-7


def test_run_checks_bundle(rng):
    man = Stiefel(7, 3, 1.0, 0.5)
    prob = rayleigh_problem(random_spd_matrix(rng, 7))
    reports = run_checks(man, prob, trials=20, seed=0)
    assert len(reports) == 4
    assert all(r.passed for r in reports)
