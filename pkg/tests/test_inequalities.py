"""Inequality checkers: constants, regime dispatch, verdicts."""

import numpy as np
import pytest

from cdcalc import inequalities as ineq
from cdcalc.certify import CDParams
from cdcalc.report import relative_violation

POS = CDParams(1.0, 0.5, 1.0, 2)  # su2 reference parameters
ZERO = CDParams(0.0, 0.5, 1.0, 2)  # heisenberg reference parameters


def test_constant_factors_hand_computed():
    # c1 = 1 + 3 kappa / (2 rho2) = 4 at (rho2, kappa) = (1/2, 1)
    c1, c0 = ineq.li_yau_constants_zero(ZERO, 2.0)
    assert c1 == 4.0
    assert c0 == 2 * 16 / (2 * 2.0)  # d c1^2 / (2t)

    alpha, beta = ineq.li_yau_constants_positive(POS, 1.0)
    r = 2 * 1.0 * 0.5 / (3 * 1.5)  # decay rate 2/9
    assert abs(alpha - 4.0 * np.exp(-r)) < 1e-14
    pref = 2 * 1.0 * 0.5 / (3 * 1.5) * 16
    assert abs(beta - pref * np.exp(-2 * r) / (1 - np.exp(-r))) < 1e-12

    a = 1.0 * 0.5 / 1.5
    g = ineq.reverse_poincare_constant(POS, 1.0)
    assert abs(g - 0.5 * 2.5 / 1.5 * np.exp(-2 * a) / (1 - np.exp(-a))) < 1e-12

    assert abs(ineq.lichnerowicz_bound(POS) - 0.4) < 1e-15
    assert abs(ineq.cheeger_bound(POS) - 0.5 * np.sqrt(0.5) / 5.0) < 1e-15
    assert abs(
        ineq.ultracontractive_bound(POS, 2.0)
        - (1 - np.exp(-r * 2.0)) ** (-4.0)
    ) < 1e-12

    C2 = ineq.poincare_constant(POS, 2)
    assert abs(C2 - 4.0 * np.sqrt(18.0)) < 1e-12
    assert abs(1.0 / C2**2 - 1.0 / 288.0) < 1e-15


def test_lichnerowicz_kappa_zero_recovers_classical_formula():
    """kappa = 0 gives exactly rho1 d/(d-1)."""
    for d in (2.0, 3.0, 5.0):
        p = CDParams(1.7, 0.8, 0.0, d)
        assert ineq.lichnerowicz_bound(p) == pytest.approx(
            1.7 * d / (d - 1.0), rel=1e-15
        )


def test_dual_exponent_substitution():
    t, p = 1.0, 4.0
    plain = ineq.pseudo_poincare_constant(ZERO, t, p, "zero")
    dual = ineq.pseudo_poincare_constant(ZERO, t, p, "zero", dual_exponent=True)
    c1 = 4.0
    assert plain == pytest.approx(
        c1 * np.sqrt(2 * 2 * t) / np.sqrt(1 + (p - 1) * c1)
    )
    pp = p / (p - 1)
    assert dual == pytest.approx(
        c1 * np.sqrt(2 * 2 * t) / np.sqrt(1 + (pp - 1) * c1)
    )
    assert dual > plain  # the dual form is the weaker (larger) constant
    # p < 2 branch carries no (p-1) factor: flag is a no-op
    assert ineq.pseudo_poincare_constant(
        ZERO, t, 1.5, "zero"
    ) == ineq.pseudo_poincare_constant(ZERO, t, 1.5, "zero", dual_exponent=True)


def test_positive_regime_rejected_at_zero_rho1():
    with pytest.raises(ValueError, match="rho1"):
        ineq.li_yau_constants_positive(ZERO, 1.0)
    with pytest.raises(ValueError, match="rho1"):
        ineq.reverse_poincare_constant(ZERO, 1.0)
    with pytest.raises(ValueError, match="rho1"):
        ineq.lichnerowicz_bound(ZERO)
    with pytest.raises(ValueError, match="rho1"):
        ineq.pseudo_poincare_constant(ZERO, 1.0, 2, "positive")
    with pytest.raises(ValueError, match="rho1"):
        ineq.gradient_bound_constant(ZERO, 1.0, 2, "positive")


def test_checker_regime_dispatch_rejects(su2_lattice10, su2_operator10):
    with pytest.raises(ValueError, match="rho1"):
        ineq.check_li_yau_positive(
            su2_lattice10, ZERO, operator=su2_operator10
        )
    with pytest.raises(ValueError, match="rho1"):
        ineq.check_reverse_poincare(
            su2_lattice10, ZERO, operator=su2_operator10
        )
    with pytest.raises(ValueError, match="rho1"):
        ineq.check_lichnerowicz(su2_lattice10, ZERO, operator=su2_operator10)


def test_unsupported_p_norm_rejected(su2_lattice10, su2_operator10):
    with pytest.raises(ValueError, match="p_norm"):
        ineq.check_gradient_bounds(
            su2_lattice10, POS, p_norm=3, operator=su2_operator10
        )
    with pytest.raises(ValueError, match="p_norm"):
        ineq.check_pseudo_poincare(
            su2_lattice10, POS, p_norm=0.5, operator=su2_operator10
        )


def test_li_yau_requires_positive_functions(su2_lattice10, su2_operator10):
    f = np.zeros(su2_lattice10.n)
    with pytest.raises(ValueError, match="positive"):
        ineq.check_li_yau_positive(
            su2_lattice10, POS, fs=[f], operator=su2_operator10
        )


def test_positive_regime_suite_small_lattice(su2_lattice10, su2_operator10):
    G, op = su2_lattice10, su2_operator10
    short = np.geomspace(0.5, 3.0, 4)
    fs = ineq.positive_functions(G, 8, seed=1)
    r = ineq.check_li_yau_positive(G, POS, fs=fs, t_grid=short, operator=op)
    assert r.passed and r.witnesses == 32
    r = ineq.check_reverse_poincare(
        G, POS, fs=ineq.random_functions(G, 8, 1), t_grid=short, operator=op
    )
    assert r.passed
    for p in (1, 2, np.inf):
        r = ineq.check_gradient_bounds(
            G, POS, p_norm=p, regime="positive",
            fs=ineq.random_functions(G, 5, 2), t_grid=short, operator=op,
        )
        assert r.passed, p
    r = ineq.check_poincare(G, POS, operator=op, seed=3)
    assert r.passed
    assert r.details["spectral_margin"] > 0


def test_zero_regime_suite_small_lattice(h1_lattice12, h1_operator12):
    G, op = h1_lattice12, h1_operator12
    short = np.geomspace(0.2, 3.0, 4)
    r = ineq.check_li_yau_zero(
        G, ZERO, fs=ineq.positive_functions(G, 8, 5), t_grid=short, operator=op
    )
    assert r.passed
    r = ineq.check_pseudo_poincare(
        G, ZERO, p_norm=1.5, regime="zero",
        fs=ineq.random_functions(G, 5, 6), operator=op,
    )
    assert r.passed


def test_spectral_pseudo_poincare_exact(su2_operator10, su2_lattice10):
    r = ineq.check_pseudo_poincare_spectral(
        su2_lattice10, POS, operator=su2_operator10
    )
    assert r.passed
    assert r.max_violation <= 0.0


def test_seeded_reproducibility(su2_lattice10, su2_operator10):
    G, op = su2_lattice10, su2_operator10
    t = np.geomspace(0.5, 2.0, 3)
    a = ineq.check_li_yau_positive(G, POS, t_grid=t, operator=op, seed=9)
    b = ineq.check_li_yau_positive(G, POS, t_grid=t, operator=op, seed=9)
    c = ineq.check_li_yau_positive(G, POS, t_grid=t, operator=op, seed=10)
    assert a.max_violation == b.max_violation
    assert a.max_violation != c.max_violation


def test_besov_norm_flags(su2_lattice10, su2_operator10):
    G, op = su2_lattice10, su2_operator10
    with pytest.raises(ValueError):
        ineq.besov_norm(G, np.ones(G.n), 0.5, operator=op)
    const = ineq.besov_norm(G, np.ones(G.n), -2.0, operator=op)
    assert const.at_right_end  # ||P_t 1||_inf = 1, sup runs off t -> inf
    f = ineq.random_functions(G, 1, 11)[0]
    f = f - G.mean(f)
    bn = ineq.besov_norm(G, f, -2.0, operator=op)
    assert not bn.is_lower_bound_only
    assert bn.value > 0


def test_improved_sobolev_lattice_band(su2_lattice10, su2_operator10):
    r = ineq.check_improved_sobolev(
        su2_lattice10, POS, operator=su2_operator10, seed=2
    )
    assert r.passed
    live = [x for x, fl in zip(r.details["ratios"], r.details["flags"]) if fl == "ok"]
    assert live
    with pytest.raises(ValueError):
        ineq.check_improved_sobolev(
            su2_lattice10, POS, p=4, q=2, operator=su2_operator10
        )


def test_cheeger_requires_probability_measure(h1_lattice12):
    with pytest.raises(ValueError, match="normalized"):
        ineq.check_cheeger(h1_lattice12, POS)


def test_cheeger_small_lattice(su2_lattice10):
    r = ineq.check_cheeger(su2_lattice10, POS)
    assert r.passed
    assert r.details["ratios"]  # at least one candidate with mu <= 1/2
    assert all(row["ratio"] >= ineq.cheeger_bound(POS) for row in r.details["ratios"])


def test_ultracontractivity_small_lattice(su2_lattice10, su2_operator10):
    r = ineq.check_ultracontractivity(
        su2_lattice10, POS, operator=su2_operator10
    )
    assert r.passed
    assert len(r.details["curve"]) == 12


def test_equivalence_chain_validates_exponents():
    with pytest.raises(ValueError):
        ineq.check_equivalence_chain(D=3)


def test_relative_violation_sign_convention():
    assert relative_violation(1.0, 2.0) < 0
    assert relative_violation(3.0, 2.0) > 0
    assert relative_violation(2.0, 2.0) == 0.0
