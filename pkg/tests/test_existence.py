from dataclasses import replace

import pytest

from hilferbvp import specfun
from hilferbvp.errors import DomainError, InadmissibleExponentError
from hilferbvp.existence import (
    certificate,
    certificate_at,
    hoelder_constants,
    rho_lp_norm,
    sweep_certificates,
)
from hilferbvp.expr import parse
from hilferbvp.problemio import example_problem_path, load_problem
from hilferbvp.solver import derive_params

# frozen oracle values for the bundled instance at p = 4 (q = 4/3), computed
# ahead of time by direct evaluation of the closed forms in 50-digit
# arithmetic:
#   Lambda = Gamma(1/9) Gamma(1/3) / Gamma(4/9)
#   Delta  = Gamma(7/9) Gamma(1/3) / Gamma(10/9)
#   rho    = (1/16) (1/5)^{1/4}
LAMBDA_P4 = 11.456586824501692
DELTA_P4 = 3.3669044815441846
RHO_P4 = 0.041796269061026377
G_P4 = 0.18339289117636599
L_P4 = 0.08121015390487931


def example():
    spec = load_problem(str(example_problem_path()))
    return spec, derive_params(spec)


# ---------------------------------------------------------------------------
# Hoelder constants
# ---------------------------------------------------------------------------


def test_hoelder_q1_reduces_to_beta():
    for mu, gamma in [(1.0 / 3.0, 0.5), (0.7, 0.85), (0.2, 0.4)]:
        lam, delta = hoelder_constants(1.0, mu, gamma)
        assert lam == pytest.approx(specfun.beta(mu, gamma), rel=1e-12)
        assert delta == pytest.approx(specfun.beta(1.0 + mu - gamma, gamma), rel=1e-12)


def test_hoelder_frozen_values():
    lam, delta = hoelder_constants(4.0 / 3.0, 1.0 / 3.0, 0.5)
    assert lam == pytest.approx(LAMBDA_P4, rel=1e-12)
    assert delta == pytest.approx(DELTA_P4, rel=1e-12)


def test_hoelder_inadmissible_names_condition():
    with pytest.raises(InadmissibleExponentError) as err:
        hoelder_constants(2.0, 1.0 / 3.0, 0.5)
    assert "q*(mu-1)+1" in str(err.value)


# ---------------------------------------------------------------------------
# growth-bound norm
# ---------------------------------------------------------------------------


def test_rho_norm_p1():
    assert rho_lp_norm(parse("t/16"), 1.0, 0.0, 1.0) == pytest.approx(
        1.0 / 32.0, rel=1e-10
    )


def test_rho_norm_p4():
    assert rho_lp_norm(parse("t/16"), 4.0, 0.0, 1.0) == pytest.approx(RHO_P4, rel=1e-10)


def test_rho_norm_zero():
    assert rho_lp_norm(parse("0"), 3.0, 0.0, 1.0) == 0.0


def test_rho_norm_sub_one_exponent():
    # generalized functional used by the literal-reference comparison
    assert rho_lp_norm(parse("t/16"), 0.5, 0.0, 1.0) == pytest.approx(
        1.0 / 36.0, rel=1e-10
    )


def test_rho_norm_rejects_bad_exponent():
    with pytest.raises(DomainError):
        rho_lp_norm(parse("t"), 0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        rho_lp_norm(parse("t"), 1.0, 1.0, 0.0)


def test_rho_norm_nonsmooth_integrand():
    # |.|^p with p = 3 of a sign-changing rho; oracle: int_0^1 |s-1/2|^3 ds
    value = rho_lp_norm(parse("t-0.5"), 3.0, 0.0, 1.0)
    assert value == pytest.approx((1.0 / 32.0) ** (1.0 / 3.0), rel=1e-9)


# ---------------------------------------------------------------------------
# certificate
# ---------------------------------------------------------------------------


def test_certificate_paper_literal_inadmissible():
    spec, params = example()
    rep = certificate(spec, params)  # file exponent p = 1/2
    assert rep.verdict == "inadmissible"
    assert not rep.admissible
    assert "p > 1" in rep.failed_conditions
    assert "p > 1/mu" in rep.failed_conditions
    assert "p > 1/gamma" in rep.failed_conditions
    assert rep.rho_norm == pytest.approx(1.0 / 36.0, rel=1e-9)


def test_certificate_p4_satisfied_frozen():
    spec, params = example()
    rep = certificate_at(spec, params, 4.0)
    assert rep.verdict == "satisfied"
    assert rep.admissible
    assert rep.lambda_const == pytest.approx(LAMBDA_P4, rel=1e-10)
    assert rep.delta_const == pytest.approx(DELTA_P4, rel=1e-10)
    assert rep.rho_norm == pytest.approx(RHO_P4, rel=1e-10)
    assert rep.G == pytest.approx(G_P4, rel=1e-10)
    assert rep.L_star == pytest.approx(L_P4, rel=1e-10)
    assert rep.G < 1.0 and rep.L_star < 1.0
    assert sum(rep.terms_G) == pytest.approx(rep.G, rel=1e-14)
    assert sum(rep.terms_L) == pytest.approx(rep.L_star, rel=1e-14)


def test_certificate_scaled_rho_violated():
    spec, params = example()
    big = replace(spec, rho=parse("1000*(t/16)"), p=4.0)
    rep = certificate(big, params)
    assert rep.verdict == "violated"
    assert rep.G > 1.0


def test_certificate_scaling_linearity():
    spec, params = example()
    base = certificate_at(spec, params, 4.0)
    s = 7.5
    scaled = certificate(replace(spec, rho=parse(f"{s!r}*(t/16)"), p=4.0), params)
    assert scaled.rho_norm == pytest.approx(s * base.rho_norm, rel=1e-12)
    assert scaled.G == pytest.approx(s * base.G, rel=1e-12)
    assert scaled.L_star == pytest.approx(s * base.L_star, rel=1e-12)
    assert scaled.lambda_const == base.lambda_const
    assert scaled.delta_const == base.delta_const


def test_certificate_q_conjugacy():
    spec, params = example()
    for p in (0.5, 1.5, 2.5, 4.0, 8.0, 64.0):
        rep = certificate_at(spec, params, p)
        assert abs(1.0 / rep.p + 1.0 / rep.q - 1.0) <= 1e-14


def test_certificate_monotone_in_interval_length():
    spec, params = example()
    previous = None
    for b in (1.0, 1.5, 2.0):
        stretched = replace(spec, b=b, p=4.0)
        rep = certificate(stretched, derive_params(stretched))
        if previous is not None:
            assert rep.G > previous
        previous = rep.G


def test_certificate_verdict_stable_under_tiny_perturbation():
    spec, params = example()
    base = certificate_at(spec, params, 4.0)
    assert base.verdict == "satisfied"
    for eps in (1e-12, -1e-12):
        bumped = replace(spec, c=spec.c * (1.0 + eps), p=4.0 * (1.0 + eps))
        rep = certificate(bumped, derive_params(bumped))
        assert rep.verdict == "satisfied"


def test_certificate_near_one_boundary_admissibility():
    # p slightly above 1/mu = 3 is admissible, slightly below is not
    spec, params = example()
    assert certificate_at(spec, params, 3.0 + 1e-6).admissible
    rep = certificate_at(spec, params, 3.0 - 1e-6)
    assert not rep.admissible
    assert rep.verdict == "inadmissible"


def test_sweep_reports():
    spec, params = example()
    reports, best = sweep_certificates(spec, params)
    assert [r.p for r in reports] == [4.0, 8.0, 16.0, 64.0]
    assert all(r.verdict == "satisfied" for r in reports)
    assert max(best.G, best.L_star) == min(max(r.G, r.L_star) for r in reports)
    # the literal constants 0.03 / 0.14 do not occur at any admissible p
    for r in reports:
        assert abs(r.G - 0.03) > 0.01
        assert abs(r.L_star - 0.14) > 0.01
