import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

import oracles
from piecewise_ldp import (AnalysisOnlyError, Duchi, Laplace, Ptt, RandomSource, derive_ptt_params,
                           ldp_ratio_audit, multidim_perturb, preset_params, ptt_density)
from piecewise_ldp.core import ParameterError, eta_upper_bound
from piecewise_ldp.mechanisms import duchi_atom, duchi_pmf, laplace_from_uniform, ptt_from_uniforms

LN3 = math.log(3.0)
N = 1_000_000


def _ptt(eps, eta, family):
    return Ptt(derive_ptt_params(eps, eta, family))


# -- Laplace -----------------------------------------------------------------

def test_laplace_inverse_cdf_endpoints():
    assert laplace_from_uniform(0.0, 1.0, 0.5) == 0.0
    y = laplace_from_uniform(0.0, 2.0, np.array([0.0, 1.0]))
    assert np.all(np.isfinite(y)) and y[0] < 0 < y[1]


def test_laplace_matches_cdf():
    mech = Laplace(1.0)
    ys = mech.perturb(np.full(N, 0.3), RandomSource(11))
    ks = stats.kstest(ys, lambda y: oracles.laplace_cdf(y, 0.3, 1.0)).statistic
    assert ks <= 0.002


def test_laplace_density_integrates_to_one():
    from scipy import integrate
    mech = Laplace(0.7)
    assert integrate.quad(lambda y: mech.density(y, -0.4), -np.inf, np.inf)[0] == pytest.approx(1.0, abs=1e-10)


# -- Duchi -------------------------------------------------------------------

def test_duchi_atoms_are_exact():
    mech = Duchi(1.0)
    ys = mech.perturb(np.linspace(-1, 1, 1001), RandomSource(3))
    assert set(np.unique(ys)) <= {mech.atom, -mech.atom}
    assert mech.atom == duchi_atom(1.0) == pytest.approx((math.e + 1) / (math.e - 1), rel=1e-15)


@pytest.mark.parametrize("A", [-1.0, 0.0, 0.6])
def test_duchi_frequency(A):
    mech = Duchi(LN3)
    ys = mech.perturb(np.full(N, A), RandomSource(5))
    pos = duchi_pmf(mech.atom, A, LN3)
    sd = math.sqrt(pos * (1 - pos) / N)
    assert abs(np.mean(ys > 0) - pos) <= 4 * sd


def test_duchi_pmf_sums_to_one():
    eps, A = 0.8, 0.25
    c = duchi_atom(eps)
    assert duchi_pmf(c, A, eps) + duchi_pmf(-c, A, eps) == pytest.approx(1.0, abs=1e-15)


# -- PTT sampler -------------------------------------------------------------

@pytest.mark.parametrize("family", ["type-i", "type-ii"])
@pytest.mark.parametrize("eps,eta,A", [(LN3, 2.0, 0.3), (1.0, 1.9, -1.0), (0.5, 1.4, 1.0)])
def test_sampler_matches_exact_cdf(family, eps, eta, A):
    prm = derive_ptt_params(eps, eta, family)
    ys = Ptt(prm).perturb(np.full(N, A), RandomSource(2024))
    cdf = lambda y: oracles.ptt_cdf(y, A, eps, prm.k, prm.a, prm.p, family == "type-ii")
    assert cdf(prm.B) == pytest.approx(1.0, abs=1e-12)
    assert stats.kstest(ys, cdf).statistic <= 0.002


@pytest.mark.parametrize("family", ["type-i", "type-ii"])
def test_samples_stay_in_support(family):
    prm = derive_ptt_params(1.0, 1.7, family)
    A = np.tile(np.array([-1.0, -0.3, 0.0, 0.9, 1.0]), 20_000)
    ys = Ptt(prm).perturb(A, RandomSource(9))
    assert np.all(np.abs(ys) <= prm.B)


@settings(max_examples=200, deadline=None)
@given(A=st.floats(-1, 1), uc=st.floats(0, 1, exclude_max=True), up=st.floats(0, 1, exclude_max=True),
       fam=st.sampled_from(["type-i", "type-ii"]), eps=st.floats(0.05, 8.0), frac=st.floats(0.01, 1.0))
def test_every_uniform_pair_lands_where_density_is_positive(A, uc, up, fam, eps, frac):
    prm = derive_ptt_params(eps, 1.0 + frac * (eta_upper_bound(eps, fam) - 1.0), fam)
    y = float(ptt_from_uniforms(A, prm, uc, up))
    assert -prm.B <= y <= prm.B
    assert ptt_density(y, A, prm) > 0


def test_edge_input_never_samples_empty_side():
    prm = derive_ptt_params(1.0, 2.0, "type-i")
    ys = Ptt(prm).perturb(np.ones(200_000), RandomSource(1))
    outside = ys[np.abs(ys - prm.k) > prm.a]
    assert outside.size and np.all(outside < prm.k - prm.a)


def test_band_choice_uses_strict_comparison():
    prm = derive_ptt_params(1.0, 2.0, "type-i")
    y = float(ptt_from_uniforms(0.0, prm, prm.q, 0.25))
    assert abs(y) > prm.a


def test_analysis_only_params_refused():
    prm = preset_params("optimal", 1.0, 0.6)
    with pytest.raises(AnalysisOnlyError):
        Ptt(prm)


def test_invalid_params_refused():
    prm = derive_ptt_params(1.0, 2.0, "type-i")
    import dataclasses
    with pytest.raises(ParameterError):
        Ptt(dataclasses.replace(prm, q=0.4))


@pytest.mark.parametrize("mech", [Laplace(1.0), Duchi(1.0), _ptt(1.0, 2.0, "type-ii")])
def test_same_seed_same_bits(mech):
    A = np.linspace(-1, 1, 5001)
    one = mech.perturb(A, RandomSource(42))
    two = mech.perturb(A, RandomSource(42))
    other = mech.perturb(A, RandomSource(43))
    assert one.tobytes() == two.tobytes()
    assert one.tobytes() != other.tobytes()


def test_scalar_in_scalar_out():
    assert isinstance(_ptt(1.0, 2.0, "type-i").perturb(0.2, RandomSource(0)), float)


def test_out_of_unit_input_rejected():
    with pytest.raises(ValueError):
        Laplace(1.0).perturb(np.array([0.0, 1.5]), RandomSource(0))


# -- density and the privacy audit -------------------------------------------

@pytest.mark.parametrize("family", ["type-i", "type-ii"])
def test_ptt_density_is_bounded_by_exp_eps_ratio(family):
    prm = derive_ptt_params(LN3, 2.0, family)
    rep = ldp_ratio_audit(prm, np.linspace(-1, 1, 41))
    assert rep.satisfied
    assert rep.max_ratio == pytest.approx(3.0, rel=1e-12)


class _Overspent:
    """Laplace noise calibrated to 2*eps while claiming eps."""

    epsilon = 1.0

    def density(self, y, A):
        return Laplace(2.0).density(y, A)


def test_audit_flags_a_broken_mechanism():
    rep = ldp_ratio_audit(_Overspent(), np.linspace(-1, 1, 11), np.linspace(-5, 5, 101))
    assert not rep.satisfied
    assert rep.max_ratio == pytest.approx(math.exp(2.0), rel=1e-12)


def test_audit_rejects_empty_grid():
    with pytest.raises(ValueError):
        ldp_ratio_audit(Laplace(1.0), [])


# -- multidimensional wrapper ------------------------------------------------

def test_forced_coordinate_is_scaled_by_d():
    mech = _ptt(1.0, 2.0, "type-i")
    t = np.array([0.5, -0.2, 0.8])
    x = mech.perturb(-0.2, RandomSource(0).child(7))
    rep = multidim_perturb(t, mech, RandomSource(0).child(7), chosen_index=2)
    assert rep.values[0].tolist() == [0.0, 3.0 * x, 0.0]
    assert rep.chosen_index.tolist() == [2]


def test_single_dimension_is_the_mechanism_itself():
    mech = Duchi(1.0)
    rep = multidim_perturb(np.full((20_000, 1), 0.4), mech, RandomSource(4))
    assert set(np.unique(rep.values)) <= {mech.atom, -mech.atom}
    assert np.all(rep.chosen_index == 1)


def test_exactly_one_nonzero_and_uniform_index():
    d = 4
    mech = _ptt(1.0, 2.0, "type-i")
    rep = multidim_perturb(np.zeros((N, d)) + 0.1, mech, RandomSource(8))
    assert np.all(np.count_nonzero(rep.values, axis=1) == 1)
    counts = np.bincount(rep.chosen_index - 1, minlength=d)
    assert stats.chisquare(counts).pvalue > 1e-6


def test_multidim_coordinate_means():
    d = 3
    truth = np.array([0.5, -0.2, 0.8])
    mech = _ptt(1.0, 2.0, "type-i")
    rep = multidim_perturb(np.tile(truth, (N, 1)), mech, RandomSource(77))
    from piecewise_ldp.analysis import variance_analytic
    for j in range(d):
        # per-draw second moment of the coordinate: d * (var + A^2) ; mean A
        second = d * (variance_analytic(mech, truth[j]) + truth[j] ** 2)
        sd = math.sqrt((second - truth[j] ** 2) / N)
        assert abs(rep.values[:, j].mean() - truth[j]) <= 4 * sd


def test_bad_forced_index():
    with pytest.raises(ValueError):
        multidim_perturb(np.zeros((2, 3)), Laplace(1.0), RandomSource(0), chosen_index=4)
