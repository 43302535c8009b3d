import math
import warnings

import numpy as np
import pytest

from phigeo.deform import (Deformation, ProbVec, chi_dual, escort, exp_of_log,
                           h_phi, ts_dual, uniform)
from phigeo.errors import (BoundaryError, DomainError, PoleError, RangeError)
from phigeo.families import identity, stretched, tsallis


class TestProbVec:
    def test_sum_enforced(self):
        with pytest.raises(ValueError):
            ProbVec(np.array([0.5, 0.6]))

    def test_nonnegative(self):
        with pytest.raises(ValueError):
            ProbVec(np.array([1.2, -0.2]))

    def test_interior_flag(self):
        assert ProbVec(np.array([0.4, 0.6])).interior
        assert not ProbVec(np.array([1.0, 0.0])).interior

    def test_uniform(self):
        u = uniform(4)
        assert np.allclose(u.probs, 0.25)
        assert u.interior


class TestDeformationBasics:
    def test_identity_log_exp(self):
        d = identity()
        assert abs(d.log(2.0) - math.log(2.0)) < 1e-14
        assert abs(d.exp(-1.0) - math.exp(-1.0)) < 1e-14

    def test_log_sign_convention(self):
        for d in [identity(), tsallis(1.5)]:
            assert d.log(1.0) == 0.0
            assert d.log(0.5) < 0.0
            assert d.log(2.0) > 0.0

    def test_log_domain(self):
        d = identity()
        with pytest.raises(DomainError):
            d.log(0.0)
        with pytest.raises(DomainError):
            d.log(-1.0)

    def test_cutoff_convention(self):
        # q < 1: finite lower range limit, exp returns 0 below it
        d = tsallis(0.5)
        assert d.log_lower_limit == -2.0
        assert d.exp(-2.5) == 0.0
        assert d.exp(-2.0) == 0.0

    def test_upper_range_limit(self):
        # q > 1: log saturates at 1/(q-1)
        d = tsallis(2.0)
        assert d.log_upper_limit == 1.0
        with pytest.raises(RangeError):
            d.exp(1.0)
        with pytest.raises(RangeError):
            d.exp(1.5)

    def test_positivity_enforced(self):
        with pytest.raises(DomainError):
            Deformation("bad", lambda x: x - 0.5, lambda x: 1.0)

    def test_monotonicity_warns_only(self):
        with pytest.warns(UserWarning):
            stretched(0.5)

    def test_numeric_log_path(self):
        # no closed log supplied: anchor cache + quadrature must reproduce ln
        d = Deformation("numlog", lambda x: x, lambda x: 1.0)
        for x in [1e-5, 0.02, 0.7, 1.0, 3.0, 50.0]:
            assert abs(d.log(x) - math.log(x)) < 1e-10
        for y in [-3.0, -0.4, 0.0, 1.2]:
            assert abs(d.exp(y) - math.exp(y)) < 1e-9


class TestEscort:
    def test_identity_escort_is_p(self):
        p = ProbVec(np.array([0.2, 0.3, 0.5]))
        assert np.allclose(escort(identity(), p).probs, p.probs)

    def test_tsallis_escort(self):
        p = ProbVec(np.array([0.2, 0.8]))
        q = 2.0
        w = p.probs ** q
        assert np.allclose(escort(tsallis(q), p).probs, w / w.sum())

    def test_h_phi(self):
        p = ProbVec(np.array([0.2, 0.8]))
        assert abs(h_phi(tsallis(2.0), p) - (0.04 + 0.64)) < 1e-14

    def test_boundary_rejected_when_phi_undefined_at_zero(self):
        p = ProbVec(np.array([1.0, 0.0]))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            d = stretched(2.0)
        with pytest.raises(BoundaryError):
            h_phi(d, p)

    def test_boundary_allowed_when_phi_extends(self):
        # x^q with q > 0 vanishes continuously at 0, so h is well defined
        p = ProbVec(np.array([1.0, 0.0]))
        assert h_phi(tsallis(0.5), p) == 1.0


class TestChiDual:
    def test_tsallis_chi_is_x_over_q(self):
        q = 2.0
        c = chi_dual(tsallis(q))
        for x in [0.1, 0.5, 2.0]:
            assert abs(c.phi(x) - x / q) < 1e-12

    def test_identity_chi_is_identity(self):
        c = chi_dual(identity())
        for x in [0.3, 1.0, 4.0]:
            assert abs(c.phi(x) - x) < 1e-12


class TestExpOfLog:
    def test_identity_fixed_point(self):
        xi = exp_of_log(identity())
        for x in [0.2, 1.0, 3.0]:
            assert abs(xi.phi(x) - x) < 1e-12
            assert abs(xi.log(x) - math.log(x)) < 1e-8

    def test_generator_value(self):
        d = tsallis(0.5)
        xi = exp_of_log(d)
        for x in [0.3, 0.9, 2.0]:
            assert abs(xi.phi(x) - math.exp(d.log(x))) < 1e-13

    def test_derivative_relation(self):
        d = tsallis(1.5)
        xi = exp_of_log(d)
        for x in [0.4, 1.2]:
            assert abs(xi.phi_prime(x) - xi.phi(x) / d.phi(x)) < 1e-12


class TestTsDual:
    def test_nu_zero_is_same(self):
        d = tsallis(1.5)
        assert ts_dual(d, 0.0) is d

    def test_tsallis_collapse(self):
        # phi = x^q with nu = 1-q maps to the generator x^(2-q)
        q = 1.4
        dd = ts_dual(tsallis(q), 1.0 - q)
        for x in [0.2, 0.7, 1.5]:
            assert abs(dd.phi(x) - x ** (2.0 - q)) < 1e-12

    def test_log_moebius(self):
        d = tsallis(0.5)
        nu = 0.3
        dd = ts_dual(d, nu)
        for x in [0.3, 0.8, 2.0]:
            L = d.log(x)
            assert abs(dd.log(x) - L / (1.0 + nu * L)) < 1e-13

    def test_roundtrip(self):
        dd = ts_dual(tsallis(0.5), 0.3)
        for x in [0.2, 0.9, 3.0]:
            assert abs(dd.exp(dd.log(x)) - x) < 1e-10

    def test_pole_detected(self):
        # log_q hits -1/nu on (0, 1) for q<1 and large nu
        with pytest.raises(PoleError):
            ts_dual(tsallis(0.5), 1.0)

    def test_involution(self):
        d = tsallis(0.7)
        nu = 0.2
        back = ts_dual(ts_dual(d, nu), -nu)
        for x in [0.3, 1.4]:
            assert abs(back.log(x) - d.log(x)) < 1e-12
