from fractions import Fraction as F

import numpy as np
import pytest

from rnlie.brackets import (BasisChange, Bracket, act, center, direct_sum,
                            is_lie, jacobiator, lower_central_series,
                            nilpotency_step, validate_jacobi)
from rnlie.errors import PreconditionError


def h3():
    return Bracket(3, {(0, 1, 2): F(1)})


def tricky5():
    return Bracket(5, {(0, 1, 2): F(1), (0, 1, 3): F(1),
                       (0, 2, 4): F(1), (0, 3, 4): F(1)})


class TestValidation:
    def test_rejects_bad_index_order(self):
        with pytest.raises(PreconditionError):
            Bracket(3, {(1, 0, 2): F(1)})

    def test_rejects_out_of_range(self):
        with pytest.raises(PreconditionError):
            Bracket(2, {(0, 1, 2): F(1)})

    def test_drops_zero_constants(self):
        b = Bracket(3, {(0, 1, 2): F(0)})
        assert b.constants == {}

    def test_scalar_kind_coercion(self):
        b = Bracket(3, {(0, 1, 2): 0.5}, scalar_kind="float")
        assert isinstance(b.constants[(0, 1, 2)], float)


class TestJacobi:
    def test_h3_exact_zero(self):
        assert validate_jacobi(h3()) == 0

    def test_tricky5_exact_zero(self):
        assert validate_jacobi(tricky5()) == 0

    def test_violation_detected(self):
        # [e1,e2]=e3, [e2,e3]=e4, [e1,e4]=e2: the cyclic sum on (e1,e2,e3)
        # picks up [e4,e1] = -e2 and nothing cancels it
        bad = Bracket(4, {(0, 1, 2): F(1), (1, 2, 3): F(1), (0, 3, 1): F(1)})
        assert validate_jacobi(bad) != 0
        assert not is_lie(bad)

    def test_jacobiator_pinpoints_triple(self):
        bad = Bracket(4, {(0, 1, 2): F(1), (1, 2, 3): F(1), (0, 3, 1): F(1)})
        vals = jacobiator(bad, 0, 1, 2)
        assert any(v != 0 for v in vals)


class TestNorm:
    def test_single_bracket_norm_is_two(self):
        """Ordered-pair summation gives |mu_ijk|^2 = 2."""
        assert h3().norm_sq() == F(2)

    def test_norm_scales_quadratically(self):
        assert h3().scaled(F(3)).norm_sq() == F(18)


class TestSeries:
    def test_h3(self):
        assert lower_central_series(h3()) == [3, 1, 0]
        assert nilpotency_step(h3()) == 2

    def test_tricky5_derived_series_dims(self):
        # brackets only ever produce the sum e3+e4, so the first term
        # is span{e3+e4, e5} of dimension 2
        assert lower_central_series(tricky5()) == [5, 2, 1, 0]
        assert nilpotency_step(tricky5()) == 3

    def test_abelian(self):
        assert lower_central_series(Bracket(4, {})) == [4, 0]

    def test_not_nilpotent(self):
        solv = Bracket(2, {(0, 1, 1): F(1)})
        assert nilpotency_step(solv) is None


class TestCenter:
    def test_h3_center(self):
        Z = center(h3())
        assert Z.shape[1] == 1
        assert abs(abs(Z[2, 0]) - 1) < 1e-12

    def test_tricky5_center_is_two_dimensional(self):
        # e3 - e4 commutes with everything because [e1, e3] = [e1, e4]
        Z = center(tricky5())
        assert Z.shape[1] == 2
        v = np.array([0, 0, 1, -1, 0]) / np.sqrt(2)
        proj = Z @ (Z.T @ v)
        assert np.allclose(proj, v, atol=1e-10)


class TestAction:
    def test_diagonal_scaling_law(self):
        h = BasisChange.diagonal([F(2), F(3), F(5)])
        out = act(h, h3())
        assert out.constants[(0, 1, 2)] == F(5, 6)

    def test_left_action_property(self):
        rng = np.random.default_rng(11)
        b = tricky5().to_float()
        for _ in range(5):
            g = np.eye(5) + 0.2 * rng.normal(size=(5, 5))
            k = np.eye(5) + 0.2 * rng.normal(size=(5, 5))
            lhs = act(BasisChange(g @ k), b)
            rhs = act(BasisChange(g), act(BasisChange(k), b))
            assert np.abs(lhs.tensor() - rhs.tensor()).max() < 1e-10

    def test_exact_round_trip(self):
        h = BasisChange([[F(1), F(1), F(0)], [F(0), F(1), F(0)], [F(0), F(0), F(1)]])
        hinv = BasisChange([[F(1), F(-1), F(0)], [F(0), F(1), F(0)], [F(0), F(0), F(1)]])
        b = act(hinv, act(h, h3()))
        assert b.constants == h3().constants

    def test_action_preserves_lie(self):
        rng = np.random.default_rng(3)
        g = np.eye(5) + 0.3 * rng.normal(size=(5, 5))
        assert is_lie(act(BasisChange(g), tricky5().to_float()))


def test_direct_sum_block_structure():
    s = direct_sum(h3(), Bracket(1, {}))
    assert s.dim == 4
    assert lower_central_series(s) == [4, 1, 0]
    assert center(s).shape[1] == 2


def test_ad_matrix():
    b = h3()
    ad0 = b.ad(0)
    e2 = np.zeros(3)
    e2[1] = 1
    assert np.allclose(ad0 @ e2, [0, 0, 1])
    assert np.allclose(b.ad(1) @ np.array([1.0, 0, 0]), [0, 0, -1])
