from __future__ import annotations

from fractions import Fraction

import pytest

from piseries import congruence as cg
from piseries import quadform as qf
from piseries import seqkit as sk
from piseries.sereval import TermSpec

F = Fraction


def two_square_table(ident="two-square"):
    """sum_{k<p} C(2k,k)^3/64^k = 4x^2 - 2p (mod p^2) if p = x^2 + y^2 with
    y even, and 0 if p = 3 (mod 4)."""
    split = qf.QuadFormCase(qf.Guard(mods=((4, (1,)),)),
                            a=1, d=1, norm="Y_HALF_PARITY",
                            x2=F(4), p_coef=F(-2))
    inert = qf.QuadFormCase(qf.Guard(mods=((4, (3,)),)), zero=True)
    return qf.QuadFormTable(ident, (split, inert))


class TestRepresent:
    def test_basic(self):
        assert qf.represent(1, 1, 2, 73) == [(1, 6)]
        assert (2, 1) in qf.represent(1, 1, 1, 5)
        assert (1, 2) in qf.represent(1, 1, 1, 5)

    def test_no_solution(self):
        assert qf.represent(1, 1, 5, 13) == []

    def test_mu_two(self):
        # 2*17 = 34 = 5^2 + 3^2
        assert (5, 3) in qf.represent(2, 1, 1, 17)


class TestNormalize:
    def test_xy_nonneg(self):
        assert qf.normalize([(1, 2)], "XY_NONNEG") == [(1, 2)]

    def test_x_not_div_3(self):
        assert qf.normalize([(3, 1), (1, 3)], "X_NOT_DIV_3") == [(1, 3)]

    def test_x_minus_y_div_3(self):
        reps = qf.normalize([(1, 2)], "X_MINUS_Y_DIV_3")
        assert reps == [(-1, 2), (1, -2)]

    def test_y_half_parity(self):
        assert qf.normalize([(1, 2), (2, 1)], "Y_HALF_PARITY") == [(1, 2)]

    def test_xy_half_parity(self):
        reps = qf.normalize([(1, 3)], "XY_HALF_PARITY")
        assert reps == [(-1, -3), (1, 3)]


class TestDispatch:
    def test_split_prime(self):
        res = qf.dispatch(two_square_table(), 13)
        # 13 = 9 + 4 with y even: 4*9 - 26 = 10
        assert res.ok and res.value == 10

    def test_inert_prime(self):
        res = qf.dispatch(two_square_table(), 19)
        assert res.ok and res.value == 0

    def test_no_case(self):
        table = qf.QuadFormTable(
            "gap", (qf.QuadFormCase(qf.Guard(mods=((4, (1,)),)), zero=True),))
        res = qf.dispatch(table, 19)
        assert not res.ok and res.error == qf.NO_CASE

    def test_no_representation(self):
        table = qf.QuadFormTable(
            "bad", (qf.QuadFormCase(qf.Guard(), a=1, d=5, x2=F(1)),))
        res = qf.dispatch(table, 13)
        assert not res.ok and res.error == qf.NO_REPRESENTATION

    def test_ambiguous_detected(self):
        # p = x^2 + y^2 without a parity rule leaves the template ill-defined
        table = qf.QuadFormTable(
            "amb", (qf.QuadFormCase(qf.Guard(mods=((4, (1,)),)),
                                    a=1, d=1, x2=F(4), p_coef=F(-2)),))
        res = qf.dispatch(table, 5)
        assert not res.ok and res.error == qf.AMBIGUOUS

    def test_sign_rule_validation(self):
        with pytest.raises(ValueError):
            qf.QuadFormCase(qf.Guard(), sign="Y_HALF")


class TestClaims:
    def test_two_square_congruence(self):
        spec = TermSpec(weight=(1,), den=(), seq=((sk.CB2, 3),),
                        m=Fraction(64), k0=0)
        claim = qf.QuadFormClaim("two-square", spec, two_square_table())
        rep = qf.verify_quadform_claim(claim, 80)
        assert rep.ok and len(rep.tested) >= 15

    def test_wrong_template_fails(self):
        spec = TermSpec(weight=(1,), den=(), seq=((sk.CB2, 3),),
                        m=Fraction(64), k0=0)
        split = qf.QuadFormCase(qf.Guard(mods=((4, (1,)),)),
                                a=1, d=1, norm="Y_HALF_PARITY",
                                x2=F(2), p_coef=F(-1))
        inert = qf.QuadFormCase(qf.Guard(mods=((4, (3,)),)), zero=True)
        claim = qf.QuadFormClaim(
            "wrong", spec, qf.QuadFormTable("wrong", (split, inert)))
        rep = qf.verify_quadform_claim(claim, 40)
        assert not rep.ok

    def test_partition(self):
        rep = qf.check_partition(two_square_table(), 1000)
        assert rep.ok and len(rep.tested) > 160

    def test_partition_gap_detected(self):
        table = qf.QuadFormTable(
            "gap", (qf.QuadFormCase(qf.Guard(mods=((4, (1,)),)), zero=True),))
        rep = qf.check_partition(table, 100)
        assert not rep.ok
