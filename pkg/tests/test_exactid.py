from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest

from piseries import exactid as ei


class TestTelescopingFamilies:
    def test_single_term_base_case(self):
        # k=0 term of the second downward family is (-8)(-1)^3 = 8
        assert ei.family_term("L21_2", 0, -64) == 8
        assert ei.family_rhs("L21_2", 0, -64) == 8

    def test_l21_1_closed_form_value(self):
        assert ei.family_rhs("L21_1", 3, -64) == Fraction(8 * 7 * comb(6, 3) ** 3,
                                                          (-64) ** 3)
        assert ei.family_rhs("L21_1", 3, -64) == Fraction(-875, 512)

    @pytest.mark.parametrize("fam,ms", [
        ("L21_1", [-64, 256]),
        ("L21_2", [-64, 256, -512, 4096]),
        ("L21_3", [-192, 216, -1728, 1458]),
        ("L21_4", [-192, 216]),
        ("L21_5", [648, -1024]),
        ("L21_6", [648, -1024]),
        ("L21_7", [8000, -32768, -640320 ** 3]),
        ("L21_8", [8000, -640320 ** 3]),
    ])
    def test_l21_families(self, fam, ms):
        for m in ms:
            assert ei.check_family(fam, m, 40).ok, (fam, m)

    @pytest.mark.parametrize("fam,ms", [
        ("L22_1", [16, -64]),
        ("L22_2", [-8, -64]),
        ("L22_3", [8, -27, 64]),
        ("L22_4", [8, -27]),
        ("L22_5", [81, -144]),
        ("L22_6", [81, -144]),
    ])
    def test_l22_families(self, fam, ms):
        for m in ms:
            assert ei.check_family(fam, m, 40).ok, (fam, m)

    def test_glaisher_small(self):
        # n=1: LHS = -1 + 3*16/256 = -13/16
        assert ei.family_term("GLAISHER", 0) + ei.family_term("GLAISHER", 1) \
            == Fraction(-13, 16)
        assert ei.family_rhs("GLAISHER", 1) == Fraction(-13, 16)
        assert ei.check_family("GLAISHER", None, 60).ok

    def test_sun_finite_step(self):
        assert ei.check_sun_finite_step(60).ok

    def test_m_zero_rejected(self):
        with pytest.raises(ValueError):
            ei.check_family("L21_1", 0, 10)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            ei.check_family("NOPE", 1, 10)

    def test_broken_identity_detected(self):
        # sanity: a wrong m-slot combination must fail quickly, proving the
        # checker can actually see failures
        rep = ei.check_family("L21_1", -64, 5, telescope=False)
        assert rep.ok
        # perturb: compare family 1 sums against family 2 closed form
        partial = sum(ei.family_term("L21_1", k, -64) for k in range(3))
        assert partial != ei.family_rhs("L21_2", 2, -64)


class TestFranelTransform:
    def test_small_values(self):
        rep = ei.check_franel_transform(30)
        assert rep.ok

    def test_u_first_values(self):
        f0 = ei.seqkit.snk(0, 0)
        assert 4 ** 0 * f0 == 1


class TestSnExpansion:
    def test_small_sweep(self):
        assert ei.check_sn_expansion(-6, 6, 12).ok

    def test_n1_c_minus6(self):
        # S_1(4,-6) = 2*T_0*T_1 = 8
        assert ei._sn_bc(4, -6, 1) == 8


class TestSklBound:
    def test_boundary(self):
        assert ei.seqkit.snk(1, 0) == 1  # equals the bound at k=0, l=1

    def test_sweep(self):
        assert ei.check_skl_bound(25, 25).ok
