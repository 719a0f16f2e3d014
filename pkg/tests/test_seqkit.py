from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest

from piseries import seqkit as sk


def poly_trinomial(b: int, c: int, n: int) -> int:
    """Central coefficient of (x^2 + b x + c)^n by explicit polynomial power."""
    poly = [1]
    base = [c, b, 1]
    for _ in range(n):
        out = [0] * (len(poly) + 2)
        for i, pv in enumerate(poly):
            for j, bv in enumerate(base):
                out[i + j] += pv * bv
        poly = out
    return poly[n]


class TestGct:
    def test_first_two_values(self):
        for b, c in [(1, 1), (3, -5), (8, -2), (62, 95 ** 2)]:
            assert sk.gct_table(b, c, 1).values == (1, b)

    def test_direct_matches_polynomial_expansion(self):
        for b, c in [(1, 1), (2, 1), (3, 2), (1, 16), (8, -2)]:
            for n in range(8):
                assert sk.gct_direct(b, c, n) == poly_trinomial(b, c, n)

    def test_direct_examples(self):
        assert sk.gct_direct(1, 1, 4) == 19
        assert sk.gct_direct(8, -2, 0) == 1
        assert sk.gct_direct(1, 16, 2) == 33
        assert sk.gct_table(1, 1, 2).values[2] == 3
        assert sk.gct_table(2, 1, 3).values[3] == 20

    @pytest.mark.parametrize("b,c", [(1, 1), (2, 1), (8, -2), (1, 16), (62, 95 ** 2)])
    def test_recurrence_matches_direct(self, b, c):
        tab = sk.gct_table(b, c, 200)
        for n in range(201):
            assert tab[n] == sk.gct_direct(b, c, n)

    def test_central_binomial_special_case(self):
        tab = sk.gct_table(2, 1, 500)
        for n in range(501):
            assert tab[n] == comb(2 * n, n)

    def test_stride_views(self):
        t2 = sk.table(sk.GCT2(1, 1), 10)
        t3 = sk.table(sk.GCT3(1, 1), 10)
        base = sk.gct_table(1, 1, 30)
        for n in range(11):
            assert t2[n] == base[2 * n]
            assert t3[n] == base[3 * n]

    def test_growth_rate(self):
        # |T_n(b,c)|^(1/n) -> sqrt(b^2-4c) for c < 0
        for b, c in [(1, -1), (4, -4)]:
            n = 2000
            tn = abs(sk.gct_table(b, c, n)[n])
            import math
            growth = math.exp(math.log2(tn) * math.log(2) / n)
            target = (b * b - 4 * c) ** 0.5
            assert abs(growth - target) / target < 0.01


class TestAperyLike:
    def test_sbc_11_values(self):
        tab = sk.apery_like_table(sk.SBC(1, 1), 10)
        assert tab.values == (1, 2, 10, 68, 586, 5252, 49204, 475400,
                              4723786, 47937812, 494786260)

    def test_sbc_21_is_domb(self):
        s = sk.apery_like_table(sk.SBC(2, 1), 100)
        d = sk.apery_like_table(sk.DOMB, 100)
        assert s.values == d.values

    def test_franel_recurrence_vs_sum(self):
        tab = sk.apery_like_table(sk.FRANEL, 150)
        for n in range(151):
            assert tab[n] == sum(comb(n, k) ** 3 for k in range(n + 1))

    def test_g_is_binomial_transform_of_franel(self):
        g = sk.apery_like_table(sk.GSEQ, 100)
        f = sk.apery_like_table(sk.FRANEL, 100)
        for n in range(101):
            assert g[n] == sum(comb(n, k) * f[k] for k in range(n + 1))

    def test_clf_is_2n_zagier(self):
        z = sk.apery_like_table(sk.ZAGIER, 100)
        p = sk.apery_like_table(sk.CLF, 100)
        for n in range(101):
            assert p[n] == 2 ** n * z[n]

    def test_small_values(self):
        assert sk.apery_like_table(sk.WZAG, 1).values == (1, 3)
        assert sk.apery_like_table(sk.ZAGIER, 1)[1] == 4
        assert sk.apery_like_table(sk.BETA, 1)[1] == 3

    def test_gpoly_rational(self):
        tab = sk.apery_like_table(sk.GPOLY(Fraction(1, 2)), 5)
        for n in range(6):
            expect = sum(Fraction(comb(n, k) ** 2 * comb(2 * k, k), 2 ** k)
                         for k in range(n + 1))
            assert tab[n] == expect

    def test_gpoly_at_one_is_gseq(self):
        g1 = sk.apery_like_table(sk.GPOLY(1), 30)
        g = sk.apery_like_table(sk.GSEQ, 30)
        assert g1.values == g.values

    def test_euler_numbers(self):
        tab = sk.apery_like_table(sk.EULER, 10)
        assert tab.values[:9] == (1, 0, -1, 0, 5, 0, -61, 0, 1385)

    def test_catalan(self):
        tab = sk.apery_like_table(sk.CATALAN, 8)
        assert tab.values == (1, 1, 2, 5, 14, 42, 132, 429, 1430)


class TestSnk:
    def test_snk_zero_column(self):
        for n in range(10):
            assert sk.snk(n, 0) == 1

    def test_snk_2_1(self):
        assert sk.snk(2, 1) == 2

    def test_snk_sum_gives_franel(self):
        f = sk.apery_like_table(sk.FRANEL, 12)
        for n in range(13):
            total = sum(comb(n, k) * (-1) ** k * 4 ** (n - k) * sk.snk(n + k, k)
                        for k in range(n + 1))
            assert total == f[n]

    def test_index_violation(self):
        with pytest.raises(ValueError):
            sk.snk(2, 3)


class TestLegendre:
    def test_degree_zero(self):
        assert sk.legendre_eval(0, Fraction(7, 3)) == 1

    def test_p2(self):
        assert sk.legendre_eval(2, Fraction(3)) == 13

    def test_gct_link(self):
        # b^2 - 4c = 1 for (b,c) = (3,2): T_n(3,2) = P_n(3)
        tab = sk.gct_table(3, 2, 12)
        for n in range(13):
            assert tab[n] == sk.legendre_eval(n, Fraction(3))
        assert tab[3] == 63


class TestDuality:
    """Per-term dual congruences mod p (these are theorems)."""

    PRIMES = [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59,
              61, 67, 71, 73, 79, 83, 89, 97]

    @staticmethod
    def leg(a: int, p: int) -> int:
        a %= p
        if a == 0:
            return 0
        r = pow(a, (p - 1) // 2, p)
        return 1 if r == 1 else -1

    def test_gct_duality(self):
        for b, c in [(1, 1), (3, -5), (4, 1)]:
            d = b * b - 4 * c
            for p in self.PRIMES:
                if d % p == 0:
                    continue
                tab = sk.gct_table(b, c, p - 1)
                s = self.leg(d, p)
                for k in range(p):
                    lhs = tab[k] % p
                    rhs = (s * pow(d % p, k, p) * tab[p - 1 - k]) % p
                    assert lhs == rhs

    def test_sequence_dualities(self):
        cases = [
            (sk.FRANEL, None, -8),    # f_k = (-8)^k f_{p-1-k}
            (sk.GSEQ, -3, 9),
            (sk.BETA, None, -1),      # beta_k = (-1)^k beta_{p-1-k}
            (sk.ZAGIER, -1, 32),
            (sk.WZAG, -3, 27),
        ]
        for kind, d, D in cases:
            for p in self.PRIMES:
                tab = sk.table(kind, p - 1)
                s = 1 if d is None else self.leg(d, p)
                if kind == sk.BETA:
                    # (-1)^k plays the role of D^k with no symbol factor
                    pass
                for k in range(p):
                    lhs = tab[k] % p
                    rhs = (s * pow(D % p, k, p) * tab[p - 1 - k]) % p
                    assert lhs == rhs, (kind.tag, p, k)


class TestCache:
    def test_round_trip(self, tmp_path):
        tab = sk.gct_table(3, -5, 40)
        path = tmp_path / "t.txt"
        sk.save_table(tab, path)
        again = sk.load_table(path)
        assert again.kind == tab.kind
        assert again.values == tab.values
        # rewrite must be byte-identical
        first = path.read_bytes()
        sk.save_table(again, path)
        assert path.read_bytes() == first

    def test_rational_round_trip(self, tmp_path):
        tab = sk.apery_like_table(sk.GPOLY(Fraction(-1, 4)), 12)
        path = tmp_path / "g.txt"
        sk.save_table(tab, path)
        assert sk.load_table(path).values == tab.values

    def test_cached_table_reuse(self, tmp_path):
        tab = sk.cached_table(sk.FRANEL, 30, tmp_path)
        files = list(tmp_path.glob("*.txt"))
        assert len(files) == 1
        sub = sk.cached_table(sk.FRANEL, 10, tmp_path)
        assert sub.values == tab.values[:11]
        assert len(list(tmp_path.glob("*.txt"))) == 1
