import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadic_spaces import (
    SpaceDescriptor,
    Verdict,
    classify,
    classify_cmo,
    cmo_param_of,
    refute_claim,
)

INF = math.inf
F = Fraction


def d(family, s, tau, p, q, hom=True, dim=1):
    return SpaceDescriptor(family, s, tau, p, q, hom, dim)


class TestRuleBranches:
    def test_negative_tau_polynomials(self):
        rep = classify(d("F_type", 0, -0.1, 2, 2))
        assert rep.verdict == Verdict.TRIVIAL_POLYNOMIALS
        assert rep.rule == "Proposition 1(iv)"

    def test_tau_zero_classical(self):
        assert classify(d("F_type", 0.5, 0, 2, 2)).verdict == Verdict.CLASSICAL_F
        assert classify(d("B_type", 0.5, 0, INF, 1)).verdict == Verdict.CLASSICAL_B

    def test_f_morrey_window(self):
        rep = classify(d("F_type", 0, F(1, 4), 2, 3))
        assert rep.verdict == Verdict.MORREY_E
        assert rep.target["u"] == F(4)

    def test_f_boundary_gives_inf_q(self):
        rep = classify(d("F_type", 1, F(1, 2), 2, 4))
        assert rep.verdict == Verdict.F_INF_Q
        assert rep.rule == "Proposition 1(ii)"

    def test_f_collapse(self):
        rep = classify(d("F_type", 0, 1.5, 1, 2))
        assert rep.verdict == Verdict.F_INF_INF
        assert rep.target["s_eff"] == pytest.approx(0.5)
        assert rep.rule == "Theorem 1(i)"

    def test_f_boundary_with_q_inf_collapses(self):
        rep = classify(d("F_type", 0.3, F(1, 2), 2, INF))
        assert rep.verdict == Verdict.F_INF_INF
        assert float(rep.target["s_eff"]) == pytest.approx(0.3)

    def test_b_collapse_and_corollary2(self):
        rep = classify(d("B_type", 0, 2, 1, 3))
        assert rep.verdict == Verdict.B_INF_INF
        assert float(rep.target["s_eff"]) == pytest.approx(1.0)
        cor2 = classify(d("B_type", 1, F(1, 3), 3, INF))
        assert cor2.verdict == Verdict.B_INF_INF
        assert cor2.rule == "Corollary 2"
        assert float(cor2.target["s_eff"]) == pytest.approx(1.0)

    def test_b_boundary_strict_superset(self):
        rep = classify(d("B_type", 0, F(1, 2), 2, 2))
        assert rep.verdict == Verdict.STRICT_SUPERSET_B_INF_Q
        assert rep.target_params is None
        assert any("proper subspace" in n for n in rep.notes)
        assert any("strictness unknown" in n for n in rep.notes)

    def test_b_morrey_n_and_superset(self):
        eq = classify(d("B_type", 0, F(1, 5), 2, INF))
        assert eq.verdict == Verdict.MORREY_N
        assert eq.target["u"] == F(10, 3)
        strict = classify(d("B_type", 0, F(1, 5), 2, 2))
        assert strict.verdict == Verdict.MORREY_N_SUPERSET

    def test_b_p_inf(self):
        rep = classify(d("B_type", 0, F(1, 2), INF, 1))
        assert rep.verdict == Verdict.B_INF_INF
        assert float(rep.target["s_eff"]) == pytest.approx(0.5)

    def test_q_alpha_flag(self):
        rep = classify(d("F_type", 0.3, 0.2, 2, 2))
        assert rep.q_alpha
        assert rep.verdict == Verdict.MORREY_E  # the base rule still applies
        assert any("Proposition 1(v)" in n for n in rep.notes)

    def test_q_alpha_flag_dim2_exact(self):
        rep = classify(d("F_type", F(4, 5), F(1, 10), 2, 2, dim=2))
        assert rep.q_alpha

    def test_q_alpha_needs_s_window(self):
        assert not classify(d("F_type", 0.7, -0.2, 2, 2)).q_alpha
        assert not classify(d("F_type", 0.0, 0.5, 2, 2)).q_alpha


class TestCmo:
    def test_large_r_collapse(self):
        rep = classify_cmo(0, 2, 2)
        assert rep.verdict == Verdict.F_INF_INF
        assert float(rep.target["s_eff"]) == pytest.approx(0.5)

    def test_small_r_morrey(self):
        rep = classify_cmo(0, 2, F(1, 2))
        assert rep.verdict == Verdict.MORREY_E
        assert rep.target["u"] == F(4)

    def test_r_zero_classical(self):
        assert classify_cmo(0, 2, 0).verdict == Verdict.CLASSICAL_F

    def test_r_one_inf_q(self):
        assert classify_cmo(1, 3, 1).verdict == Verdict.F_INF_Q

    def test_negative_r_polynomials(self):
        assert classify_cmo(0, 2, -1).verdict == Verdict.TRIVIAL_POLYNOMIALS

    def test_q_inf_r_large(self):
        rep = classify_cmo(0.7, INF, 2)
        assert rep.verdict == Verdict.F_INF_INF
        assert float(rep.target["s_eff"]) == pytest.approx(0.7)
        assert rep.rule == "Corollary 3"

    def test_q_inf_small_r_unresolved(self):
        assert classify_cmo(0, INF, 0.5).verdict == Verdict.NO_KNOWN_COINCIDENCE

    @given(
        st.fractions(min_value=-2, max_value=2, max_denominator=6),
        st.fractions(min_value=F(1, 4), max_value=4, max_denominator=6),
        st.fractions(min_value=-1, max_value=4, max_denominator=6),
    )
    @settings(max_examples=300, deadline=None)
    def test_delegation_identity(self, s, q, r):
        direct = classify_cmo(s, q, r)
        delegate = classify(d("F_type", s, r / q, q, q))
        assert direct == delegate


class TestIndexMapping:
    def test_examples(self):
        assert cmo_param_of(F(1, 2), 2, 3) == F(1, 2) * 3 + 1 - F(3, 2)
        assert cmo_param_of(F(1, 3), 3, 5) == 1  # tau = 1/p gives r = 1
        assert cmo_param_of(2, 1, 2) == 3
        assert cmo_param_of(0, 2, 2) == 0

    def test_p_inf(self):
        assert cmo_param_of(1, INF, 2) == 3  # q/p -> 0

    def test_q_inf_rejected(self):
        with pytest.raises(ValueError):
            cmo_param_of(1, 2, INF)


class TestTotality:
    @given(
        st.sampled_from(["F_type", "B_type"]),
        st.fractions(min_value=-2, max_value=2, max_denominator=8),
        st.one_of(
            st.fractions(min_value=-1, max_value=3, max_denominator=8),
            st.sampled_from([F(0), F(1, 2), F(1, 3), F(2)]),
        ),
        st.one_of(
            st.fractions(min_value=F(1, 4), max_value=4, max_denominator=8),
            st.just(INF),
        ),
        st.one_of(
            st.fractions(min_value=F(1, 4), max_value=4, max_denominator=8),
            st.just(INF),
        ),
    )
    @settings(max_examples=400, deadline=None)
    def test_every_descriptor_gets_exactly_one_verdict(self, fam, s, tau, p, q):
        if fam == "F_type" and p == INF:
            with pytest.raises(ValueError):
                classify(d(fam, s, tau, p, q))
            return
        rep = classify(d(fam, s, tau, p, q))
        assert isinstance(rep.verdict, Verdict)
        assert rep.verdict != Verdict.Q_ALPHA  # flag, never the exclusive verdict
        # boundary values hit exactly one branch: verdicts are a function of
        # the region, checked by re-running
        assert classify(d(fam, s, tau, p, q)) == rep

    def test_boundary_values_exact_with_fractions(self):
        # tau exactly 1/p via rationals: boundary rules fire, no tolerance note
        rep = classify(d("B_type", 0, F(1, 3), 3, 2))
        assert rep.verdict == Verdict.STRICT_SUPERSET_B_INF_Q
        assert not any("tolerance" in n for n in rep.notes)

    def test_float_boundary_warns(self):
        rep = classify(d("B_type", 0, 1 / 3 + 1e-16, 3.0, 2))
        assert rep.verdict == Verdict.STRICT_SUPERSET_B_INF_Q
        assert any("tolerance" in n for n in rep.notes)


class TestBBMO:
    def test_bbmo_routes_to_b_rules(self):
        rep = classify(d("BBMO", 0, None, 2, INF))
        assert rep.verdict == Verdict.B_INF_INF
        assert rep.rule == "Corollary 2"
        rep2 = classify(d("BBMO", 1, None, 3, 2))
        assert rep2.verdict == Verdict.STRICT_SUPERSET_B_INF_Q


class TestInhomogeneous:
    def test_rules_cite_inhomogeneous_theorem(self):
        rep = classify(d("F_type", 0, 2, 1, 2, hom=False))
        assert rep.verdict == Verdict.F_INF_INF
        assert rep.rule == "Theorem 2(i)"
        assert any("Zygmund" in n for n in rep.notes)


class TestNumericConsistency:
    def test_inf_inf_verdicts_agree_with_measured_bounds(self):
        # whenever the verdict is a full collapse, the two-sided check passes
        import numpy as np
        from dyadic_spaces import check_collapse_b, check_collapse_f, random_sequence

        rng = np.random.default_rng(99)
        seqs = [random_sequence(rng, 1, 6) for _ in range(30)]
        cases = [("F_type", 0, 1.5, 1, 2), ("F_type", 0.5, F(1, 2), 2, INF),
                 ("B_type", 0, 2, 1, 3), ("B_type", 1, F(1, 3), 3, INF)]
        for fam, s, tau, p, q in cases:
            rep = classify(d(fam, s, tau, p, q))
            assert rep.verdict in (Verdict.F_INF_INF, Verdict.B_INF_INF)
            checker = check_collapse_f if fam == "F_type" else check_collapse_b
            assert checker(seqs, float(s), float(tau), float(p), float(q)).all_ok


class TestRefute:
    def test_accepts_counterexample_region(self):
        bundle = refute_claim(0, F(1, 2), 1, 2, depths=(4, 8, 16))
        assert bundle.divergent.verdict == "diverges"
        assert bundle.bounded.verdict == "bounded"
        assert bundle.claim_side.verdict == Verdict.MORREY_E
        assert bundle.diagonal_side.verdict == Verdict.CLASSICAL_B

    def test_rejects_where_claim_true(self):
        with pytest.raises(ValueError, match="Corollary 4"):
            refute_claim(0, 2, 1, 2)
        with pytest.raises(ValueError, match="Proposition 1"):
            refute_claim(0, 1, 1, 2)  # tau = 1/p

    def test_rejects_q_not_above_p(self):
        with pytest.raises(ValueError, match="q > p"):
            refute_claim(0, 0.1, 2, 2)

    def test_rejects_gap_region(self):
        with pytest.raises(ValueError, match="outside"):
            refute_claim(0, 0.75, 1, 2)  # tau in (1/p - 1/q, 1/p)

    def test_rejects_nonpositive_tau(self):
        with pytest.raises(ValueError, match="tau > 0"):
            refute_claim(0, 0, 1, 2)
