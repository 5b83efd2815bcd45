import math
from fractions import Fraction

import numpy as np
import pytest

from pavekit.counterexample import (
    FALSIFIES_A,
    INCONCLUSIVE,
    BasisIndex,
    ExactFrame,
    SignProfile,
    all_indices,
    block_sizes,
    block_slices,
    branch_bound_overall,
    branch_lower_bound,
    build_frame,
    delta_p_exact,
    dimension,
    float_frame,
    float_projection,
    min_over_symmetries_v0,
    profile_symmetry,
    psp_v0_coeffs,
    psp_v0_norm_sq,
    row_norm_sq,
    verify_orthonormal,
)
from pavekit.exact import QuadExt
from pavekit.linalg import apply_psp


def random_profile(m, rng):
    return SignProfile(
        eps=tuple(int(x) for x in rng.choice([-1, 1], size=m * m)),
        eps_prime=tuple(int(x) for x in rng.choice([-1, 1], size=2 * m + 1)),
    )


# The four closed-form block values; the library computes row norms by
# summing entry squares, so these serve as an independent check.
def block_formulas(m):
    return {
        "a": Fraction(1, (m + 1) ** 2) + Fraction(2 * m + 1, m**4 * (m + 1) ** 2),
        "b": Fraction(2, (m + 1) ** 2),
        "c": Fraction(2, m**2 * (m + 1) ** 2),
        "d": Fraction(m - 1, m**2 * (m + 1)),
    }


def test_dimension_values():
    assert dimension(6) == 764
    assert dimension(8) == 2 * 512 + 8 * 64 + 7 * 8 + 2 == 1594
    with pytest.raises(ValueError):
        dimension(1)


def test_block_sizes_sum_to_dimension():
    for m in range(2, 21):
        assert sum(block_sizes(m).values()) == dimension(m)


def test_basis_index_order_is_a_bijection():
    m = 3
    offsets = [ix.offset(m) for ix in all_indices(m)]
    assert offsets == list(range(dimension(m)))
    sl = block_slices(m)
    assert sl["a"].start == 0 and sl["d"].stop == dimension(m)
    with pytest.raises(ValueError):
        BasisIndex.c(3, 3).validate(m)
    with pytest.raises(ValueError):
        BasisIndex.a(m * m + 1).validate(m)


def test_frame_entries_match_the_displays():
    m = 6
    f = build_frame(m)
    rho = Fraction(5, 7)
    assert f.rho == rho
    # v_0 is 1/(m+1) on every a and b coordinate
    assert f.entry(0, BasisIndex.a(1).offset(m)) == Fraction(1, 7)
    assert f.entry(0, BasisIndex.b(13).offset(m)) == Fraction(1, 7)
    assert f.entry(0, BasisIndex.c(1, 2).offset(m)) == 0
    # v_3: +1/(m(m+1)) on c_{j,3} below, -1/(m(m+1)) on c_{3,j} above
    assert f.entry(3, BasisIndex.c(1, 3).offset(m)) == Fraction(1, 42)
    assert f.entry(3, BasisIndex.c(3, 5).offset(m)) == Fraction(-1, 42)
    # v_1 on d_{1,1}: (1/m) sqrt((m-1)/(m+1))
    assert f.entry(1, BasisIndex.d(1, 1).offset(m)) == QuadExt(0, Fraction(1, 6), rho)
    assert f.entry(1, BasisIndex.a(5).offset(m)) == Fraction(-1, 36 * 7)
    assert f.entry(1, BasisIndex.b(1).offset(m)) == Fraction(1, 7)
    assert f.entry(2, BasisIndex.d(1, 1).offset(m)) == 0
    # supports: v_0 on a|b only; v_i misses the other b's entirely
    sizes = block_sizes(m)
    assert len(f.rows[0]) == sizes["a"] + sizes["b"]
    assert len(f.rows[1]) == sizes["a"] + 1 + 2 * m + (m + 1) ** 2


def test_exact_orthonormality():
    assert verify_orthonormal(build_frame(6))
    assert verify_orthonormal(build_frame(12))


def test_perturbed_frame_fails_verification():
    f = build_frame(6)
    rows = [dict(r) for r in f.rows]
    rows[0][BasisIndex.a(1).offset(6)] = QuadExt(Fraction(1, 8), 0, f.rho)
    assert not verify_orthonormal(ExactFrame(m=6, rho=f.rho, rows=rows))


def test_row_norms_match_block_formulas():
    for m in (6, 7, 8):
        want = block_formulas(m)
        assert row_norm_sq(m, BasisIndex.a(1)) == want["a"]
        assert row_norm_sq(m, BasisIndex.b(2)) == want["b"]
        assert row_norm_sq(m, BasisIndex.c(1, 2)) == want["c"]
        assert row_norm_sq(m, BasisIndex.d(2, 3)) == want["d"]


def test_row_norm_values_at_m6():
    assert row_norm_sq(6, BasisIndex.b(1)) == Fraction(2, 49)
    assert row_norm_sq(6, BasisIndex.d(1, 1)) == Fraction(5, 252)
    # 1/49 + 13/(1296*49), reduced
    assert row_norm_sq(6, BasisIndex.a(1)) == Fraction(1309, 63504)


def test_delta_p_values():
    assert delta_p_exact(6) == Fraction(2, 49)
    assert delta_p_exact(10) == Fraction(2, 121)
    assert delta_p_exact(8) == Fraction(2, 81)


def test_b_block_strictly_dominates_for_m_at_least_6():
    for m in range(6, 13):
        vals = block_formulas(m)
        assert vals["b"] > vals["a"]
        assert vals["b"] > vals["c"]
        assert vals["b"] > vals["d"]
        assert delta_p_exact(m) == vals["b"]


def test_psp_v0_identity_profile_fixes_v0():
    m = 6
    prof = SignProfile(eps=(1,) * 36, eps_prime=(1,) * 13)
    c0, coeffs = psp_v0_coeffs(m, prof)
    assert c0 == 1
    assert all(c == 0 for c in coeffs)
    assert psp_v0_norm_sq(m, 36, 13) == 1


def test_psp_v0_mixed_profile_closed_form():
    m = 6
    prof = SignProfile(eps=(1,) * 36, eps_prime=(-1,) * 13)
    c0, coeffs = psp_v0_coeffs(m, prof)
    assert c0 == Fraction(23, 49)
    assert all(c == Fraction(-2, 49) for c in coeffs)


def test_flipping_every_sign_negates_coeffs():
    m = 6
    rng = np.random.Generator(np.random.PCG64(10))
    prof = random_profile(m, rng)
    flipped = SignProfile(
        eps=tuple(-e for e in prof.eps), eps_prime=tuple(-e for e in prof.eps_prime)
    )
    c0, coeffs = psp_v0_coeffs(m, prof)
    d0, dcoeffs = psp_v0_coeffs(m, flipped)
    assert d0 == -c0
    assert dcoeffs == [-c for c in coeffs]


def test_psp_v0_norm_sq_example_cell():
    assert psp_v0_norm_sq(6, 18, 6) == Fraction(14, 2401)
    with pytest.raises(ValueError):
        psp_v0_norm_sq(6, 37, 0)
    with pytest.raises(ValueError):
        psp_v0_norm_sq(6, 0, 14)


def test_norm_depends_only_on_counts():
    m = 6
    rng = np.random.Generator(np.random.PCG64(11))
    for _ in range(25):
        prof = random_profile(m, rng)
        c0, coeffs = psp_v0_coeffs(m, prof)
        exact = c0 * c0 + sum(c * c for c in coeffs)
        assert exact == psp_v0_norm_sq(m, prof.alpha, prof.beta)


def test_flip_symmetry_of_the_lattice():
    for m in (6, 7):
        for alpha in range(0, m * m + 1):
            for beta in range(0, 2 * m + 2):
                assert psp_v0_norm_sq(m, alpha, beta) == psp_v0_norm_sq(
                    m, m * m - alpha, 2 * m + 1 - beta
                )


def test_closed_form_matches_dense_float_apply():
    m = 6
    p = float_projection(m)
    v0 = float_frame(m).rows[0]
    rng = np.random.Generator(np.random.PCG64(12))
    sizes = block_sizes(m)
    tail = sizes["c"] + sizes["d"]
    for _ in range(20):
        prof = random_profile(m, rng)
        s = profile_symmetry(m, prof, cd_signs=rng.choice([-1, 1], size=tail))
        dense = float(np.linalg.norm(apply_psp(p, s, v0)) ** 2)
        exact = float(psp_v0_norm_sq(m, prof.alpha, prof.beta))
        assert abs(dense - exact) < 1e-9


def test_certificate_m6_inconclusive():
    rep = min_over_symmetries_v0(6)
    assert rep.min_norm_sq == Fraction(14, 2401)
    assert rep.verdict == INCONCLUSIVE
    assert rep.argmin == (18, 6)
    assert rep.two_delta_p == Fraction(4, 49)
    # sqrt(14)/49 < 4/49
    assert math.sqrt(float(rep.min_norm_sq)) < float(rep.two_delta_p)


def test_certificate_m7_inconclusive():
    assert min_over_symmetries_v0(7).verdict == INCONCLUSIVE


def test_certificate_m8_falsifies():
    rep = min_over_symmetries_v0(8)
    assert rep.min_norm_sq == Fraction(2, 729)
    assert rep.min_norm_sq == Fraction(18, 6561)
    assert rep.two_delta_p == Fraction(4, 81)
    assert rep.min_norm_sq > rep.two_delta_p**2 == Fraction(16, 6561)
    assert rep.verdict == FALSIFIES_A


def test_certificate_verdict_is_exact_comparison():
    for m in (6, 7, 8, 9):
        rep = min_over_symmetries_v0(m)
        expected = FALSIFIES_A if rep.min_norm_sq > (2 * rep.delta_p) ** 2 else INCONCLUSIVE
        assert rep.verdict == expected


def test_lattice_minimum_against_direct_scan():
    # independent oracle: rebuild the minimum from psp_v0_norm_sq alone
    for m in (6, 8):
        cells = [
            (psp_v0_norm_sq(m, a, b), a, b)
            for a in range(m * m + 1)
            for b in range(2 * m + 2)
        ]
        value, alpha, beta = min(cells)
        rep = min_over_symmetries_v0(m)
        assert rep.min_norm_sq == value
        assert rep.argmin == (alpha, beta)


def test_workers_do_not_change_the_report():
    a = min_over_symmetries_v0(8, workers=1)
    b = min_over_symmetries_v0(8, workers=4)
    assert a == b


def test_branch_bound_examples():
    assert abs(branch_lower_bound(6, 0) - 5.0 / 49.0) < 1e-15
    assert abs(branch_lower_bound(6, 9) - math.sqrt(13) / 98.0) < 1e-15
    overall = branch_bound_overall(8)
    assert abs(overall - (2.0 / 81.0) / 4.0 * math.sqrt(17)) < 1e-15
    assert overall == pytest.approx(0.0255, abs=1e-4)
    # the exact enumeration is strictly stronger at m=8
    assert overall < math.sqrt(2.0 / 729.0)
    with pytest.raises(ValueError):
        branch_lower_bound(5, 0)
    with pytest.raises(ValueError):
        branch_lower_bound(6, 19)  # above m^2/2


def test_branch_bound_sound_on_every_normalized_cell():
    for m in (6, 7, 8):
        for alpha in range(0, m * m // 2 + 1):
            bound = branch_lower_bound(m, alpha)
            for beta in range(0, 2 * m + 2):
                exact = math.sqrt(float(psp_v0_norm_sq(m, alpha, beta)))
                assert exact >= bound - 1e-12, (m, alpha, beta)


def test_report_serialization():
    rep = min_over_symmetries_v0(8)
    d = rep.to_json_dict()
    assert d["min_norm_sq"] == "2/729"
    assert d["two_delta_p"] == "4/81"
    assert d["delta_p"] == "2/81"
    assert d["verdict"] == FALSIFIES_A
    assert d["argmin_alpha"] == 32 and d["argmin_beta"] == 8


def test_profile_validation():
    with pytest.raises(ValueError):
        SignProfile(eps=(1, 2), eps_prime=(1,))
    prof = SignProfile(eps=(1,) * 4, eps_prime=(1,) * 5)
    prof.validate(2)
    with pytest.raises(ValueError):
        prof.validate(3)
