import numpy as np
import pytest

from gyropencil import fixtures
from gyropencil.errors import ConditionViolation, MassNotDefinite
from gyropencil.pencil import (
    PencilSpec, RankOneCoupling, choose_shift, classify_type, evaluate,
    geometric_multiplicity, is_semisimple, nonreal_region,
    nonsimple_real_interval, spectrum, validate_condition_I,
)

import support


def sorted_lams(result):
    return sorted(support.expand_records(result), key=lambda z: (z.real, z.imag))


def test_decoupled_diagonal_spectrum():
    # det L = (lambda^2 - 1)(lambda^2 - 4) regardless of eta when G = 0
    spec = PencilSpec(np.eye(2), np.zeros((2, 2)), np.diag([1.0, 4.0]))
    res = spectrum(spec, 0.7)
    got = sorted_lams(res)
    assert np.allclose(got, [-2.0, -1.0, 1.0, 2.0], atol=1e-9)
    assert res.discarded_infinite == 0


def test_w1_spectrum_eta1():
    # det L = (lambda^2 - 1)(-lambda - 1): -1 twice, +1 once, one infinite
    res = spectrum(fixtures.w1(), 1.0)
    got = sorted_lams(res)
    assert np.allclose(got, [-1.0, -1.0, 1.0], atol=1e-9)
    assert res.discarded_infinite == 1
    rec = res.find(-1.0)
    assert rec.alg_mult == 2 and rec.geo_mult == 2


def test_w1_spectrum_eta0():
    # eta = 0 freezes the gyroscopic term: det = -(lambda^2 - 1)
    res = spectrum(fixtures.w1(), 0.0)
    got = sorted_lams(res)
    assert np.allclose(got, [-1.0, 1.0], atol=1e-9)
    assert res.discarded_infinite == 2


def test_w2_spectrum_cube_roots():
    # det L = -lambda^3 - 1 at eta = 1
    res = spectrum(fixtures.w2(), 1.0)
    got = set()
    for rec in res.records:
        got.add((round(rec.lam.real, 6), round(rec.lam.imag, 6)))
    expect = {(-1.0, 0.0), (0.5, round(np.sqrt(3) / 2, 6)),
              (0.5, -round(np.sqrt(3) / 2, 6))}
    assert got == expect


def test_w3_spectrum_eta1():
    res = spectrum(fixtures.w3(), 1.0)
    got = sorted_lams(res)
    assert np.allclose(got, [-1.0, 0.1, 0.9, 1.0], atol=1e-9)


def test_w3_collision_double_eigenvalue():
    # coupled factor becomes (lambda - 0.3)^2 at eta = 0.6
    spec = fixtures.w3()
    res = spectrum(spec, 0.6)
    rec = res.find(0.3)
    assert rec.alg_mult == 2
    assert rec.geo_mult == 1
    assert not is_semisimple(spec, 0.3, 0.6)
    assert is_semisimple(spec, 1.0, 0.6)


def test_record_types_w3():
    res = spectrum(fixtures.w3(), 1.0)
    for lam, t1, t2 in ((1.0, 1, 0), (-1.0, 1, 0), (0.1, 0, 1), (0.9, 0, 1)):
        rec = res.find(lam)
        assert (rec.type1_mult, rec.type2_mult) == (t1, t2), lam


def test_classify_w1_mixed_eigenvalue():
    # the double eigenvalue -1 carries one persistent and one moving copy
    res = spectrum(fixtures.w1(), 1.0)
    rec = res.find(-1.0)
    assert rec.type1_mult == 1
    assert rec.type2_mult == 1


def test_geometric_multiplicity_values():
    spec = fixtures.w1()
    assert geometric_multiplicity(spec, -1.0, 1.0) == 2
    assert geometric_multiplicity(spec, 1.0, 1.0) == 1
    # a regular point has a trivial kernel
    assert geometric_multiplicity(spec, 5.0, 1.0) == 0


def test_residuals_and_vectors():
    rng = np.random.default_rng(23)
    spec = support.rand_condition1_spec(rng, n_max=6)
    res = spectrum(spec, 1.0)
    for rec in res.records:
        assert rec.residual <= 1e-7
        for v in rec.vectors.T:
            r = evaluate(spec, rec.lam, 1.0) @ v
            assert np.linalg.norm(r) <= 1e-6 * spec.scale


def test_alg_count_conservation():
    rng = np.random.default_rng(29)
    for _ in range(10):
        spec = support.rand_condition1_spec(rng, n_max=6)
        res = spectrum(spec, 0.8)
        total = sum(rec.alg_mult for rec in res.records)
        assert total + res.discarded_infinite == 2 * spec.n


def test_conjugate_symmetry_of_records():
    rng = np.random.default_rng(31)
    for _ in range(10):
        spec = support.rand_condition1_spec(rng, n_max=6)
        res = spectrum(spec, 1.0)
        lams = support.expand_records(res)
        paired = support.max_pair_distance(lams, np.conj(lams))
        assert paired <= 1e-7 * spec.scale


def test_validate_rejects_indefinite_mass():
    with pytest.raises(ConditionViolation):
        PencilSpec(np.diag([1.0, -0.5]), np.zeros((2, 2)), np.eye(2))


def test_validate_rejects_indefinite_gyro():
    with pytest.raises(ConditionViolation):
        PencilSpec(np.eye(2), np.diag([0.0, -1.0]), np.eye(2))


def test_validate_rejects_common_kernel():
    m = np.diag([1.0, 0.0])
    g = np.diag([1.0, 0.0])
    a = np.diag([1.0, 0.0])
    with pytest.raises(ConditionViolation):
        PencilSpec(m, g, a)


def test_validate_report_without_raise():
    m = np.diag([1.0, -0.5])
    spec = PencilSpec(m, np.zeros((2, 2)), np.eye(2), validate=False)
    rep = validate_condition_I(spec)
    assert not rep.all_pass


def test_rank_one_flag_must_match_g():
    g = np.diag([1.0, 1.0])
    with pytest.raises(ConditionViolation):
        PencilSpec(np.eye(2), g, np.eye(2),
                   rank_one=RankOneCoupling(b=1.0, e_index=1))


def test_choose_shift_deterministic():
    spec = fixtures.w3()
    s1 = choose_shift(spec, 1.0)
    s2 = choose_shift(spec, 1.0)
    assert s1 == s2


def test_nonreal_region_contains_w3_pair():
    spec = fixtures.w3()
    region = nonreal_region(spec, 0.5)
    res = spectrum(spec, 0.5)
    for rec in res.records:
        if abs(rec.lam.imag) > 1e-9:
            assert region.contains(rec.lam)


def test_nonreal_region_needs_definite_mass():
    with pytest.raises(MassNotDefinite):
        nonreal_region(fixtures.w1(), 1.0)


def test_nonsimple_interval_holds_collision():
    spec = fixtures.w3()
    lo, hi = nonsimple_real_interval(spec)
    assert lo == 0.0
    assert hi == pytest.approx(0.5)
    assert lo <= 0.3 <= hi


def test_infinite_eigenvalue_count_tracks_mass_rank():
    rng = np.random.default_rng(37)
    # M of rank 2 inside n=4 discards 2n - (rank-deficiency-adjusted) values
    u = support.rand_orth(rng, 4)
    m = u @ np.diag([1.0, 2.0, 0.0, 0.0]) @ u.T
    m = 0.5 * (m + m.T)
    a = u @ np.diag([1.0, -1.0, 2.0, 3.0]) @ u.T
    a = 0.5 * (a + a.T)
    spec = PencilSpec(m, np.zeros((4, 4)), a)
    res = spectrum(spec, 1.0)
    coeffs = support.det_poly_coeffs(spec, 1.0)
    deg = support.poly_roots(coeffs).size
    assert sum(r.alg_mult for r in res.records) == deg
    assert res.discarded_infinite == 2 * 4 - deg
