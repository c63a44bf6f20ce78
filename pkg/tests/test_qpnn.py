import math

import mpmath
import numpy as np
import pytest

from qpainleve import hypergeom as hg
from qpainleve import qpnn
from qpainleve.errors import ConvergenceError, DegenerateSystemError, SingularConfigurationError
from qpainleve.qpnn import QPnnParams, QPnnState, StepPair
from qpainleve.sampling import draw_hg_params, draw_onshell


def _scale(state):
    return max(1.0, max(abs(v) for v in (*state.x, *state.y)))


# ---------------------------------------------------------------- data types


def test_params_validation():
    with pytest.raises(ValueError):
        QPnnParams(1, 2.0, [1.0], [1.0])
    with pytest.raises(ValueError):
        QPnnParams(2, 0.5, [1.0, 1.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        QPnnParams(2, 2.0, [1.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        QPnnParams(2, 2.0, [1.0, 0.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        QPnnParams(2, 2.0, [1.0, 1.0], [1.0, 1.0], sqrt_q=1.0)


def test_sqrt_branch_is_kept():
    p = QPnnParams(3, 2.0, [1, 1, 1], [1, 1, 1], sqrt_q=-math.sqrt(2))
    assert p.sqrt_q.real < 0
    assert p.relation_constant == pytest.approx(2.0)
    assert p.b0 == pytest.approx(0.5)


def test_sqrt_branch_refined_in_mp():
    with mpmath.workdps(40):
        p = QPnnParams(2, mpmath.mpc(3), [mpmath.mpc(1)] * 2, [mpmath.mpc(1)] * 2, sqrt_q=complex(-math.sqrt(3)))
        assert abs(p.sqrt_q**2 - 3) < mpmath.mpf(10) ** -38
        assert p.sqrt_q.real < 0


def test_state_rejects_zero_time():
    with pytest.raises(ValueError):
        QPnnState(0, [1, 2], [3, 4])


def test_boundary_conventions():
    s = QPnnState(0.5, [1.0, 3.0], [2.0, 4.0])
    assert s.x0 == 1.5
    assert s.y0(2.0) == 4.0
    assert s.xx(0) == s.x0 and s.xx(2) == 3.0
    assert s.yy(0, 2.0) == 4.0 and s.yy(1, 2.0) == 2.0


# ---------------------------------------------------------------- residuals


def test_residual_system_length(onshell3):
    p, pair = onshell3
    assert len(qpnn.residual_system(p, pair)) == 2 * 3 + 1


def test_residuals_on_step_n2_output(g):
    for _ in range(20):
        p, pair = draw_onshell(g, 2)
        new = qpnn.step_n2(p, pair.at_t)
        assert qpnn.equation_residual(p, StepPair(pair.at_t, new)) <= 1e-10


@pytest.mark.parametrize("n", [2, 3])
def test_residuals_on_hypergeometric_slice(g, n):
    p = draw_hg_params(g, n)
    spec = hg.HGSpec.from_params(p)
    pair = hg.specialized_pair(spec, 0.3)
    res = qpnn.residual_system(p, pair)
    assert max(abs(r) for r in res) <= 1e-10


def test_residual_detects_perturbation(onshell2):
    p, pair = onshell2
    X = list(pair.at_qt.x)
    X[0] += 1e-2
    bad = StepPair(pair.at_t, QPnnState(pair.at_qt.t, X, pair.at_qt.y))
    r1 = abs(qpnn.residual_system(p, bad)[0])
    assert 1e-4 < r1 < 1.0


def test_onshell_draws_are_exact(g):
    for n in (2, 3, 4):
        p, pair = draw_onshell(g, n)
        assert max(abs(r) for r in qpnn.residual_system(p, pair)) <= 1e-11


# ---------------------------------------------------------------- steppers


def test_step_n2_matches_onshell_data(g):
    for _ in range(5):
        p, pair = draw_onshell(g, 2)
        assert qpnn.step_n2(p, pair.at_t).distance(pair.at_qt) <= 1e-9 * _scale(pair.at_qt)


def test_step_n2_matches_newton(g):
    for _ in range(20):
        p, pair = draw_onshell(g, 2)
        a = qpnn.step_n2(p, pair.at_t)
        b = qpnn.step_newton(p, pair.at_t)
        assert a.distance(b) <= 1e-9 * _scale(a)
        assert b.t == p.q * pair.at_t.t


def test_step_n2_vanishing_xi3():
    # x_2 = x_1, y_2 = y_1 and a_1 a_2 q^{1/2} = q make the numerator of x_1(qt) vanish
    q = 1.7
    a1 = 0.8
    a2 = math.sqrt(q) / a1
    p = QPnnParams(2, q, [a1, a2], [1.3, 0.9])
    s = QPnnState(0.4, [0.3, 0.3], [0.25, 0.25])
    assert qpnn.step_n2(p, s).x[0] == 0


def test_step_n2_rejects_other_orders(onshell3):
    p, pair = onshell3
    with pytest.raises(ValueError):
        qpnn.step_n2(p, pair.at_t)


def test_step_n2_singular_denominator():
    # y_1 = y_2 = 0 zeroes both denominators of the closed form
    p = QPnnParams(2, 1.5, [0.9, 1.2], [1.1, 0.7])
    with pytest.raises(SingularConfigurationError):
        qpnn.step_n2(p, QPnnState(0.4, [0.2, 0.5], [0.0, 0.0]))


def test_degenerate_linear_system(onshell2):
    # forward Y-solve is singular at q^2 t = 1
    p, pair = onshell2
    t = 1 / p.q**2
    with pytest.raises(DegenerateSystemError):
        qpnn._solve_Y(p, QPnnState(t, pair.at_t.x, pair.at_t.y), pair.at_qt.x)


def test_newton_n3(g):
    for _ in range(5):
        p, pair = draw_onshell(g, 3)
        new, info = qpnn.step_newton(p, pair.at_t, full_output=True)
        assert qpnn.equation_residual(p, StepPair(pair.at_t, new)) <= 1e-8
        assert info.relation_residual <= 1e-10
        assert new.distance(pair.at_qt) <= 1e-8 * _scale(pair.at_qt)


def test_newton_n3_on_hypergeometric_slice(g):
    p = draw_hg_params(g, 3)
    spec = hg.HGSpec.from_params(p)
    pair = hg.specialized_pair(spec, 0.25)
    new = qpnn.step_newton(p, pair.at_t)
    assert new.distance(pair.at_qt) <= 1e-9 * _scale(pair.at_qt)
    assert max(abs(v) for v in new.y) <= 1e-12


def test_newton_nonconvergence(onshell2):
    p, pair = onshell2
    with pytest.raises(ConvergenceError) as info:
        qpnn.step_newton(p, pair.at_t, guess=[1e6, -1e6], max_iter=2)
    assert len(info.value.trace) >= 1


def test_newton_from_guess(onshell2):
    p, pair = onshell2
    new, info = qpnn.step_newton(p, pair.at_t, guess=[v + 1e-3 for v in pair.at_qt.x], full_output=True)
    assert info.method == "newton-guess"
    assert new.distance(pair.at_qt) <= 1e-9 * _scale(pair.at_qt)


def test_step_backward_inverts_forward(g):
    for n in (2, 3):
        p, pair = draw_onshell(g, n)
        prev = qpnn.step_backward(p, pair.at_qt)
        assert prev.distance(pair.at_t) <= 1e-9 * _scale(pair.at_t)


def test_step_dispatch(onshell2):
    p, pair = onshell2
    _, info = qpnn.step(p, pair.at_t, full_output=True)
    assert info.method == "closed-form"
    _, info = qpnn.step(p, pair.at_t, newton=True, full_output=True)
    assert info.method != "closed-form"


# ---------------------------------------------------------------- orbits


def test_orbit_zero_steps(onshell2):
    p, pair = onshell2
    assert qpnn.orbit(p, pair.at_t, 0) == [pair.at_t]


def test_orbit_round_trip(g):
    p, pair = draw_onshell(g, 2)
    fwd = qpnn.orbit(p, pair.at_t, 3)
    back = qpnn.orbit(p, fwd[-1], -3)
    assert back[-1].distance(pair.at_t) <= 1e-9 * _scale(pair.at_t)


def test_orbit_pairs_onshell(g):
    p, pair = draw_onshell(g, 2)
    states = qpnn.orbit(p, pair.at_t, 10)
    assert len(states) == 11
    for s0, s1 in zip(states, states[1:]):
        assert qpnn.equation_residual(p, StepPair(s0, s1)) <= 1e-10 * max(_scale(s0), _scale(s1))


def test_relation_residual_stays_at_roundoff(g):
    # regression baseline: on generic n = 2 data the relation defect does not grow along the orbit
    for _ in range(5):
        p, pair = draw_onshell(g, 2)
        orb = qpnn.orbit(p, pair.at_t, 10, full_output=True)
        assert len(orb.relation_residuals) == 10
        assert max(orb.relation_residuals) <= 1e-12


def test_orbit_reports_failing_step():
    p = QPnnParams(2, 1.5, [0.9, 1.2], [1.1, 0.7])
    with pytest.raises(SingularConfigurationError) as info:
        qpnn.orbit(p, QPnnState(0.4, [0.2, 0.5], [0.0, 0.0]), 3)
    assert info.value.step == 1


# ---------------------------------------------------------------- Weyl actions


@pytest.mark.parametrize("n", [2, 3])
def test_weyl_involution(g, n):
    p, pair = draw_onshell(g, n)
    eps = np.finfo(float).eps
    for j in range(2 * n):
        p2, s2 = qpnn.weyl_word([j, j], p, pair.at_t)
        assert qpnn._deviation(p, pair.at_t, p2, s2) <= 10 * eps * _scale(pair.at_t)


def test_weyl_untouched_coordinates_bitwise(onshell2):
    p, pair = onshell2
    s = pair.at_t
    p1, s1 = qpnn.weyl_apply(3, p, s)  # r_3 changes x_2 and swaps a_2, b_2
    assert s1.x[0] == s.x[0] and s1.y == s.y and s1.t == s.t
    assert p1.a[0] == p.a[0] and p1.b[0] == p.b[0]
    p1, s1 = qpnn.weyl_apply(2, p, s)  # r_2 changes y_1 and swaps a_2, b_1
    assert s1.x == s.x and s1.y[1] == s.y[1]
    assert p1.a[0] == p.a[0] and p1.b[1] == p.b[1]


def test_weyl_r0_boundary_swap(onshell2):
    p, pair = onshell2
    p1, _ = qpnn.weyl_apply(0, p, pair.at_t)
    assert p1.a[0] == p.b0
    assert p1.b[1] == p.q * p.a[0]


def test_weyl_odd_generator_trivial_when_parameters_equal():
    p = QPnnParams(2, 1.6, [0.7, 1.3], [0.7, 0.9])
    s = QPnnState(0.35, [0.2, -0.4], [0.5, 0.1])
    p1, s1 = qpnn.weyl_apply(1, p, s)
    assert (p1.a, p1.b) == (p.a, p.b)
    assert s1 == s


def test_weyl_preserves_solutions(g):
    p, pair = draw_onshell(g, 2)
    for j in range(4):
        p1, pr1 = qpnn.weyl_apply_pair(j, p, pair)
        assert qpnn.equation_residual(p1, pr1) <= 1e-8


def test_weyl_verify_relations(g):
    for n in (2, 3):
        p, pair = draw_onshell(g, n)
        rep = qpnn.weyl_verify(p, pair.at_t)
        assert len(rep.involution) == 2 * n
        assert rep.max_involution <= 1e-12
        assert rep.max_braid <= 1e-10
        assert rep.max_commute <= 1e-10


def test_weyl_commuting_pairs_n2(onshell2):
    p, pair = onshell2
    rep = qpnn.weyl_verify(p, pair.at_t)
    assert set(rep.commute) == {"(r0 r2)^2", "(r1 r3)^2"}
    assert rep.commute["(r1 r3)^2"] <= 1e-10


def test_dynkin_adjacency():
    assert qpnn.adjacent(0, 3, 2) and qpnn.adjacent(1, 2, 2)
    assert not qpnn.adjacent(1, 3, 2)


def test_weyl_singular_names_generator():
    p = QPnnParams(2, 1.6, [0.7, 1.3], [0.8, 0.9])
    s = QPnnState(0.35, [0.2, 0.2], [0.5, 0.1])
    with pytest.raises(SingularConfigurationError, match="r_2"):
        qpnn.weyl_apply(2, p, s)
    with pytest.raises(SingularConfigurationError, match="r_2"):
        qpnn.weyl_verify(p, s)


def test_weyl_index_range(onshell2):
    p, pair = onshell2
    with pytest.raises(ValueError):
        qpnn.weyl_apply(4, p, pair.at_t)
