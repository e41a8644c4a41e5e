import numpy as np
import pytest

from diracedge.fields import make_grid
from diracedge.mass import (TANH_R0, CallablePerturbation, CircleEdge, MassModel, PerturbedEdge,
                            SinePerturbation, StraightEdge, TransitionProfile, eval_mass,
                            sample_mass, signed_edge_coordinate)


@pytest.mark.parametrize("kind", ["tanh", "sign"])
def test_builtin_limits_and_oddness(kind):
    p = TransitionProfile(kind)
    assert abs(p(50.0) - 1) < 1e-10 and abs(p(-50.0) + 1) < 1e-10
    u = np.linspace(-8, 8, 401)
    assert np.array_equal(p(-u), -p(u))
    outside = np.abs(u) > p.r0
    assert np.all(np.abs(p(u[outside])) > 0.5)


def test_tanh_r0_default():
    assert TANH_R0 == pytest.approx(0.5493061443, rel=1e-9)
    assert np.tanh(TANH_R0) == pytest.approx(0.5)


def test_sign_at_zero():
    assert TransitionProfile("sign")(0.0) == 0.0


def test_profile_validation():
    with pytest.raises(ValueError):
        TransitionProfile("cubic")
    with pytest.raises(ValueError):
        TransitionProfile("tanh", m_inf=0)
    with pytest.raises(ValueError):
        TransitionProfile("custom", func=np.tanh)  # needs r0


@pytest.mark.parametrize("kind", ["tanh", "sign"])
def test_antiderivative_matches_quadrature(kind):
    from scipy import integrate

    p = TransitionProfile(kind, m_inf=1.3)
    for u in (-4.0, -0.3, 0.0, 2.2, 40.0):
        ref = integrate.quad(lambda s: float(p(s)), 0, u, points=[0.0] if u else None)[0]
        assert p.antiderivative(u) == pytest.approx(ref, abs=1e-10)


def test_custom_antiderivative_paths_agree():
    p = TransitionProfile("custom", r0=0.6, func=lambda u: np.tanh(u))
    small = p.antiderivative(np.array([1.5, -2.0]))
    big = p.antiderivative(np.linspace(-3, 3, 200))
    ref = TransitionProfile("tanh")
    assert np.allclose(small, ref.antiderivative(np.array([1.5, -2.0])), atol=1e-10)
    assert np.allclose(big, ref.antiderivative(np.linspace(-3, 3, 200)), atol=1e-8)


def test_signed_coordinate_examples():
    assert signed_edge_coordinate(CircleEdge(20), 20.0, 0.0) == 0.0
    assert signed_edge_coordinate(StraightEdge(0.0), 3.0, 7.0) == 3.0
    edge = PerturbedEdge(SinePerturbation(), 0.2)
    assert signed_edge_coordinate(edge, -np.sin(0.2 * 5), 5.0) == pytest.approx(0, abs=1e-15)


def test_eval_mass_examples():
    tanh = TransitionProfile("tanh")
    m = MassModel(tanh, StraightEdge(0.0))
    assert eval_mass(m, 50.0, 0.0) == pytest.approx(1 - 2 * np.exp(-100), abs=1e-15)
    assert eval_mass(MassModel(tanh, CircleEdge(20)), 0.0, 20.0) == pytest.approx(0, abs=1e-12)
    assert eval_mass(MassModel(TransitionProfile("sign"), CircleEdge(10)), 0.0, 0.0) == -1.0


def test_mass_vanishes_on_edges():
    tanh = TransitionProfile("tanh")
    s = np.linspace(-10, 10, 41)
    edge = PerturbedEdge(SinePerturbation(), 0.3)
    assert np.max(np.abs(eval_mass(MassModel(tanh, edge), -np.sin(0.3 * s), s))) < 1e-12
    th = np.linspace(0, 2 * np.pi, 50)
    circ = MassModel(tanh, CircleEdge(7.5))
    assert np.max(np.abs(eval_mass(circ, 7.5 * np.cos(th), 7.5 * np.sin(th)))) < 1e-12


def test_sign_changes_across_edge():
    m = MassModel(TransitionProfile("tanh"), StraightEdge(0.7))
    rng = np.random.default_rng(3)
    pts = rng.uniform(-5, 5, size=(100, 2))
    n = np.array([np.cos(0.7), np.sin(0.7)])
    on = pts - np.outer(pts @ n, n)
    a = eval_mass(m, *(on - 0.05 * n).T)
    b = eval_mass(m, *(on + 0.05 * n).T)
    assert np.all(a < 0) and np.all(b > 0)


def test_circle_mass_rotationally_invariant():
    m = MassModel(TransitionProfile("tanh"), CircleEdge(12))
    th = np.linspace(0, 2 * np.pi, 37)
    for r in (3.0, 11.5, 12.0, 20.0):
        v = eval_mass(m, r * np.cos(th), r * np.sin(th))
        assert np.ptp(v) < 1e-12


def test_perturbed_mass_tends_to_straight():
    tanh = TransitionProfile("tanh")
    g = make_grid((-10, 10, -10, 10), 32, 32)
    straight = sample_mass(MassModel(tanh, StraightEdge(0.0)), g)
    bent = sample_mass(MassModel(tanh, PerturbedEdge(SinePerturbation(), 1e-6)), g)
    assert np.max(np.abs(bent - straight)) < 1e-5


def test_sample_mass_examples():
    g = make_grid((-60, 60, -60, 60), 64, 64)
    zero = TransitionProfile("custom", r0=1.0, func=lambda u: 0.0)
    assert np.all(sample_mass(MassModel(zero, StraightEdge(0.0)), g) == 0)
    circ = sample_mass(MassModel(TransitionProfile("tanh"), CircleEdge(20)), g)
    i = np.argmin(np.abs(g.x1))
    assert circ[i, i] == pytest.approx(-1.0, abs=1e-12)
    # odd under x1 -> -x1 about the edge (nodes symmetric about 0 except the first)
    gs = make_grid((-10, 10, -10, 10), 64, 8)
    m = sample_mass(MassModel(TransitionProfile("tanh"), StraightEdge(0.0)), gs)
    assert np.allclose(m[1:][::-1], -m[1:], atol=1e-15)


def test_circle_radius_hypothesis():
    with pytest.raises(ValueError, match="3\\*r0"):
        MassModel(TransitionProfile("tanh"), CircleEdge(0.5))
    MassModel(TransitionProfile("tanh"), CircleEdge(1.7))


def test_perturbed_validation():
    with pytest.raises(ValueError):
        PerturbedEdge(SinePerturbation(), 1.0)
    bad = CallablePerturbation(h=lambda s: 1 / (s - s), dh=np.cos, d2h=np.sin)
    with np.errstate(all="ignore"), pytest.raises(ValueError, match="not finite"):
        PerturbedEdge(bad, 0.1)


def test_period_in_x2():
    assert PerturbedEdge(SinePerturbation(), 0.2).period_x2 == pytest.approx(10 * np.pi)
    assert PerturbedEdge(SinePerturbation(), 0.0).period_x2 is None
