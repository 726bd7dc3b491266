from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import code_for
from tetracode.gf2 import Membership, stabilizer_membership
from tetracode.lattice import Chain, Color, boundary_project, star
from tetracode.xdecoder import (DecodeOutcome, FailureStage, LiftConfig, LiftFailure, LiftRefused, PeelStats,
                                SweepFailure, decode_x, extract_x_syndrome, lift_vertex_naive, lift_vertex_peel,
                                restrict_edges, sweep_find_faces)


def _faces_through(lattice, v, tets):
    """Faces containing ``v`` on the mod-2 boundary of ``tets``."""
    return frozenset(f for f in boundary_project(lattice, Chain(3, frozenset(tets)), 2).members
                     if v in lattice.faces[f])


def _constrained(lattice, v, faces):
    """Drop faces spanned by quasivertices, which no syndrome constrains."""
    return frozenset(f for f in faces if not all(lattice.is_quasi(u) for u in lattice.faces[f]))


def _checked_boundary(code, faces):
    edges = boundary_project(code.lattice, Chain(2, frozenset(faces)), 1).members
    return frozenset(e for e in edges if code.is_z_check_edge[e])


def test_config_defaults_and_validation():
    cfg = LiftConfig()
    assert cfg.lift_color is Color.R
    assert cfg.sweep_colors == (Color.G, Color.B, Color.Y)
    assert LiftConfig(lift_color="b").sweep_colors == (Color.R, Color.G, Color.Y)
    for bad in ({"sweep_mode": "magic"}, {"sweep_schedule": ()}, {"sweep_schedule": ("up",)},
                {"max_sweep_rounds": 0}):
        with pytest.raises(ValueError):
            LiftConfig(**bad)


def test_outcome_invariant():
    with pytest.raises(ValueError):
        DecodeOutcome(Chain(3), heralded_failure=False, failure_stage=FailureStage.LIFT)
    out = DecodeOutcome.failed(SweepFailure("x"))
    assert out.heralded_failure and out.failure_stage is FailureStage.SWEEP


def test_syndrome_examples(code5):
    lat = code5.lattice
    bulk = next(t for t, vs in enumerate(lat.tetrahedra) if not any(lat.is_quasi(v) for v in vs))
    assert len(extract_x_syndrome(code5, [bulk])) == 6
    edge_q = next(t for t, vs in enumerate(lat.tetrahedra) if sum(lat.is_quasi(v) for v in vs) == 1)
    assert len(extract_x_syndrome(code5, [edge_q])) == 6
    for f in range(lat.count(2)):
        pair = lat.cofaces(2, f, 3)
        if len(pair) == 2:
            edges = boundary_project(lat, Chain(3, frozenset(pair)), 1).members
            expected = frozenset(e for e in edges if code5.is_z_check_edge[e])
            assert len(edges) == 6
            assert extract_x_syndrome(code5, pair).members == expected
    assert not extract_x_syndrome(code5, [])


@pytest.mark.parametrize("mode", ["sweep", "gf2"])
def test_sweep_single_face(code3, mode):
    cfg = LiftConfig(sweep_mode=mode)
    lat = code3.lattice
    for kappa in cfg.sweep_colors:
        for f, vs in enumerate(lat.faces):
            if kappa in {lat.color(v) for v in vs}:
                continue
            sigma = _checked_boundary(code3, [f])
            if not sigma:
                continue
            gamma = sweep_find_faces(lat, sigma, kappa, cfg, d=3)
            assert _checked_boundary(code3, gamma.members) == sigma
            if len(sigma) == 3:
                assert gamma.members == {f}


def test_sweep_empty_and_contract(code3):
    lat = code3.lattice
    assert not sweep_find_faces(lat, [], Color.G)
    with pytest.raises(ValueError):
        sweep_find_faces(lat, [], Color.R)
    touching_g = next(e for e, (a, b) in enumerate(lat.edges) if Color.G in (lat.color(a), lat.color(b)))
    with pytest.raises(ValueError):
        sweep_find_faces(lat, [touching_g], Color.G)


@pytest.mark.parametrize("mode", ["sweep", "gf2"])
def test_sweep_single_qubit_restrictions(code5, mode):
    cfg = LiftConfig(sweep_mode=mode)
    lat = code5.lattice
    for t in range(code5.n_qubits):
        sigma = extract_x_syndrome(code5, [t]).members
        for kappa in cfg.sweep_colors:
            part = restrict_edges(lat, sigma, kappa)
            gamma = sweep_find_faces(lat, part, kappa, cfg, d=5)
            assert _checked_boundary(code5, gamma.members) == part
            for f in gamma:
                colors = [lat.color(v) for v in lat.faces[f]]
                assert kappa not in colors
                assert colors.count(cfg.lift_color) == 1


def test_sweep_round_limit_heralded(code7):
    lat = code7.lattice
    cfg = LiftConfig(max_sweep_rounds=1)
    rng = random.Random(3)
    error = rng.sample(range(code7.n_qubits), 12)
    sigma = restrict_edges(lat, extract_x_syndrome(code7, error).members, Color.G)
    with pytest.raises(SweepFailure):
        sweep_find_faces(lat, sigma, Color.G, cfg, d=7)


def test_lift_single_tetra(code5):
    lat = code5.lattice
    for v in range(lat.count(0)):
        if lat.color(v) != Color.R:
            continue
        for t in star(lat, v, 3):
            gamma = _faces_through(lat, v, [t])
            assert len(gamma) == 3
            assert lift_vertex_peel(lat, v, gamma).members == {t}
            assert lift_vertex_naive(lat, v, gamma).members == {t}


def test_lift_empty(code5):
    lat = code5.lattice
    real = next(v.id for v in lat.vertices if not v.is_quasi)
    assert not lift_vertex_peel(lat, real, [])
    assert not lift_vertex_naive(lat, real, [])


def test_lift_single_face_fails(code5):
    lat = code5.lattice
    v = next(v.id for v in lat.vertices if not v.is_quasi)
    f = lat.cofaces(0, v, 2)[0]
    with pytest.raises(LiftFailure):
        lift_vertex_peel(lat, v, [f])
    with pytest.raises(LiftFailure):
        lift_vertex_naive(lat, v, [f])


def test_lift_rejects_foreign_face(code5):
    lat = code5.lattice
    v = next(v.id for v in lat.vertices if not v.is_quasi)
    foreign = next(f for f, vs in enumerate(lat.faces) if v not in vs)
    with pytest.raises(ValueError):
        lift_vertex_peel(lat, v, [foreign])


def test_complement_rule_bulk(code5):
    lat = code5.lattice
    v = max((v.id for v in lat.vertices if not v.is_quasi), key=lambda u: len(star(lat, u, 3)))
    tets = sorted(star(lat, v, 3))
    big = tets[: len(tets) - 2]
    gamma = _faces_through(lat, v, big)
    expected = frozenset(tets[len(tets) - 2:])
    assert lift_vertex_naive(lat, v, gamma).members == expected
    assert lift_vertex_peel(lat, v, gamma).members == expected


def test_naive_cap():
    code = code_for(7)
    lat = code.lattice
    v = next(v.id for v in lat.vertices if len(star(lat, v.id, 3)) == 24)
    lift_vertex_naive(lat, v, [], cap=24)
    with pytest.raises(LiftRefused):
        lift_vertex_naive(lat, v, [], cap=12)


@pytest.mark.parametrize("d", [3, 5])
def test_peel_matches_naive_random(d):
    code = code_for(d)
    lat = code.lattice
    rng = random.Random(d)
    vertices = list(range(lat.count(0)))
    for _ in range(300):
        v = rng.choice(vertices)
        tets = sorted(star(lat, v, 3))
        chosen = [t for t in tets if rng.random() < 0.5]
        gamma = set(_faces_through(lat, v, chosen))
        if rng.random() < 0.2:
            gamma ^= {rng.choice(lat.cofaces(0, v, 2))}
        try:
            naive = lift_vertex_naive(lat, v, gamma)
        except LiftFailure:
            naive = None
        try:
            peel = lift_vertex_peel(lat, v, gamma)
        except LiftFailure:
            peel = None
        assert naive == peel
        if peel is not None:
            assert _constrained(lat, v, _faces_through(lat, v, peel.members)) == _constrained(lat, v, gamma)


@pytest.mark.parametrize("d", [3, 5, 7, 9, 11])
def test_peel_work_on_quasivertex(d):
    lat = code_for(d).lattice
    q = lat.quasivertices[Color.R]
    stats = PeelStats()
    lift_vertex_peel(lat, q, [], stats)
    assert stats.iterations == len(star(lat, q, 3))


def _assert_corrected(code, error, cfg=LiftConfig()):
    sigma = extract_x_syndrome(code, error)
    out = decode_x(code, sigma, cfg, check=True)
    assert not out.heralded_failure, out.detail
    residual = frozenset(error) ^ out.correction.members
    assert stabilizer_membership(code, residual, "x") is Membership.STABILIZER


@pytest.mark.parametrize("mode", ["sweep", "gf2"])
@pytest.mark.parametrize("d", [3, 5])
def test_single_errors_corrected(d, mode):
    code = code_for(d)
    for t in range(code.n_qubits):
        _assert_corrected(code, [t], LiftConfig(sweep_mode=mode))


@pytest.mark.parametrize("lift", ["g", "b", "y"])
def test_other_lift_colors(code5, lift):
    for t in range(code5.n_qubits):
        _assert_corrected(code5, [t], LiftConfig(lift_color=lift))


def test_empty_syndrome(code3):
    out = decode_x(code3, Chain(1))
    assert not out.heralded_failure and not out.correction


def test_unchecked_edge_rejected(code3):
    lat = code3.lattice
    qq = next(e for e in range(lat.count(1)) if not code3.is_z_check_edge[e])
    with pytest.raises(ValueError):
        decode_x(code3, [qq])


@settings(max_examples=40, deadline=None)
@given(st.sets(st.integers(0, 174), max_size=15))
def test_round_trip_random_errors(error):
    code = code_for(7)
    sigma = extract_x_syndrome(code, error)
    out = decode_x(code, sigma)
    if not out.heralded_failure:
        assert extract_x_syndrome(code, out.correction.members) == sigma
        residual = error ^ out.correction.members
        assert stabilizer_membership(code, residual, "x") is not Membership.OUTSIDE_NORMALIZER


@pytest.mark.parametrize("schedule", [("away",), ("-y", "-b", "-g", "-r")])
def test_alternative_schedules(code5, schedule):
    for t in range(code5.n_qubits):
        _assert_corrected(code5, [t], LiftConfig(sweep_schedule=schedule))


def test_outward_schedule_heralds_rather_than_lies(code5):
    cfg = LiftConfig(sweep_schedule=("+r", "+g", "+b", "+y"))
    rng = random.Random(21)
    for _ in range(30):
        error = rng.sample(range(code5.n_qubits), 4)
        sigma = extract_x_syndrome(code5, error)
        out = decode_x(code5, sigma, cfg)
        if not out.heralded_failure:
            assert extract_x_syndrome(code5, out.correction.members) == sigma
