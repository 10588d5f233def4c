import numpy as np
import pytest

from bandbraid import braidtrace, circuit, pipeline
from bandbraid.errors import ProjectionDegenerate
from bandbraid.twister import KnotClass, TwisterSpec

from conftest import EXACT, POINT_HOPF_2B, POINT_SOLOMON


def test_hopf_run_summary(hopf_run):
    assert len(hopf_run.records) == 600
    assert str(hopf_run.braid_word) == "s1 s1"
    assert hopf_run.knot_class is KnotClass.HOPF_LINK
    assert hopf_run.winding_2band == pytest.approx(1.0, abs=0.005)
    assert str(hopf_run.alexander) == "1-s"
    assert str(hopf_run.jones) == "-s^(1/2)-s^(5/2)"


def test_solomon_run_summary(solomon_run):
    assert len(solomon_run.records) == 4800
    assert str(solomon_run.braid_word) == "s1 s3 s2 s1 s3 s2"
    assert solomon_run.knot_class is KnotClass.SOLOMON_KNOT
    assert str(solomon_run.jones) == "-s^(3/2)-s^(7/2)+s^(9/2)-s^(11/2)"
    assert solomon_run.writhe == 6


def test_spectrum_route_matches_protocol_route(hopf_run):
    res = pipeline.run_simulation(TwisterSpec.concrete(2, *POINT_HOPF_2B),
                                  source="spectrum")
    assert str(res.braid_word) == str(hopf_run.braid_word)
    assert res.knot_class is hopf_run.knot_class
    assert res.winding_2band == pytest.approx(hopf_run.winding_2band, abs=1e-3)


def test_protocol_route_refuses_degenerate_point():
    with pytest.raises(ProjectionDegenerate):
        pipeline.run_simulation(TwisterSpec.concrete(4, 1.5, -1.0), cfg=EXACT,
                                k_points=10)


def test_classify_by_winding_fig5_points():
    cases = [(-1.0, -1.5, KnotClass.HOPF_LINK), (-0.7, -1.5, KnotClass.UNKNOT),
             (-1.4, -0.25, KnotClass.UNKNOT_PLUS_UNLINK)]
    for m0, m1, cls in cases:
        got = pipeline.classify_by_winding(TwisterSpec.concrete(4, m0, m1), k_points=300)
        assert got is cls, (m0, m1)


def test_free_reduce_option():
    res = pipeline.run_simulation(TwisterSpec.concrete(2, 1.273, 0.6),
                                  source="spectrum", free_reduce=True)
    assert str(res.braid_word) == "s1"


def test_sampled_mode_recovers_hopf():
    cfg = circuit.ShotConfig(shots=40000, seed=11, mode="sampled")
    res = pipeline.run_simulation(TwisterSpec.concrete(2, *POINT_HOPF_2B), cfg=cfg)
    assert str(res.braid_word) == "s1 s1"
    assert res.winding_2band == pytest.approx(1.0, abs=0.02)


def test_workers_match_sequential():
    cfg = circuit.ShotConfig(shots=2000, seed=5, mode="sampled")
    spec = TwisterSpec.concrete(2, *POINT_HOPF_2B)
    a = pipeline.run_simulation(spec, k_points=12, cfg=cfg, workers=1)
    b = pipeline.run_simulation(spec, k_points=12, cfg=cfg, workers=2)
    assert [r.counts for r in a.records] == [r.counts for r in b.records]
    assert str(a.braid_word) == str(b.braid_word)


def test_sampled_four_band_solomon_recovery():
    """Sampled-mode extraction at Solomon's knot: the braid word (possibly
    noise-reordered among commuting generators) closes to the same link,
    and classification is stable. Seed 1 exercises the synthesized seam
    crossing (noise leaves the trace short of its end level)."""
    from bandbraid import knots
    want = knots.JONES_TABLE[KnotClass.SOLOMON_KNOT]
    for seed in (0, 1, 4):
        cfg = circuit.ShotConfig(shots=40000, seed=seed, mode="sampled")
        res = pipeline.run_simulation(TwisterSpec.concrete(4, *POINT_SOLOMON), cfg=cfg)
        assert res.braid_word is not None, seed
        assert knots.jones(braidtrace.free_reduce(res.braid_word)) == want, seed
        assert res.knot_class is KnotClass.SOLOMON_KNOT
