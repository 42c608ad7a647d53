import math

import numpy as np
import pytest

import starmd


def test_version():
    assert starmd.__version__ == "0.1.0"


def test_norms_and_geometry():
    x = np.array([3.0, -4.0])
    assert starmd.norm(2.0, x) == pytest.approx(5.0)
    g = starmd.Geometry(1.5)
    assert g.q == 2.0
    assert g.mu == pytest.approx(0.5)
    y = np.array([0.5, 1.0])
    assert g.bregman(x, x) == pytest.approx(0.0, abs=1e-14)
    assert g.bregman(x, y) > 0.0


def test_schedule():
    s = starmd.schedule_general(2.0, 1.5, 1.0, 1.0, 1.0, 1.0, 1)
    assert s.alpha_t == pytest.approx(math.sqrt(1.25))
    assert s.clamped
    assert s.eps_t * s.eta_t == pytest.approx(s.B_t)
    with pytest.raises(ValueError):
        starmd.schedule_smooth(1.0, 1.0, 1.0, 2.0, 1)


def test_run_smooth_quadratic():
    out = starmd.run({"problem": "quad", "dim": 20, "mode": "smooth", "T": 512})
    gap = np.asarray(out["trace"]["gap"])
    assert len(gap) == 512
    assert gap[-1] < gap[0]
    assert out["summary"]["telescoping_ok"]
    fit = starmd.fit_rate(out["trace"]["t"], list(gap))
    assert fit["slope"] < -1.5


def test_unknown_config_key():
    with pytest.raises(ValueError):
        starmd.run({"iterations": 3})


def test_adversary():
    game = starmd.adversary(N=5)
    assert game["verdict"]["pass"]
    assert game["N"] == 5


def test_acceptance_subset():
    res = starmd.acceptance(T=1024, only=[1, 2, 9])
    assert [c["id"] for c in res["criteria"]] == [1, 2, 9]
    assert res["pass"]
