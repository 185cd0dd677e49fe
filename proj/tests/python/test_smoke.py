import os

import numpy as np
import pytest

import msturm

FIXTURES = os.environ.get("MSTURM_FIXTURE_DIR", "")


def test_inertia_of_lorentz_form():
    i = msturm.inertia(np.diag([1.0, -1.0, 0.0]))
    assert (i.n_plus, i.n_minus, i.n_zero) == (1, 1, 1)


def test_focal_instants_of_parabola_germ():
    rows = msturm.scan_focal(msturm.fixtures.excausal())
    assert len(rows) == 1
    assert rows[0]["t"] == pytest.approx(1.0, abs=1e-8)
    assert rows[0]["signature"] == -1
    assert not rows[0]["degenerate"]


def test_harmonic_conjugate_instants():
    ts = [r["t"] for r in msturm.scan_focal(msturm.fixtures.harmonic(2.5))]
    assert ts == pytest.approx([0.4, 0.8], abs=1e-8)


def test_verify_flat_example():
    rep = msturm.verify(msturm.fixtures.exsimple())
    assert rep["n_minus_K"] == 1
    assert rep["residual"] == 0
    assert rep["stabilized"]


def test_maslov_interior_and_endpoint():
    assert msturm.maslov(msturm.fixtures.excausal_interior()) == -1
    with pytest.raises(msturm.EndpointFocal):
        msturm.maslov(msturm.fixtures.excausal())


def test_json_round_trip(tmp_path):
    p = msturm.fixtures.null_focal_3d()
    path = tmp_path / "p.msp.json"
    p.save(str(path))
    assert msturm.load(str(path)) == p
    assert msturm.Problem.from_json(p.to_json()) == p


@pytest.mark.skipif(not FIXTURES, reason="fixture directory not set")
def test_load_fixture_file():
    p = msturm.load(os.path.join(FIXTURES, "excausal.msp.json"))
    assert p.n == 2
    assert np.allclose(p.S, [[1.0]])


def test_index_evolution_is_constant_without_focal_instants():
    counts = msturm.index_evolution(msturm.fixtures.exsimple(), [0.1, 0.5, 1.0], mesh=32)
    assert counts == [1, 1, 1]


def test_trivialized_conformal_geodesic():
    p = msturm.trivialize("conformal_exp_t2", T=np.pi)
    rows = msturm.scan_focal(p)
    assert len(rows) == 1
    assert rows[0]["t"] == pytest.approx(1.0, abs=1e-4)


def test_bad_document_raises():
    with pytest.raises(msturm.ParseError):
        msturm.Problem.from_json("{")
    with pytest.raises(msturm.MsturmError):
        msturm.load("/nonexistent.msp.json")
