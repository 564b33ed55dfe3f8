import json
import os

import numpy as np
import pytest
from numpy.testing import assert_allclose

from viscmin import cli, io, surface
from viscmin.errors import OutOfRange, ParseError, UnknownKey


def test_fmt_float_round_trip():
    rng = np.random.default_rng(0)
    for x in rng.normal(scale=1e3, size=200):
        assert float(io.fmt_float(x)) == x
    assert io.fmt_float(-0.0) == "0"
    assert io.fmt_float(0.125) == "0.125"


def test_dumps_json_deterministic():
    obj = {"b": 1.5, "a": [1, 2.25, True, None],
            "c": {"re": 0.1, "nested": [[1.0, 2.0], [3.0, 4.0]]},
            "z": np.array([0.5, 0.25]),
            "w": 1.0 + 2.0j}
    s1 = io.dumps_json(obj)
    s2 = io.dumps_json(obj)
    assert s1 == s2
    parsed = json.loads(s1)
    assert parsed["b"] == 1.5
    assert parsed["w"] == {"re": 1.0, "im": 2.0}
    assert list(parsed.keys()) == ["b", "a", "c", "z", "w"]  # insertion order


def test_read_json_parse_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ParseError):
        io.read_json(str(bad))


def test_write_csv_format(tmp_path):
    path = tmp_path / "t.csv"
    io.write_csv(str(path), ["a", "b"], [(1, 0.1), (2, 0.25)])
    lines = path.read_text().splitlines()
    assert lines[0] == "a,b"
    assert lines[1] == "1,0.10000000000000001"
    assert lines[2] == "2,0.25"


def test_immersion_checkpoint_bit_exact(tmp_path, clifford, equator):
    for im in (clifford, equator):
        path = str(tmp_path / "im.json")
        io.save_immersion(path, im)
        im2 = io.load_immersion(path)
        assert np.array_equal(im2.coeffs, im.coeffs)
        assert im2.topology == im.topology
        # a second round trip is a fixed point byte for byte
        path2 = str(tmp_path / "im2.json")
        io.save_immersion(path2, im2)
        assert open(path).read() == open(path2).read()


def test_variation_round_trip(tmp_path, clifford):
    w = surface.random_variation(clifford, seed=5, amplitude=0.02, band=2)
    path = str(tmp_path / "w.json")
    io.save_variation(path, w)
    w2 = io.load_variation(path, clifford)
    assert_allclose(w2.values, w.values, rtol=0, atol=1e-16)


def test_load_immersion_missing_keys(tmp_path):
    path = tmp_path / "trunc.json"
    path.write_text('{"topology": {"genus": 1}}')
    with pytest.raises(ParseError):
        io.load_immersion(str(path))


def test_validate_config_examples():
    cfg = cli.validate_config({"command": "energy", "input": "x.json",
                               "sigma": 0.1})
    assert cfg.command == "energy"
    assert cfg["sigma"] == 0.1
    assert cfg["resolution"] == 16  # default applied
    with pytest.raises(OutOfRange) as err:
        cli.validate_config({"command": "energy", "input": "x.json",
                             "sigma": -1})
    assert err.value.field == "sigma"
    with pytest.raises(UnknownKey):
        cli.validate_config({"command": "fly"})
    with pytest.raises(UnknownKey):
        cli.validate_config({"command": "energy", "input": "x.json",
                             "wings": 2})
    with pytest.raises(ParseError):
        cli.validate_config({"command": "energy"})  # input is required
    with pytest.raises(OutOfRange):
        cli.validate_config({"command": "gauge", "input": "a", "mode": "fly",
                             "variation": "b"})


def test_validate_config_threads_env(monkeypatch):
    monkeypatch.setenv("VISCMIN_THREADS", "3")
    cfg = cli.validate_config({"command": "energy", "input": "x.json"})
    assert cfg["threads"] == 3
    cfg = cli.validate_config({"command": "energy", "input": "x.json",
                               "threads": 2})
    assert cfg["threads"] == 2


def test_cli_energy_on_preset(tmp_path):
    out = str(tmp_path / "report.json")
    code = cli.main(["energy", "--input", "equator_s2_in_s3",
                     "--output", out])
    assert code == 0
    report = json.load(open(out))
    assert_allclose(report["area"], 4 * np.pi, rtol=1e-12)
    assert_allclose(report["f_energy"], 4 * np.pi, rtol=1e-12)


def test_cli_energy_deterministic(tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert cli.main(["energy", "--input", "clifford_torus",
                     "--output", a]) == 0
    assert cli.main(["energy", "--input", "clifford_torus",
                     "--output", b]) == 0
    assert open(a).read() == open(b).read()


def test_cli_geometry(tmp_path):
    out = str(tmp_path / "geom.json")
    assert cli.main(["geometry", "--input", "clifford_torus",
                     "--output", out]) == 0
    geom = json.load(open(out))
    assert geom["euler_characteristic"] == 0
    assert abs(geom["gauss_bonnet_defect"]) <= 1e-6


def test_cli_spectrum_summary(tmp_path, capsys):
    out = str(tmp_path / "eigs.csv")
    code = cli.main(["spectrum", "--input", "clifford_torus", "--sigma", "0",
                     "--basis-cutoff", "2", "--output", out])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["index"] == 5
    assert summary["nullity"] == 4
    assert summary["noncritical_flag"] is False
    lines = open(out).read().splitlines()
    assert lines[0] == "k,mu_k"
    assert len(lines) > 5


def test_cli_spectrum_thread_count_invariant(tmp_path):
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert cli.main(["spectrum", "--input", "equator_s2_in_s3",
                     "--basis-cutoff", "2", "--output", a]) == 0
    assert cli.main(["spectrum", "--input", "equator_s2_in_s3",
                     "--basis-cutoff", "2", "--output", b,
                     "--threads", "4"]) == 0
    assert open(a).read() == open(b).read()


def test_cli_gauge_modes(tmp_path, clifford):
    im_path = str(tmp_path / "im.json")
    w_path = str(tmp_path / "w.json")
    io.save_immersion(im_path, clifford)
    w = surface.random_variation(clifford, seed=3, amplitude=0.01, band=2,
                                 tangent=True)
    io.save_variation(w_path, w)
    out = str(tmp_path / "g.json")
    assert cli.main(["gauge", "--input", im_path, "--variation", w_path,
                     "--mode", "coulomb", "--output", out]) == 0
    assert "residual_sup" in json.load(open(out))
    assert cli.main(["gauge", "--input", im_path, "--variation", w_path,
                     "--mode", "decompose", "--output", out]) == 0
    dec = json.load(open(out))
    assert dec["residual"] <= 1e-10
    # retraction: target is a nearby immersion checkpoint
    tgt = surface.SampledImmersion.from_samples(
        clifford.ambient, clifford.topology, clifford.basis,
        clifford.samples() + 0.5 * w.values)
    tgt_path = str(tmp_path / "tgt.json")
    io.save_immersion(tgt_path, tgt)
    assert cli.main(["gauge", "--input", im_path, "--variation", tgt_path,
                     "--mode", "retract", "--output", out]) == 0
    ret = json.load(open(out))
    assert ret["residual"] <= 1e-7


def test_cli_variation_check(tmp_path):
    out = str(tmp_path / "vc.csv")
    assert cli.main(["variation-check", "--input", "perturbed_clifford",
                     "--seeds", "1", "--output", out]) == 0
    lines = open(out).read().splitlines()
    assert lines[0] == "formula,fd_value,analytic_value,rel_err"
    rels = [float(line.split(",")[3]) for line in lines[1:]]
    assert max(rels) <= 1e-5


def test_cli_transfer(tmp_path, clifford):
    im_path = str(tmp_path / "im.json")
    w_path = str(tmp_path / "w.json")
    io.save_immersion(im_path, clifford)
    w = surface.random_variation(clifford, seed=1, amplitude=0.05, band=1)
    io.save_variation(w_path, w)
    out = str(tmp_path / "x.json")
    assert cli.main(["transfer", "--input", im_path, "--variation", w_path,
                     "--delta", "0.001", "--centers", "1.5,2.5",
                     "--output", out]) == 0
    res = json.load(open(out))
    assert res["w12_error"] > 0


def test_cli_continue_empty_schedule(tmp_path):
    cfg_path = str(tmp_path / "run.json")
    out_dir = str(tmp_path / "out")
    with open(cfg_path, "w") as fh:
        json.dump({"start": "equator_s2_in_s3", "resolution": 8,
                   "sigma_schedule": []}, fh)
    assert cli.main(["continue", "--config", cfg_path,
                     "--output", out_dir]) == 0
    stages = open(os.path.join(out_dir, "stages.csv")).read().splitlines()
    assert stages == ["sigma,area,f,entropy_product,grad_norm,index,nullity"]


def test_cli_continue_short_run(tmp_path):
    cfg_path = str(tmp_path / "run.json")
    out_dir = str(tmp_path / "out")
    with open(cfg_path, "w") as fh:
        json.dump({"start": "equator_s2_in_s3", "resolution": 8,
                   "sigma_schedule": [0.5, 0.25], "spectrum_cutoff": 3}, fh)
    assert cli.main(["continue", "--config", cfg_path,
                     "--output", out_dir]) == 0
    verdict = json.load(open(os.path.join(out_dir, "verdict.json")))
    assert verdict["pass"] is True
    assert verdict["limit_spectrum"]["index"] == 1
    stage_path = os.path.join(out_dir, "stage_1.json")
    stage = json.load(open(stage_path))
    assert stage["sigma"] == 0.5
    assert stage["index"] == 1
    # stage files double as immersion checkpoints, directly and as --input
    im = io.load_immersion(stage_path)
    assert im.resolution == 8
    assert cli.main(["energy", "--input", stage_path]) == 0


def test_cli_error_exit_codes(tmp_path, capsys):
    # validation failure: exit 2 with structured JSON on stderr
    code = cli.main(["energy", "--input", "x.json", "--sigma", "-3"])
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "OutOfRange"
    assert err["field"] == "sigma"
    # runtime failure (missing file): exit 1
    code = cli.main(["energy", "--input", str(tmp_path / "missing.json")])
    assert code == 1
