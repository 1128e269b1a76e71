import json
import os

from greenlinker.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestLink:
    def test_fig2_quarter(self, capsys):
        code, out = run_cli(capsys, "link", "--map", "example-0.3",
                            "--fiber", "0.99999", "--loop", "data/fig2.json")
        assert code == 0
        assert out["lk"] == {"num": 1, "den": 4}
        assert out["certificate"]["stabilization_checked"] is True
        assert out["jobspec"]["map"] == "example-0.3"
        assert out["engine_version"]

    def test_missing_fiber_is_validation_error(self, capsys):
        code, out = run_cli(capsys, "link", "--map", "example-0.3",
                            "--loop", "data/fig2.json")
        assert code == 2
        assert out["error"]["type"] == "validation"

    def test_straddling_loop_exit_code(self, capsys, tmp_path):
        loop = {"ambient": {"type": "fiber", "z": [0.99999, 0.0]},
                "segments": [{"type": "arc", "center": [0.43, 0.6],
                              "radius": 0.4, "from_angle": 0.0,
                              "to_angle": 6.283185307179586}]}
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(loop))
        code, out = run_cli(capsys, "link", "--map", "example-0.3",
                            "--fiber", "0.99999", "--loop", str(p))
        assert code == 3
        assert out["error"]["type"] == "undetermined"


class TestClassify:
    def test_quadratic_inside(self, capsys):
        code, out = run_cli(capsys, "classify", "--family", "quadratic", "--a", "0")
        assert code == 0
        assert out["classification"] == "ball-basins"

    def test_quadratic_outside(self, capsys):
        code, out = run_cli(capsys, "classify", "--family", "quadratic", "--a", "0.3")
        assert code == 0
        assert out["classification"] == "infinitely-generated-vertical-basin"

    def test_skew_connectivity(self, capsys):
        code, out = run_cli(capsys, "classify", "--map", "example-jonsson",
                            "--fiber", "-2", "--depth", "8")
        assert code == 0
        assert out["connectivity"]["verdict"] == "disconnected"


class TestGreen:
    def test_point_green(self, capsys):
        code, out = run_cli(capsys, "green", "--map", "example-0.3",
                            "--z", "0.99999", "--w", "3")
        assert code == 0
        assert out["green_fiber"]["value"] > 0
        assert out["green_affine"]["escaped"] is True


class TestSequenceCmd:
    def test_two_steps_with_seed(self, capsys):
        code, out = run_cli(capsys, "sequence", "--map", "example-0.3",
                            "--fiber", "0.99999", "--loop", "data/fig2.json",
                            "--steps", "2")
        assert code == 0
        seq = out["sequence"]
        assert len(seq) == 3
        assert [s["lk"] for s in seq] == [{"num": 1, "den": 4},
                                          {"num": 1, "den": 8},
                                          {"num": 1, "den": 16}]
        assert "infinitely generated" in out["certifies"]


class TestLift:
    def test_lift_quarter(self, capsys):
        code, out = run_cli(capsys, "lift", "--map", "example-0.3",
                            "--fiber", "0.99999", "--preimage", "-0.9999949999875",
                            "--loop", "data/fig2.json")
        assert code == 0
        assert sorted(out["bundle"]["degrees"]) == [1, 1]


class TestRenderCmd:
    def test_fiber_render(self, capsys, tmp_path):
        img = tmp_path / "fig.ppm"
        code, out = run_cli(capsys, "render", "--map", "example-0.3",
                            "--fiber", "0.99999", "--grid", "200",
                            "--depth", "15", "--image", str(img))
        assert code == 0
        assert os.path.exists(out["image"])
        assert os.path.exists(out["sidecar"])

    def test_parameter_render(self, capsys, tmp_path):
        img = tmp_path / "m.ppm"
        code, out = run_cli(capsys, "render", "--mode", "parameter",
                            "--grid", "64", "--image", str(img))
        assert code == 0
        assert os.path.exists(out["image"])


class TestOracleCmd:
    def test_fiber_oracle_snaps(self, capsys):
        code, out = run_cli(capsys, "oracle", "--map", "example-0.3",
                            "--fiber", "0.99999", "--loop", "data/fig2.json",
                            "--count", "20000", "--seed", "5")
        assert code == 0
        assert abs(out["enclosed_mass"]["estimate"] - 0.25) < 0.02
        assert out["snap_to_dyadic"] == {"num": 1, "den": 4}

    def test_determinism(self, capsys):
        _, out1 = run_cli(capsys, "oracle", "--map", "example-0.3",
                          "--fiber", "0.99999", "--loop", "data/fig2.json",
                          "--count", "5000", "--seed", "5")
        _, out2 = run_cli(capsys, "oracle", "--map", "example-0.3",
                          "--fiber", "0.99999", "--loop", "data/fig2.json",
                          "--count", "5000", "--seed", "5")
        assert out1["enclosed_mass"] == out2["enclosed_mass"]


class TestSeparateCmd:
    def test_planar_separate(self, capsys):
        code, out = run_cli(capsys, "separate", "--map", "example-cantor-pi",
                            "--at-infinity", "--level", "0.7",
                            "--half-extent", "5", "--grid", "200")
        assert code == 0
        values = [lp["lk"] for lp in out["loops"]]
        assert {"num": 1, "den": 2} in values


def test_unknown_map(capsys):
    code, out = run_cli(capsys, "green", "--map", "nope", "--z", "0")
    assert code == 2
    assert "unknown map" in out["error"]["message"]
