import json
import math
import re
import subprocess
import sys

import numpy as np
import pytest

from lemlab import cli
from lemlab.theorems import Report


def run_cli(*args, **kw):
    return subprocess.run(
        [sys.executable, "-m", "lemlab.cli", *args],
        capture_output=True,
        text=True,
        **kw,
    )


@pytest.fixture
def disc_file(tmp_path):
    p = tmp_path / "disc.yaml"
    p.write_text("type: disc\ncenter: 0+0i\nradius: 2.0\n")
    return str(p)


@pytest.fixture
def bern_file(tmp_path):
    p = tmp_path / "bern.yaml"
    p.write_text("type: sublevel\npoly: -1+0i,0+0i,1+0i\nx: 1.0\n")
    return str(p)


@pytest.fixture
def cond_file(tmp_path):
    p = tmp_path / "cond.yaml"
    p.write_text(
        "E: {type: disc, center: 0+0i, radius: 2.718281828459045}\n"
        "B: {type: disc, center: 0+0i, radius: 1.0}\n"
    )
    return str(p)


class TestArea:
    def test_disc_exact(self, disc_file):
        r = run_cli("area", disc_file)
        assert r.returncode == 0
        assert "value=12.566370614359172" in r.stdout
        assert "err=0.0" in r.stdout
        assert "method=exact" in r.stdout

    def test_bernoulli_mc(self, bern_file):
        r = run_cli("area", bern_file, "--samples", "200000", "--seed", "3")
        assert r.returncode == 0
        fields = dict(line.split("=", 1) for line in r.stdout.strip().splitlines())
        assert abs(float(fields["value"]) - 2.0) <= float(fields["err"])

    def test_malformed_file_names_field(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("type: disc\ncenter: 0+0i\n")
        r = run_cli("area", str(bad))
        assert r.returncode == 2
        assert "radius" in r.stderr

    def test_missing_file(self):
        r = run_cli("area", "/nonexistent/region.yaml")
        assert r.returncode == 2

    def test_budget_too_small(self, bern_file):
        r = run_cli("area", bern_file, "--method", "mc", "--samples", "10240",
                    "--rel-err", "1e-5")
        assert r.returncode == 3

    def test_json_output(self, disc_file):
        r = run_cli("area", disc_file, "--json")
        doc = json.loads(r.stdout)
        assert doc["value"] == pytest.approx(4 * math.pi)
        assert doc["method"] == "exact"


class TestCapacityCommands:
    def test_capacity_disc(self, disc_file):
        r = run_cli("capacity", disc_file)
        assert r.returncode == 0
        assert "value=2.0" in r.stdout and "method=closed_form" in r.stdout

    def test_condenser(self, cond_file, tmp_path):
        dump = tmp_path / "grid.csv"
        r = run_cli("condenser", cond_file, "--grid-h", "0.04", "--dump-grid", str(dump))
        assert r.returncode == 0
        fields = dict(line.split("=", 1) for line in r.stdout.strip().splitlines())
        assert abs(float(fields["value"]) - 0.5) < 0.03
        grid = np.loadtxt(str(dump), delimiter=",")
        assert grid.ndim == 2 and grid.max() == 1.0 and grid.min() == 0.0


class TestVerify:
    def test_polya_equality_exit_zero(self):
        r = run_cli("verify", "polya", "--poly", "0+0i,0+0i,1+0i", "--disc", "0+0i,1",
                    "--samples", "200000")
        assert r.returncode == 0
        assert "verdict=EQUALITY" in r.stdout

    def test_integrated_carleman_holds(self):
        r = run_cli("verify", "integrated_carleman", "--poly", "-1+0i,0+0i,1+0i", "--x", "1")
        assert r.returncode == 0
        assert "verdict=HOLDS" in r.stdout

    def test_carleman_eccentric_holds(self, tmp_path):
        cond = tmp_path / "ecc.yaml"
        cond.write_text(
            "E: {type: disc, center: 0+0i, radius: 2.718281828459045}\n"
            "B: {type: disc, center: 0.5+0i, radius: 1.0}\n"
        )
        r = run_cli("verify", "carleman", "--condenser", str(cond), "--grid-h", "0.04")
        assert r.returncode == 0
        fields = dict(
            chunk.split("=", 1) for chunk in r.stdout.strip().split()
        )
        assert fields["verdict"] == "HOLDS"
        assert float(fields["margin"]) > 0

    def test_inconclusive_exit_four(self):
        # z^2 over a barely off-center disc: margin 4 pi c^2 is far below the
        # budget at this sample count, and the equality flag is off
        r = run_cli("verify", "multiplicity", "--poly", "0+0i,0+0i,1+0i",
                    "--disc", "0.02+0i,1", "--samples", "50000")
        assert r.returncode == 4
        assert "verdict=INCONCLUSIVE" in r.stdout

    def test_missing_inputs_exit_two(self):
        r = run_cli("verify", "polya", "--poly", "0+0i,0+0i,1+0i")
        assert r.returncode == 2

    def test_unknown_statement_exit_two(self):
        r = run_cli("verify", "grandmas_lemma", "--poly", "0+0i,1+0i")
        assert r.returncode == 2

    def test_violated_exit_five(self, monkeypatch):
        fake = Report("polya", 5.0, 1.0, 0.0, 0.0, -4.0, "VIOLATED", 0, "deadbeef")
        monkeypatch.setattr(cli.th, "verify_polya", lambda *a, **k: fake)
        code = cli.main(["verify", "polya", "--poly", "0+0i,0+0i,1+0i", "--disc", "0+0i,1"])
        assert code == 5

    def test_json_verify(self):
        r = run_cli("verify", "polya", "--poly", "0+0i,0+0i,1+0i", "--disc", "0+0i,1",
                    "--samples", "102400", "--json")
        doc = json.loads(r.stdout)
        assert doc["verdict"] == "EQUALITY"
        assert set(doc) >= {"statement_id", "lhs", "rhs", "margin", "seed", "inputs_digest"}


class TestSweep:
    def _config(self, tmp_path, cases=10, seed=7):
        out = tmp_path / "sweep_out.txt"
        cfg = tmp_path / "sweep.yaml"
        cfg.write_text(
            "seed: %d\ncases: %d\ndegree_max: 3\nmc_samples: 20000\ngrid_h: 0.06\n"
            "output_path: %s\n" % (seed, cases, out)
        )
        return str(cfg), str(out)

    def test_deterministic_and_clean(self, tmp_path):
        cfg, out = self._config(tmp_path)
        r1 = run_cli("sweep", cfg)
        assert r1.returncode == 0
        first = open(out).read()
        r2 = run_cli("sweep", cfg)
        second = open(out).read()
        assert first == second
        assert r1.stdout == r2.stdout
        assert "violated=0" in r1.stdout

    def test_statement_filter(self, tmp_path):
        out = tmp_path / "out.txt"
        cfg = tmp_path / "two.yaml"
        cfg.write_text(
            "seed: 42\ncases: 20\nmc_samples: 20000\n"
            "statements: [main, multiplicity]\noutput_path: %s\n" % out
        )
        r = run_cli("sweep", str(cfg))
        assert r.returncode == 0
        body = open(out).read()
        assert "violated=0" in r.stdout
        assert "statement_id=polya" not in body
        assert body.count("statement_id=main") == 10
        assert body.count("statement_id=multiplicity") == 10

    def test_zero_cases_exit_two(self, tmp_path):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("seed: 1\ncases: 0\n")
        r = run_cli("sweep", str(cfg))
        assert r.returncode == 2

    def test_bad_statement_exit_two(self, tmp_path):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("seed: 1\ncases: 2\nstatements: [nonsense]\n")
        r = run_cli("sweep", str(cfg))
        assert r.returncode == 2


def _svg_points(path):
    text = open(path).read()
    pts = []
    for d in re.findall(r'd="M ([^"]+?)( Z)?"', text):
        for pair in d[0].split(" L "):
            x, y = pair.split()
            pts.append(complex(float(x), -float(y)))
    return text, np.array(pts)


class TestLemniscateSvg:
    def test_bernoulli_two_lobes(self, tmp_path):
        out = tmp_path / "b.svg"
        r = run_cli("lemniscate-svg", "--poly", "-1+0i,0+0i,1+0i", "1.0", str(out))
        assert r.returncode == 0
        text, pts = _svg_points(out)
        assert text.count("<path") == 2
        # the curve is the Bernoulli lemniscate |z^2 - 1| = 1
        assert np.max(np.abs(np.abs(pts**2 - 1) - 1)) < 0.02
        assert pts.real.max() > 1.3 and pts.real.min() < -1.3

    def test_identity_circle(self, tmp_path):
        out = tmp_path / "c.svg"
        r = run_cli("lemniscate-svg", "--poly", "0+0i,1+0i", "1.0", str(out))
        assert r.returncode == 0
        _, pts = _svg_points(out)
        assert np.allclose(np.abs(pts), 1.0, atol=0.02)

    def test_cubic_circle_radius_two(self, tmp_path):
        out = tmp_path / "z3.svg"
        r = run_cli("lemniscate-svg", "--poly", "0+0i,0+0i,0+0i,1+0i", "2.0", str(out),
                    "--resolution", "256")
        assert r.returncode == 0
        text, pts = _svg_points(out)
        assert text.count("<path") == 1
        assert np.allclose(np.abs(pts), 2.0, atol=0.05)

    def test_bad_radius_exit_two(self, tmp_path):
        r = run_cli("lemniscate-svg", "--poly", "0+0i,1+0i", "-1.0", str(tmp_path / "x.svg"))
        assert r.returncode == 2

    def test_constant_poly_exit_two(self, tmp_path):
        r = run_cli("lemniscate-svg", "--poly", "5+0i", "1.0", str(tmp_path / "x.svg"))
        assert r.returncode == 2
