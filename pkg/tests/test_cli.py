import csv
import json
import math
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from bouquet.cli import main
from bouquet.config import ConfigError, RunConfig, parse_config


def schema(name):
    return json.loads(resources.files("bouquet").joinpath(f"schemas/{name}.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestPotential:
    def test_constant_one(self, capsys):
        code, out, _ = run(capsys, "potential", "(1)^inf")
        rec = json.loads(out)
        jsonschema.validate(rec, schema("potential"))
        assert code == 0
        assert rec["t_star"][0] == pytest.approx(math.log1p(2 * math.pi), rel=1e-15)
        assert rec["class"] == "slow" and rec["t_star_tag"] == "certified"

    def test_zero(self, capsys):
        rec = json.loads(run(capsys, "potential", "[0]", "--tol", "1e-6")[1])
        assert rec["t_min"][0] == 0.0 and rec["t_min"][1] <= 1e-6

    def test_fast(self, capsys):
        code, out, _ = run(capsys, "potential", "gen:iterexp:1")
        rec = json.loads(out)
        jsonschema.validate(rec, schema("potential"))
        assert code == 0 and rec["class"] == "fast"
        assert rec["t_star"][1] is None and rec["t_star_tag"] == "truncation_bounded"
        assert rec["t_min_error"].startswith("NotExponentiallyBounded")

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "potential", "(1 2")
        assert code == 1 and "position 4" in err


class TestItineraryCommands:
    def test_itinerary(self, capsys):
        assert run(capsys, "itinerary", "(1)^inf", "(2)^inf", "4")[:2] == (0, "1 1 1 1\n")

    def test_itinerary_json(self, capsys):
        code, out, _ = run(capsys, "itinerary", "[1]", "[2]", "3", "--json")
        rec = json.loads(out)
        jsonschema.validate(rec, schema("itinerary"))
        assert rec == {"entries": [1, 1, 1], "star_terminated": False, "requested_length": 3}

    def test_hits_partition(self, capsys):
        assert run(capsys, "itinerary", "(0)^inf", "(0)^inf", "1")[0] == 2

    def test_kneading(self, capsys):
        assert run(capsys, "kneading", "(1)^inf", "4")[:2] == (0, "*\n")
        assert run(capsys, "kneading", "1 1/2 inf", "4", "--convention", "prefixed")[1] == "0 -1 *\n"
        rec = json.loads(run(capsys, "kneading", "[1 2]", "4", "--json")[1])
        jsonschema.validate(rec, schema("itinerary"))
        assert rec["star_terminated"]

    def test_infinity_partition(self, capsys):
        assert run(capsys, "kneading", "inf", "3")[0] == 1


class TestNwt:
    def test_small(self, capsys):
        code, out, _ = run(capsys, "nwt-search", "--entries", "1", "--period", "2", "--horizon", "8")
        rec = json.loads(out)
        jsonschema.validate(rec, schema("nwt"))
        assert code == 0 and rec["tested"] == 84 and rec["survivors"] == []

    def test_budget(self, capsys):
        code, out, _ = run(capsys, "nwt-search", "--entries", "1", "--period", "2", "--horizon", "8", "--budget", "5")
        assert code == 1 and json.loads(out)["budget_exceeded"]


class TestRay:
    def test_csv_and_svg(self, capsys, tmp_path):
        out_csv, out_svg = tmp_path / "out.csv", tmp_path / "out.svg"
        code, _, _ = run(capsys, "ray", "-a=-2", "(0)^inf", "--t", "5:15:11", "--csv", str(out_csv), "--svg", str(out_svg))
        assert code == 0
        rows = list(csv.DictReader(out_csv.open()))
        assert len(rows) == 11 and list(rows[0]) == ["addr", "t", "re", "im", "residual", "depth"]
        assert all(float(r["residual"]) <= 1e-6 for r in rows)
        assert out_svg.read_text().lstrip().startswith("<?xml")

    def test_complex_parameter(self, capsys):
        code, out, _ = run(capsys, "ray", "-a", "1+1i", "[1]", "--t", "10")
        assert code == 0 and len(out.splitlines()) == 2

    def test_low_potential_rejected(self, capsys):
        code, out, err = run(capsys, "ray", "-a=-2", "(1)^inf", "--t", "1:10:4")
        assert code == 2 and "NotCertified" in err
        # t = 1 and t = 4 lie below Q = 5; t = 7 and t = 10 are written
        assert len(out.splitlines()) == 1 + 2

    def test_byte_identical(self, capsys):
        first = run(capsys, "ray", "-a=-3", "[1 -1]", "[2]", "--t", "8:20:5")[1]
        assert first == run(capsys, "ray", "-a=-3", "[1 -1]", "[2]", "--t", "8:20:5")[1]


class TestVerify:
    def test_lemma_bracket(self, capsys, tmp_path):
        report = tmp_path / "r.json"
        code, out, err = run(capsys, "verify", "lemma-bracket", "--seed", "7", "--out", str(report))
        rec = json.loads(out)
        jsonschema.validate(rec, schema("verify"))
        assert code == 0 and rec["passed"] and "PASS lemma-bracket" in err
        assert json.loads(report.read_text()) == rec
        assert "seconds" not in rec["suites"][0]

    def test_nwt_flags(self, capsys):
        code, out, _ = run(capsys, "verify", "nwt", "--entries", "1", "--period", "2", "--horizon", "8")
        rec = json.loads(out)
        suite = rec["suites"][0]
        assert code == 0 and suite["violations"] == 0
        assert suite["metrics"]["runs"][0]["tested"] == 84

    def test_deterministic(self, capsys):
        a = run(capsys, "verify", "unlinked-itineraries", "--seed", "3")[1]
        b = run(capsys, "verify", "unlinked-itineraries", "--seed", "3")[1]
        assert a == b


class TestConfig:
    def test_file_overrides(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# tighter\ntol = 1e-4\n")
        rec = json.loads(run(capsys, "--config", str(cfg), "potential", "[0]")[1])
        assert rec["tol"] == 1e-4
        rec = json.loads(run(capsys, "--config", str(cfg), "potential", "[0]", "--tol", "1e-7")[1])
        assert rec["tol"] == 1e-7

    def test_parse(self):
        assert parse_config("[bouquet]\nseed = 11\nQ = 3\n") == RunConfig(seed=11, Q=3.0)

    @pytest.mark.parametrize("text", ["colour = red\n", "tol = -1\n", "depth = many\n"])
    def test_invalid(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_bad_file_exit_code(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("tol = 0\n")
        assert run(capsys, "--config", str(cfg), "potential", "[0]")[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bouquet", "itinerary", "[1]", "[2]", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1 1\n"
