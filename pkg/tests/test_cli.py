import json
import math

import numpy as np
import pytest

from warpgap.cli import main


def run(args):
    return main(args)


class TestProfileCommand:
    def test_writes_csv_and_metadata(self, tmp_path):
        rc = run(["profile", "--T", "10", "--out", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "profile.csv").read_text().splitlines()
        assert lines[0] == "t,j,jp,jpp,psi,in_B"
        meta = json.loads((tmp_path / "profile_meta.json").read_text())
        assert meta["n"] == 2
        assert meta["epsilon"] == 0.1
        assert meta["two_plus"] == pytest.approx(2.1)
        assert meta["t0"] == pytest.approx(2.2 ** (1.0 / 2.1))
        assert meta["patches"][0]["m"] == 1
        assert all(p["t_m"] <= 10.0 for p in meta["patches"])

    def test_n3_metadata(self, tmp_path):
        rc = run(["profile", "--n", "3", "--T", "5", "--out", str(tmp_path)])
        assert rc == 0
        meta = json.loads((tmp_path / "profile_meta.json").read_text())
        assert meta["two_plus"] == pytest.approx(2.15)

    def test_invalid_epsilon_exits_2(self, tmp_path, capsys):
        rc = run(["profile", "--epsilon", "-0.3", "--out", str(tmp_path)])
        assert rc == 2
        assert "epsilon" in capsys.readouterr().err

    def test_malformed_config_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("this is not a key value line\n")
        rc = run(["profile", "--config", str(cfg), "--out", str(tmp_path)])
        assert rc == 2


class TestConfigFile:
    def test_config_plus_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# headline run\n"
            "n = 2\n"
            "epsilon = 0.2\n"
            "T = 4,8\n"
            "h = 0.01\n"
        )
        out = tmp_path / "o"
        rc = run(["profile", "--config", str(cfg), "--epsilon", "0.1", "--out", str(out)])
        assert rc == 0
        meta = json.loads((out / "profile_meta.json").read_text())
        assert meta["epsilon"] == 0.1  # flag beats file
        assert meta["two_plus"] == pytest.approx(2.1)


class TestAuditCommand:
    def test_default_passes(self, tmp_path):
        rc = run(["audit", "--T", "200", "--m-max", "20000", "--out", str(tmp_path),
                  "--seed", "3"])
        assert rc == 0
        doc = json.loads((tmp_path / "audit.json").read_text())
        assert doc["pass"] is True
        names = {it["check"] for it in doc["items"]}
        assert "frak_J_finite" in names
        assert "rearrangement_min_margin" in names  # n = 2 surface suite

    def test_flat_reports_no_gap_with_exit_zero(self, tmp_path):
        rc = run(["audit", "--flat", "--out", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "audit.json").read_text())
        assert doc["pass"] is False
        assert doc["no_gap"] is True
        assert doc["flat_control"] is True


class TestCertificateCommand:
    def test_small_run(self, tmp_path):
        rc = run(["certificate", "--T", "5,10", "--h", "0.002", "--out", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "certificate.json").read_text())
        assert set(doc) == {"n", "epsilon", "J", "lower_bound", "volume", "rows", "pass"}
        assert doc["pass"] is True
        assert doc["lower_bound"] > 0
        assert len(doc["rows"]) == 2
        assert doc["rows"][0]["T"] == 5.0

    def test_flat_control(self, tmp_path):
        rc = run(["certificate", "--flat", "--T", "5", "--h", "0.01",
                  "--out", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "certificate.json").read_text())
        assert doc["pass"] is False
        assert doc["J"] is None
        assert doc["lower_bound"] == 0.0


class TestOtherCommands:
    def test_minimize(self, tmp_path):
        rc = run(["minimize", "--T", "5", "--h", "0.005", "--functional", "h22",
                  "--out", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "minimize.json").read_text())
        assert doc["functional"] == "h22"
        assert doc["value"] > 0
        csv = (tmp_path / "minimizer_h22_T5.csv").read_text().splitlines()
        assert csv[0] == "t,phi"

    def test_curvature_report(self, tmp_path):
        rc = run(["curvature", "--T", "50", "--out", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "curvature_report.json").read_text())
        assert doc["max_abs_K_rad"] > 1e3
        assert doc["growth_gauge_exceeded"] is True
        assert doc["ricci_below_minus_gauge_sq"] is True
        assert doc["first_exceedance_t"] >= math.e
        header = (tmp_path / "curvature.csv").read_text().splitlines()[0]
        assert header == "t,K_rad,K_tan,Ric_rr"

    def test_series_value(self, tmp_path):
        rc = run(["series", "--p", "2", "--out", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "series.json").read_text())
        lp = next(it for it in doc["items"] if it["norm"] == "lp")
        assert math.exp(lp["closed_form_log_or_null"]) == pytest.approx(
            math.e / (math.e - 1.0)
        )
        hess = next(it for it in doc["items"] if it["norm"] == "hessian_lp")
        assert hess["classification"] == "divergent"

    def test_export_bundle(self, tmp_path):
        rc = run(["export", "--T", "5", "--h", "0.01", "--out", str(tmp_path)])
        assert rc == 0
        for name in ("profile.csv", "curvature.csv", "minimize.json"):
            assert (tmp_path / name).exists()


class TestDeterminism:
    def test_audit_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            rc = run(["audit", "--T", "50", "--m-max", "2000", "--seed", "7",
                      "--out", str(out)])
            assert rc == 0
        assert (out1 / "audit.json").read_bytes() == (out2 / "audit.json").read_bytes()

    def test_certificate_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            rc = run(["certificate", "--T", "5", "--h", "0.01", "--out", str(out)])
            assert rc == 0
        assert (out1 / "certificate.json").read_bytes() == (out2 / "certificate.json").read_bytes()
