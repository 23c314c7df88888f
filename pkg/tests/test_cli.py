import json
import os
import subprocess
import sys

import numpy as np
import pytest

from frametop.cli import main


def run_cli(args, tmp_path=None):
    """Run in-process, capturing stdout."""
    import io
    from contextlib import redirect_stdout
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(args)
    return code, buf.getvalue()


class TestCheck:
    def test_center(self):
        code, out = run_cli(["check", "--d", "1/2,1/2,1/2,1/2", "--k", "2"])
        assert code == 0
        report = json.loads(out)
        assert report["hypersimplex"] and report["hypothesis"]
        assert report["verdict"]["status"] == "ProvenAdmissible"
        assert report["km_criterion"] is False

    def test_vertex_disconnected(self):
        code, out = run_cli(["check", "--d", "1,1,0,0", "--k", "2"])
        assert code == 0
        assert json.loads(out)["verdict"]["status"] == "ProvenDisconnected"

    def test_fraction_parsing_exact(self):
        code, out = run_cli(["check", "--d", "1/3,1/3,1/3,1/3,1/3,1/3",
                             "--k", "2"])
        assert code == 0
        assert json.loads(out)["hypothesis"] is True

    def test_malformed_vector(self):
        code, _ = run_cli(["check", "--d", "1/2,oops", "--k", "2"])
        assert code == 2


class TestBuild:
    def test_residuals(self):
        code, out = run_cli(["build", "--d", "0.4,0.3,0.3,0.4,0.3,0.3",
                             "--k", "2"])
        assert code == 0
        report = json.loads(out)
        assert report["frame_residual"] <= 1e-10
        assert report["norm_residual"] <= 1e-10
        assert report["rotations"] <= 5

    def test_domain_error(self):
        code, _ = run_cli(["build", "--d", "0.9,0.9,0.9", "--k", "2"])
        assert code == 1


class TestCertifyVerify:
    def test_round_trip_separate_process(self, tmp_path):
        cert_file = tmp_path / "cert.json"
        proc = subprocess.run(
            [sys.executable, "-m", "frametop.cli", "certify",
             "--equal-norm", "5", "2", "--out", str(cert_file)],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        proc = subprocess.run(
            [sys.executable, "-m", "frametop.cli", "verify", str(cert_file)],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        report = json.loads(proc.stdout)
        assert report["passed"]
        assert report["max_frame_residual"] <= 1e-8
        # the report path renders a figure next to the output
        assert (tmp_path / "cert.png").exists()

    def test_certify_d_flag(self, tmp_path):
        code, out = run_cli(["certify", "--d", "0.4,0.3,0.3,0.4,0.3,0.3",
                             "--k", "2"])
        assert code == 0
        blob = json.loads(out)
        assert blob["report"]["passed"]
        D = np.asarray(blob["D"])
        assert np.linalg.det(D) == pytest.approx(-1.0, abs=1e-10)

    def test_byte_determinism(self):
        a = run_cli(["certify", "--equal-norm", "4", "2"])[1]
        b = run_cli(["certify", "--equal-norm", "4", "2"])[1]
        assert a == b

    def test_missing_certificate_file(self):
        code, _ = run_cli(["verify", "/nonexistent/cert.json"])
        assert code == 2


class TestStrata:
    def test_witness_row(self):
        code, out = run_cli(["strata", "--d", "1,1/3,1/3,1/3", "--k", "2"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("sigma,")
        witness = [ln for ln in lines[1:]
                   if ln.endswith(",1") and ",1," in ln and "0.1666" in ln]
        assert witness


class TestPolygon:
    def test_report(self, tmp_path):
        out_file = tmp_path / "poly.json"
        code, _ = run_cli(["polygon", "--d", "1/3,1/3,1/3,1/3,1/3,1/3",
                           "--k", "2", "--out", str(out_file)])
        assert code == 0
        report = json.loads(out_file.read_text())
        assert report["closure_residual"] <= 1e-12
        assert report["km_disconnected"] is False
        assert (tmp_path / "poly.png").exists()


class TestFiberAndReduce:
    def test_fiber_vertex(self):
        code, out = run_cli(["fiber", "--d", "1,1,0,0", "--k", "2",
                             "--samples", "20"])
        assert code == 0
        report = json.loads(out)
        assert report["count"] == 1 and report["exact_count"] == 1
        assert max(report["residuals"]) <= 1e-8

    def test_reduce(self):
        code, out = run_cli(["reduce", "--n", "11", "--k", "3"])
        assert code == 0
        assert out.strip() == "(11,3) (5,2)"
