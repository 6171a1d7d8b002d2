import json

import pytest

from annpair.cli import main


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_out")
    code = main(["construct", "--n-range", "2..3", "--out", str(out)])
    assert code == 0
    return out


class TestConstruct:
    def test_outputs_exist(self, workdir):
        for name in ("family.json", "support_set.json", "cell_union.json",
                     "instance_n2.json", "instance_n3.json"):
            assert (workdir / name).exists()

    def test_digest_embedded(self, workdir):
        data = json.loads((workdir / "family.json").read_text())
        assert len(data["_config_digest"]) == 16

    def test_deterministic_bytes(self, workdir, tmp_path):
        again = tmp_path / "again"
        assert main(["construct", "--n-range", "2..3", "--out", str(again)]) == 0
        assert (again / "family.json").read_bytes() == (workdir / "family.json").read_bytes()


class TestVerify:
    def test_passes_on_fresh_family(self, workdir):
        assert main(["verify", "--n-range", "2..3", "--out", str(workdir)]) == 0
        assert (workdir / "concentration.csv").exists()
        assert (workdir / "density_profile.csv").exists()
        report = json.loads((workdir / "verify_report.json").read_text())
        assert all(c["passed"] for c in report["checks"])

    def test_csv_carries_digest(self, workdir):
        first = (workdir / "concentration.csv").read_text().splitlines()[0]
        assert first.startswith("# config ")

    def test_fails_on_tampered_family(self, workdir, tmp_path):
        data = json.loads((workdir / "family.json").read_text())
        data["levels"][0]["report"]["ratio"] = 1e-9  # breaks the decreasing trend
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(data))
        code = main(["verify", "--out", str(tmp_path / "v"), "--family", str(bad)])
        assert code == 1


class TestBmAudit:
    def test_runs_and_emits_certificates(self, workdir):
        code = main([
            "bm-audit", "--out", str(workdir), "--alpha-samples", "20",
            "--j-max", "14", "--lambda-count", "2", "--seed", "7",
        ])
        assert code == 0
        lines = (workdir / "block_certificates.csv").read_text().splitlines()
        assert len(lines) == 2 + 20 * 15  # digest + header + alphas * blocks
        ident = (workdir / "averaged_identity.csv").read_text().splitlines()
        assert len(ident) >= 3
        for row in ident[2:]:
            assert float(row.split(",")[3]) <= 1e-12

    def test_seeded_runs_identical(self, workdir, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            code = main([
                "bm-audit", "--out", str(out), "--family", str(workdir / "family.json"),
                "--alpha-samples", "10", "--j-max", "12", "--lambda-count", "1",
            ])
            assert code == 0
        assert (a / "block_certificates.csv").read_bytes() == (
            b / "block_certificates.csv"
        ).read_bytes()


class TestExport:
    def test_tables_written(self, workdir):
        assert main(["export", "--out", str(workdir), "--table-stride", "64"]) == 0
        assert (workdir / "kernel_coeffs_n2.csv").exists()
        assert (workdir / "kernel_coeffs_n3.csv").exists()
        assert (workdir / "bump_table.csv").exists()
        assert (workdir / "sets_export.json").exists()


class TestConfigErrors:
    def test_bad_range(self, tmp_path):
        assert main(["construct", "--n-range", "oops", "--out", str(tmp_path)]) == 2

    def test_bad_sigma(self, tmp_path):
        assert main(["bm-audit", "--sigma", "2.0", "--out", str(tmp_path)]) == 2

    def test_missing_family(self, tmp_path):
        assert main(["verify", "--out", str(tmp_path)]) == 2
