import json

import numpy as np
import pytest

from conftest import make_mnar_instance
from ordmnar import __version__
from ordmnar.cli import _config_hash, main
from ordmnar.datasets import PGA_COVARIATES, PGA_LEVELS, PGA_RESPONSE, pga_synthetic_path
from ordmnar.simlab import ScenarioConfig, default_workers, preset


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture(scope="module")
def pga_fit_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("pga_fit")
    rc = run_cli(
        "fit", "--input", str(pga_synthetic_path()),
        "--response", PGA_RESPONSE,
        "--covariates", ",".join(PGA_COVARIATES),
        "--levels", ",".join(PGA_LEVELS),
        "--out", str(out),
    )
    assert rc == 0
    return out


def small_config(**overrides):
    cfg = preset("t2", n=80, replications=4)
    return cfg.with_overrides(**overrides) if overrides else cfg


def write_config(tmp_path, cfg):
    path = tmp_path / f"{cfg.name}.json"
    path.write_text(cfg.to_json())
    return path


class TestFit:
    def test_em_fit_on_bundled_dataset(self, pga_fit_dir, capsys):
        report = json.loads((pga_fit_dir / "fit.json").read_text())
        assert report["method"] == "em"
        assert report["converged"] is True
        assert report["n"] == 960
        assert report["n_categories"] == 5
        rows = {r["term"]: r for r in report["outcome"]}
        # efficacious doses must show up as odds ratios above 1
        assert rows["DOSE_5MG"]["odds_ratio"] > 1.0
        assert rows["DOSE_10MG"]["odds_ratio"] > rows["DOSE_5MG"]["odds_ratio"]
        miss_terms = [r["term"] for r in report["missingness"]]
        assert miss_terms[0] == "const" and miss_terms[-1] == "response"

    def test_text_and_json_carry_the_same_numbers(self, pga_fit_dir):
        report = json.loads((pga_fit_dir / "fit.json").read_text())
        text = (pga_fit_dir / "fit.txt").read_text()
        for row in report["outcome"] + report["missingness"]:
            assert f"{row['estimate']:9.4f}" in text
            assert f"{row['se']:9.4f}" in text
        assert f"loglik: {report['loglik']:.6f}" in text

    def test_or_directions_are_reciprocal(self, tmp_path):
        outs = {}
        for direction in ("lower", "upper"):
            out = tmp_path / direction
            rc = run_cli(
                "fit", "--input", str(pga_synthetic_path()),
                "--response", PGA_RESPONSE,
                "--covariates", ",".join(PGA_COVARIATES),
                "--method", "cc", "--or-direction", direction,
                "--out", str(out),
            )
            assert rc == 0
            outs[direction] = json.loads((out / "fit.json").read_text())
        for lo, up in zip(outs["lower"]["outcome"], outs["upper"]["outcome"]):
            assert lo["estimate"] == up["estimate"]
            if lo["odds_ratio"] is not None:
                assert abs(lo["odds_ratio"] * up["odds_ratio"] - 1.0) < 1e-12
                # the upper CI endpoint of one direction mirrors the lower
                assert abs(lo["or_low"] * up["or_high"] - 1.0) < 1e-12

    def test_missing_input_file(self, tmp_path, capsys):
        rc = run_cli("fit", "--input", str(tmp_path / "nope.csv"),
                     "--response", "y", "--covariates", "x")
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_unknown_response_column_named(self, tmp_path, capsys):
        path = tmp_path / "d.csv"
        path.write_text("y,x\n1,0.5\n2,0.1\n")
        rc = run_cli("fit", "--input", str(path),
                     "--response", "OUTCOME", "--covariates", "x")
        assert rc == 2
        assert "OUTCOME" in capsys.readouterr().err

    def test_estimation_failure_exits_one(self, tmp_path, capsys):
        # a tiny drifting dataset where the EM outer loop exhausts its budget
        ds, _ = make_mnar_instance(0, n=15)
        lines = ["y,x"]
        for i in range(ds.n_subjects):
            y = "" if ds.missing[i] else str(int(ds.y[i]))
            lines.append(f"{y},{float(ds.x[i, 0])!r}")
        path = tmp_path / "drift.csv"
        path.write_text("\n".join(lines) + "\n")
        rc = run_cli("fit", "--input", str(path), "--response", "y",
                     "--covariates", "x", "--levels", "1,2,3")
        assert rc == 1
        assert "did not converge" in capsys.readouterr().err

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli("--version")
        assert exc.value.code == 0
        assert __version__ in capsys.readouterr().out


class TestSimulate:
    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, small_config())
        for d in ("a", "b"):
            assert run_cli("simulate", "--config", str(cfg),
                           "--out", str(tmp_path / d)) == 0
        for name in ("metrics.csv", "relbias.csv", "missparams.csv"):
            assert (tmp_path / "a" / name).read_bytes() == \
                (tmp_path / "b" / name).read_bytes()

    def test_worker_count_does_not_change_results(self, tmp_path):
        cfg = write_config(tmp_path, small_config())
        assert run_cli("simulate", "--config", str(cfg), "--out",
                       str(tmp_path / "serial"), "--workers", "1") == 0
        assert run_cli("simulate", "--config", str(cfg), "--out",
                       str(tmp_path / "pool"), "--workers", "2") == 0
        assert (tmp_path / "serial" / "metrics.csv").read_bytes() == \
            (tmp_path / "pool" / "metrics.csv").read_bytes()
        serial = json.loads((tmp_path / "serial" / "manifest.json").read_text())
        pool = json.loads((tmp_path / "pool" / "manifest.json").read_text())
        assert (serial["workers"], pool["workers"]) == (1, 2)
        assert serial["config_sha256"] == pool["config_sha256"]

    def test_manifest_contents(self, tmp_path):
        config = small_config()
        cfg = write_config(tmp_path, config)
        out = tmp_path / "out"
        assert run_cli("simulate", "--config", str(cfg), "--out", str(out)) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["schema_version"] == 1
        assert manifest["config_sha256"] == _config_hash(config)
        assert set(manifest["failures"]) == set(config.estimators)
        assert 0.0 <= manifest["missing_fraction"] <= 1.0
        for name in manifest["outputs"].values():
            assert (out / name).exists()

    def test_seed_override_recorded(self, tmp_path):
        cfg = write_config(tmp_path, small_config(replications=1))
        out = tmp_path / "out"
        assert run_cli("simulate", "--config", str(cfg), "--out", str(out),
                       "--seed", "7") == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["base_seed"] == 7

    def test_env_default_workers(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ORDMNAR_WORKERS", "2")
        cfg = write_config(tmp_path, small_config(replications=2))
        out = tmp_path / "out"
        assert run_cli("simulate", "--config", str(cfg), "--out", str(out)) == 0
        assert json.loads((out / "manifest.json").read_text())["workers"] == 2
        monkeypatch.setenv("ORDMNAR_WORKERS", "bogus")
        assert default_workers() == 1

    def test_bad_config_rejected(self, tmp_path, capsys):
        d = small_config().to_dict()
        d["typo"] = 1
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(d))
        rc = run_cli("simulate", "--config", str(path), "--out", str(tmp_path / "o"))
        assert rc == 2
        assert "bad config" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        rc = run_cli("simulate", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "o"))
        assert rc == 2


class TestReplicate:
    def test_unknown_table_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli("replicate", "--table", "t9")
        assert exc.value.code == 2
        err = capsys.readouterr().err
        for name in ("t2", "t3", "t4", "supp5"):
            assert name in err

    def test_unpublished_size_rejected(self, capsys):
        rc = run_cli("replicate", "--table", "t2", "--sizes", "77")
        assert rc == 2
        err = capsys.readouterr().err
        assert "available" in err and "1000" in err

    def test_non_integer_sizes_rejected(self, capsys):
        rc = run_cli("replicate", "--table", "t2", "--sizes", "abc")
        assert rc == 2

    def test_small_run_renders_comparison(self, tmp_path, capsys):
        rc = run_cli("replicate", "--table", "t2", "--sizes", "60",
                     "--reps", "2", "--out", str(tmp_path))
        assert rc == 0
        out = capsys.readouterr().out
        assert "t2  n=60" in out
        assert "published" in out
        assert "rendering tolerance" in out
        assert (tmp_path / "t2_n60" / "metrics.csv").exists()
        assert (tmp_path / "t2_n60" / "manifest.json").exists()


class TestConfigHash:
    def test_hash_tracks_content_not_field_order(self):
        a = small_config()
        b = ScenarioConfig.from_dict(json.loads(a.to_json()))
        assert _config_hash(a) == _config_hash(b)
        assert _config_hash(a) != _config_hash(a.with_overrides(base_seed=1))
        assert len(_config_hash(a)) == 64


def test_np_not_leaked_into_json(pga_fit_dir):
    # every value in fit.json round-trips through the stdlib json module
    text = (pga_fit_dir / "fit.json").read_text()
    again = json.dumps(json.loads(text))
    assert isinstance(again, str)
    assert not isinstance(json.loads(text)["loglik"], np.floating)
