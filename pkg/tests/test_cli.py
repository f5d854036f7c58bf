import json

import numpy as np
import pytest

import surfaug as sa
from surfaug.cli import main


@pytest.fixture()
def tetra_off(tmp_path, tetra):
    path = tmp_path / "tetra.off"
    sa.save_mesh(tetra, path)
    return path


@pytest.fixture()
def sim_csv(tmp_path):
    path = tmp_path / "sim.csv"
    code = main([
        "simulate", "--synthetic", "icosphere:2", "--group0", "14",
        "--group1", "8", "--sigma", "0.6", "--seed", "5",
        "--out", str(path),
    ])
    assert code == 0
    return path


class TestLaplacian:
    def test_tetrahedron_summary(self, tetra_off, tmp_path, capsys):
        out = tmp_path / "lap"
        assert main(["laplacian", "--mesh", str(tetra_off), "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["vertices"] == 4
        assert summary["triangles"] == 4
        assert summary["lambda_max"] == pytest.approx(16 / 3, rel=1e-6)
        assert "lambda_max" in capsys.readouterr().out

    def test_missing_file_exit_2_names_path(self, tmp_path, capsys):
        code = main(["laplacian", "--mesh", str(tmp_path / "ghost.off"),
                     "--out", str(tmp_path / "x")])
        assert code == 2
        assert "ghost.off" in capsys.readouterr().err

    def test_deterministic_outputs(self, tetra_off, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["laplacian", "--mesh", str(tetra_off), "--out", str(out1)])
        main(["laplacian", "--mesh", str(tetra_off), "--out", str(out2)])
        for name in ("stiffness.txt", "areas.csv", "summary.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


class TestSimulate:
    def test_seed_required(self, tmp_path, capsys):
        code = main(["simulate", "--synthetic", "icosphere:2",
                     "--out", str(tmp_path / "s.csv")])
        assert code == 2
        assert "--seed" in capsys.readouterr().err

    def test_output_loads(self, sim_csv):
        signals = sa.load_signals(sim_csv)
        assert signals.num_observations == 22
        assert signals.num_vertices == 162


class TestAugment:
    def test_lb_eigda_full_basis_mean_report(self, tetra_off, tmp_path, sim_csv):
        out = tmp_path / "aug.bin"
        code = main([
            "augment", "--synthetic", "icosphere:2", "--input", str(sim_csv),
            "--method", "lb-eigda", "--seed", "3", "--out", str(out),
        ])
        assert code == 0
        report = json.loads((tmp_path / "aug.bin.report.json").read_text())
        assert max(report["max_mean_deviation"].values()) < 1e-8
        assert report["num_eigs"] == 162

    def test_cpda_dyadic_reports_109_bands(self, tmp_path, sim_csv):
        out = tmp_path / "aug.bin"
        code = main([
            "augment", "--synthetic", "icosphere:2", "--input", str(sim_csv),
            "--method", "c-pda", "--design", "dyadic", "--levels", "5",
            "--order", "100", "--seed", "3", "--out", str(out),
        ])
        assert code == 0
        report = json.loads((tmp_path / "aug.bin.report.json").read_text())
        assert report["num_bands"] == 109
        assert max(report["max_mean_deviation"].values()) < 1e-8

    def test_same_config_and_seed_byte_identical(self, tmp_path, sim_csv):
        outs = []
        for name in ("one.bin", "two.bin"):
            out = tmp_path / name
            code = main([
                "augment", "--synthetic", "icosphere:2", "--input", str(sim_csv),
                "--method", "lb-eigda", "--num-eigs", "40", "--seed", "9",
                "--out", str(out),
            ])
            assert code == 0
            outs.append(out)
        assert outs[0].read_bytes() == outs[1].read_bytes()
        # sidecars too (labels + provenance)
        assert (tmp_path / "one.bin.json").read_bytes() == \
            (tmp_path / "two.bin.json").read_bytes()

    def test_counts_flag(self, tmp_path, sim_csv):
        out = tmp_path / "aug.bin"
        code = main([
            "augment", "--synthetic", "icosphere:2", "--input", str(sim_csv),
            "--method", "lb-eigda", "--num-eigs", "20", "--seed", "1",
            "--counts", "0=28,1=8", "--out", str(out),
        ])
        assert code == 0
        result = sa.load_signals(out)
        assert (result.labels == 0).sum() == 28
        assert (result.labels == 1).sum() == 8

    def test_config_file_overrides_flags(self, tmp_path, sim_csv):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"seed": 77, "num_eigs": 25}))
        out = tmp_path / "aug.bin"
        code = main([
            "augment", "--synthetic", "icosphere:2", "--input", str(sim_csv),
            "--method", "lb-eigda", "--num-eigs", "10", "--seed", "1",
            "--config", str(config), "--out", str(out),
        ])
        assert code == 0
        report = json.loads((tmp_path / "aug.bin.report.json").read_text())
        assert report["seed"] == 77
        assert report["num_eigs"] == 25

    def test_mismatched_bank_is_computation_failure(self, tmp_path, sim_csv,
                                                    capsys):
        bank_path = tmp_path / "bank.json"
        assert main(["bank", "--lambda-max", "999.0", "--design", "uniform",
                     "--band-width", "100.0", "--order", "50",
                     "--out", str(bank_path)]) == 0
        code = main([
            "augment", "--synthetic", "icosphere:2", "--input", str(sim_csv),
            "--method", "c-pda", "--bank", str(bank_path), "--seed", "2",
            "--out", str(tmp_path / "aug.bin"),
        ])
        assert code == 1
        assert "lambda_max" in capsys.readouterr().err


class TestBankEigens:
    def test_bank_roundtrip(self, tmp_path):
        path = tmp_path / "bank.json"
        assert main(["bank", "--lambda-max", "10.9", "--design", "dyadic",
                     "--levels", "5", "--order", "64", "--out", str(path)]) == 0
        bank = sa.load_bank(path)
        assert bank.num_bands == 109

    def test_eigens_roundtrip(self, tetra_off, tmp_path):
        path = tmp_path / "basis.bin"
        assert main(["eigens", "--mesh", str(tetra_off), "--num-eigs", "4",
                     "--out", str(path)]) == 0
        basis = sa.load_basis(path)
        assert np.allclose(basis.eigenvalues, [0, 16 / 3, 16 / 3, 16 / 3],
                           atol=1e-9)

    def test_bank_needs_design_parameters(self, tmp_path, capsys):
        code = main(["bank", "--lambda-max", "2.0", "--design", "uniform",
                     "--out", str(tmp_path / "b.json")])
        assert code == 2
        assert "band-width" in capsys.readouterr().err


class TestStats:
    def test_copy_of_real_matches_correlations(self, tmp_path, sim_csv):
        out = tmp_path / "stats"
        code = main(["stats", "--real", str(sim_csv), "--augmented",
                     str(sim_csv), "--out", str(out)])
        assert code == 0
        rows = (tmp_path / "stats_correlations.csv").read_text().splitlines()[1:]
        by_set = {"real": [], "augmented": []}
        for row in rows:
            name, _, value = row.split(",")
            by_set[name].append(value)
        assert by_set["real"] == by_set["augmented"]
        summary = json.loads((tmp_path / "stats_summary.json").read_text())
        assert summary["max_mean_deviation"] == 0.0

    def test_constant_signals_report_null(self, tmp_path, capsys):
        const = sa.SignalSet(data=np.ones((3, 8)), labels=np.zeros(3, dtype=int))
        path = tmp_path / "const.csv"
        sa.save_signals(const, path)
        out = tmp_path / "stats"
        code = main(["stats", "--real", str(path), "--augmented", str(path),
                     "--out", str(out)])
        assert code == 0
        assert "null" in (tmp_path / "stats_correlations.csv").read_text()
        assert "warning" in capsys.readouterr().err

    def test_sorted_means_descending(self, tmp_path, sim_csv):
        out = tmp_path / "stats"
        main(["stats", "--real", str(sim_csv), "--augmented", str(sim_csv),
              "--out", str(out)])
        rows = (tmp_path / "stats_sorted_means.csv").read_text().splitlines()[1:]
        means = [float(r.split(",")[1]) for r in rows]
        assert means == sorted(means, reverse=True)


class TestBench:
    def test_zero_order_rejected(self, tmp_path, capsys):
        code = main(["bench", "--synthetic", "tetrahedron", "--orders", "0",
                     "--out", str(tmp_path / "b.csv")])
        assert code == 2
        assert "--orders" in capsys.readouterr().err

    def test_small_run_writes_csv(self, tmp_path):
        out = tmp_path / "bench.csv"
        code = main(["bench", "--synthetic", "icosphere:1", "--orders", "4,8",
                     "--num-eigs-list", "5", "--signals", "3", "--trials", "1",
                     "--out", str(out)])
        assert code == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "method,parameter,median_seconds"
        assert len(rows) == 4
