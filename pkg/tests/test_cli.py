import json
from pathlib import Path

import numpy as np
import pytest

from dispersim.cli import main
from dispersim.config import load_config, parse_config_text, read_csv
from dispersim.errors import ConfigError

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def write(tmp_path: Path, name: str, text: str) -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestConfigParsing:
    def test_sections_and_flat_keys(self):
        text = "a = 1\n# comment\n[kernel]\nb = 2\n\n[other]\nc = 3\n"
        sections = parse_config_text(text)
        assert sections[""] == {"a": "1"}
        assert sections["kernel"] == {"b": "2"}

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("a = 1\na = 2\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("a = 1\nbroken line\n")
        assert "line 2" in str(err.value)

    def test_time_grid_log(self, tmp_path):
        cfg = load_config(write(tmp_path, "c.cfg", "t_min = 1\nt_max = 100\nt_count = 3\nt_spacing = log\n"))
        assert np.allclose(cfg.get_time_grid(), [1, 10, 100])

    def test_time_grid_values(self, tmp_path):
        cfg = load_config(write(tmp_path, "c.cfg", "t_values = 1 2 5\n"))
        assert np.allclose(cfg.get_time_grid(), [1, 2, 5])

    def test_time_grid_must_increase(self, tmp_path):
        cfg = load_config(write(tmp_path, "c.cfg", "t_values = 5 2\n"))
        with pytest.raises(ConfigError):
            cfg.get_time_grid()


class TestKernelCommand:
    def test_trivial_row(self, tmp_path):
        cfg = write(tmp_path, "k.cfg", "t_values = 0\nj_values = 0\n")
        assert main(["kernel", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "kernel.csv").read_text().splitlines()
        assert lines[0].startswith("# schema: dispersim.kernel.v1")
        assert lines[1] == "t,j,re,im"
        assert lines[2] == "0,0,1,0"

    def test_quadrature_method(self, tmp_path):
        cfg = write(tmp_path, "k.cfg", "t_values = 1\nj_values = 0 3\nmethod = quadrature\ntol = 1e-10\n")
        assert main(["kernel", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        _, _, cols, rows = read_csv(tmp_path / "kernel.csv")
        assert cols == ["t", "j", "re", "im"]
        assert len(rows) == 2


class TestDeterminism:
    def test_repeated_runs_byte_identical(self, tmp_path):
        cfg = write(tmp_path, "a.cfg", "p = 6\nt_min = 10\nt_max = 100\nt_count = 10\nt_spacing = log\n")
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert main(["alphap", "--config", str(cfg), "--out", str(out1)]) == 0
        assert main(["alphap", "--config", str(cfg), "--out", str(out2), "--threads", "3"]) == 0
        assert (out1 / "alphap.csv").read_bytes() == (out2 / "alphap.csv").read_bytes()


class TestManifest:
    def test_config_roundtrip(self, tmp_path):
        cfg_path = write(tmp_path, "k.cfg", "t_values = 0 1\nj_values = 0 2\nmethod = bessel\n")
        assert main(["kernel", "--config", str(cfg_path), "--out", str(tmp_path)]) == 0
        manifest = tmp_path / "kernel.manifest.txt"
        sections = parse_config_text(manifest.read_text())
        original = load_config(cfg_path, section="kernel")
        assert sections["config"] == original.data
        assert sections["run"]["tool"] == "dispersim"
        assert "duration_seconds" in sections["run"]

    def test_effective_section_merge(self, tmp_path):
        cfg_path = write(tmp_path, "k.cfg", "j_values = 0\n[kernel]\nt_values = 0\n")
        assert main(["kernel", "--config", str(cfg_path), "--out", str(tmp_path)]) == 0
        sections = parse_config_text((tmp_path / "kernel.manifest.txt").read_text())
        assert sections["config"] == {"j_values": "0", "t_values": "0"}


class TestExitCodes:
    def test_missing_key_is_config_error(self, tmp_path, capsys):
        cfg = write(tmp_path, "bad.cfg", "t_values = 0\n")
        code = main(["kernel", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 2
        record = json.loads(capsys.readouterr().err.strip())
        assert record["exit_code"] == 2
        assert "j_values" in record["message"]

    def test_missing_config_file(self, tmp_path):
        assert main(["kernel", "--config", str(tmp_path / "nope.cfg")]) == 2

    def test_resource_cap_is_three(self, tmp_path):
        cfg = write(tmp_path, "t.cfg",
                    "cutoff = 4000\noversample = 4096\nt_values = 0.001\n")
        assert main(["torus", "--config", str(cfg), "--out", str(tmp_path)]) == 3

    def test_invalid_value_is_config_error(self, tmp_path):
        cfg = write(tmp_path, "v.cfg", "grid_size = 10\n")
        assert main(["vdc", "--config", str(cfg), "--out", str(tmp_path)]) == 2


class TestOtherCommands:
    def test_vdc(self, tmp_path):
        cfg = write(tmp_path, "v.cfg", "grid_size = 100000\n")
        assert main(["vdc", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        _, _, _, rows = read_csv(tmp_path / "vdc.csv")
        assert float(rows[0][1]) == pytest.approx(2.0, abs=1e-4)

    def test_coupling_check_shipped_config(self, tmp_path):
        shipped = CONFIG_DIR / "coupling_kirchhoff_d3.cfg"
        assert main(["coupling-check", "--config", str(shipped), "--out", str(tmp_path)]) == 0
        _, _, cols, rows = read_csv(tmp_path / "coupling-check.csv")
        row = dict(zip(cols, rows[0]))
        assert row["valid"] == "true"
        assert row["diagnostic"] == "valid self-adjoint coupling"

    def test_coupling_check_matrix_counterexample(self, tmp_path):
        cfg = write(tmp_path, "c.cfg", "kind = matrix\na_matrix = 1 0; 0 1\nb_matrix = 0 1; 0 0\n")
        assert main(["coupling-check", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        _, _, cols, rows = read_csv(tmp_path / "coupling-check.csv")
        row = dict(zip(cols, rows[0]))
        assert row["valid"] == "false" and "product" in row["diagnostic"]

    def test_line_and_fit_pipeline(self, tmp_path):
        line_cfg = write(tmp_path, "l.cfg",
                         "datum = delta\nsite = 0\nt_min = 10\nt_max = 300\nt_count = 10\nt_spacing = log\n")
        assert main(["line", "--config", str(line_cfg), "--out", str(tmp_path)]) == 0
        fit_cfg = write(tmp_path, "f.cfg", f"csv_in = {tmp_path / 'line.csv'}\n")
        assert main(["fit", "--config", str(fit_cfg), "--out", str(tmp_path)]) == 0
        _, _, cols, rows = read_csv(tmp_path / "fit.csv")
        slope = float(rows[0][cols.index("slope")])
        assert -0.38 <= slope <= -0.28

    def test_oscint_small(self, tmp_path):
        cfg = write(tmp_path, "o.cfg",
                    "a_values = 0.5\ny_values = 0 1\nz_values = 0\nt_values = 1 10\ntol = 1e-9\n")
        assert main(["oscint", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        _, _, cols, rows = read_csv(tmp_path / "oscint.csv")
        assert len(rows) == 4
        sections = parse_config_text((tmp_path / "oscint.manifest.txt").read_text())
        assert any(k.startswith("scaled_max") for k in sections["run"])

    def test_torus_small(self, tmp_path):
        cfg = write(tmp_path, "t.cfg", "cutoff = 8\nt_values = 0.01 0.05 0.125\n")
        assert main(["torus", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        _, _, cols, rows = read_csv(tmp_path / "torus.csv")
        assert cols == ["t", "sup_norm", "scaled"]


class TestPlotScript:
    def _decay_csv(self, tmp_path):
        cfg = write(tmp_path, "l.cfg", "datum = delta\nt_min = 10\nt_max = 100\nt_count = 8\nt_spacing = log\n")
        assert main(["line", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        return tmp_path / "line.csv"

    def test_decay_script(self, tmp_path):
        csv_path = self._decay_csv(tmp_path)
        assert main(["plot-script", "--csv", str(csv_path)]) == 0
        script = csv_path.with_suffix(".plot.py").read_text()
        assert "loglog" in script and "slope" in script

    def test_kernel_script(self, tmp_path):
        cfg = write(tmp_path, "k.cfg", "t_values = 1\nj_values = 0 1 2\n")
        assert main(["kernel", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        assert main(["plot-script", "--csv", str(tmp_path / "kernel.csv")]) == 0
        assert "|K_t(j)|" in (tmp_path / "kernel.plot.py").read_text()

    def test_empty_csv_rejected(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("# schema: dispersim.decay.v1\nt,sup_norm\n")
        assert main(["plot-script", "--csv", str(empty)]) == 2
        assert not empty.with_suffix(".plot.py").exists()

    def test_unknown_schema_rejected(self, tmp_path):
        weird = tmp_path / "weird.csv"
        weird.write_text("# schema: someone.else.v9\na,b\n1,2\n")
        assert main(["plot-script", "--csv", str(weird)]) == 2

    def test_generated_script_runs(self, tmp_path):
        import subprocess
        import sys

        csv_path = self._decay_csv(tmp_path)
        main(["plot-script", "--csv", str(csv_path)])
        script = csv_path.with_suffix(".plot.py")
        proc = subprocess.run([sys.executable, str(script)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert script.with_suffix(".png").exists()
