import json
import math
from pathlib import Path

import pytest

from hgpol import cli
from hgpol.errors import ConfigError, NumericFailure, RealizabilityError
from hgpol.scenarios import (
    CSV_COLUMNS,
    SweepSpec,
    config_hash,
    config_to_dict,
    default_config,
    default_config_path,
    load_config,
    parse_config,
    reproduce_figure,
    run_sweep,
    write_csv,
)
from hgpol.turbulence import PathKind


def minimal_doc(**overrides):
    doc = json.loads(default_config_path().read_text())
    doc.update(overrides)
    return doc


def write_doc(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


class TestConfigLoading:
    def test_default_config_is_reference_parameter_set(self):
        cfg = default_config()
        assert cfg.beam.wavelength == pytest.approx(800e-9)
        assert cfg.beam.waist == pytest.approx(0.03)
        assert cfg.beam.order_x == 2 and cfg.beam.order_y == 2
        assert cfg.source.gamma_xx == 0.5 and cfg.source.gamma_yy == 0.5
        assert cfg.source.gamma_xy == 0.1
        assert cfg.source.sigma0_xx == pytest.approx(0.01)
        assert cfg.source.sigma0_xy == pytest.approx(0.02)
        assert cfg.profile.cn2_ground == 1e-14
        assert cfg.profile.wind_rms == 2.1
        assert cfg.profile.inner_scale == pytest.approx(0.01)
        assert cfg.zenith == pytest.approx(math.pi / 3)
        assert len(cfg.paths) == 4

    def test_round_trip(self):
        cfg = default_config()
        assert parse_config(config_to_dict(cfg)) == cfg

    def test_hash_stable_and_sensitive(self):
        cfg = default_config()
        assert config_hash(cfg) == config_hash(default_config())
        from dataclasses import replace

        other = replace(cfg, distance=cfg.distance * 2)
        assert config_hash(other) != config_hash(cfg)

    def test_realizability_validation(self, tmp_path):
        doc = minimal_doc()
        doc["source"]["gamma_xy_re"] = 0.9
        with pytest.raises(RealizabilityError):
            load_config(write_doc(tmp_path, doc))

    def test_json_error_carries_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"beam": }')
        with pytest.raises(ConfigError, match=r"broken\.json:1:"):
            load_config(path)

    def test_missing_key_named(self, tmp_path):
        doc = minimal_doc()
        del doc["beam"]["waist_cm"]
        with pytest.raises(ConfigError, match="beam.waist_cm"):
            load_config(write_doc(tmp_path, doc))

    def test_unknown_path_kind(self, tmp_path):
        doc = minimal_doc(paths=["free_space", "sideways"])
        with pytest.raises(ConfigError, match="sideways"):
            load_config(write_doc(tmp_path, doc))

    def test_sweep_validation(self):
        with pytest.raises(ConfigError, match="strictly increasing"):
            SweepSpec("distance", "m", (2.0, 1.0))
        with pytest.raises(ConfigError, match="unit"):
            SweepSpec("distance", "deg", (1.0, 2.0))
        with pytest.raises(ConfigError, match="variable"):
            SweepSpec("speed", "m", (1.0,))
        with pytest.raises(ConfigError):
            SweepSpec("zenith", "rad", (0.0, math.pi / 2))
        with pytest.raises(ConfigError):
            SweepSpec("order", "", (0.5,))

    def test_unit_scaling(self, tmp_path):
        doc = minimal_doc(
            sweep={"variable": "zenith", "unit": "deg", "grid": [10.0, 60.0]}
        )
        cfg = load_config(write_doc(tmp_path, doc))
        assert cfg.sweep.grid[1] == pytest.approx(math.pi / 3)


class TestRunSweep:
    def test_cardinality(self):
        cfg = default_config()
        rows = run_sweep(cfg)
        assert len(rows) == len(cfg.paths) * len(cfg.sweep.grid)

    def test_rows_echo_parameters(self):
        rows = run_sweep(default_config())
        chash = config_hash(default_config())
        for row in rows:
            assert row["config_hash"] == chash
            assert row["status"] == "ok"
            assert 0.0 <= row["P"] <= 1.0
            assert row["m"] == 2 and row["n"] == 2

    def test_deterministic_and_thread_invariant(self, tmp_path):
        cfg = default_config()
        serial = run_sweep(cfg)
        again = run_sweep(cfg)
        threaded = run_sweep(cfg, threads=4)
        assert serial == again == threaded
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(serial, p1)
        write_csv(threaded, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_csv_schema_and_formatting(self, tmp_path):
        rows = run_sweep(default_config())
        path = tmp_path / "sweep.csv"
        write_csv(rows, path)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        first = lines[1].split(",")
        assert len(first) == len(CSV_COLUMNS)
        # floats carry at most 9 significant digits
        p_value = first[CSV_COLUMNS.index("P")]
        mantissa = p_value.replace("-", "").replace(".", "").split("e")[0]
        assert len(mantissa.lstrip("0")) <= 9

    def test_point_failure_marks_row(self, monkeypatch):
        import hgpol.scenarios as scenarios

        real = scenarios.degree_of_polarization
        calls = {"n": 0}

        def flaky(matrix):
            calls["n"] += 1
            if calls["n"] == 3:
                raise NumericFailure("synthetic failure", estimate=1.0)
            return real(matrix)

        monkeypatch.setattr(scenarios, "degree_of_polarization", flaky)
        rows = run_sweep(default_config())
        statuses = [r["status"] for r in rows]
        assert statuses.count("error:NumericFailure") == 1
        assert statuses.count("ok") == len(rows) - 1
        bad = rows[statuses.index("error:NumericFailure")]
        assert bad["P"] is None

    def test_sigma0_sweep_preserves_ratio(self):
        from dataclasses import replace

        cfg = default_config()
        cfg = replace(
            cfg,
            paths=(PathKind.FREE_SPACE,),
            sweep=SweepSpec("sigma0", "mm", (0.001, 0.01)),
        )
        rows = run_sweep(cfg)
        assert rows[0]["sigma0xx_m"] == pytest.approx(0.001)
        assert rows[1]["sigma0xx_m"] == pytest.approx(0.01)

    def test_radial_profile_normalization(self):
        from dataclasses import replace

        cfg = default_config()
        grid = tuple(-0.05 + 0.005 * i for i in range(21))
        cfg = replace(
            cfg,
            paths=(PathKind.FREE_SPACE, PathKind.HORIZONTAL),
            sweep=SweepSpec("radial_profile", "m", grid),
        )
        rows = run_sweep(cfg)
        for kind in ("free_space", "horizontal"):
            curve = [r for r in rows if r["path_kind"] == kind]
            peaks = [r["I_norm"] for r in curve]
            assert max(peaks) == pytest.approx(1.0, abs=1e-12)
            assert all(0.0 <= v <= 1.0 for v in peaks)


class TestFigures:
    def test_fig3_cardinality(self, tmp_path):
        paths = reproduce_figure("fig3", out_dir=tmp_path)
        csv = next(p for p in paths if p.suffix == ".csv")
        lines = csv.read_text().splitlines()
        assert len(lines) - 1 == 4 * 11
        manifest = json.loads(
            next(p for p in paths if p.name.endswith("manifest.json")).read_text()
        )
        assert manifest["figure"] == "fig3"
        assert manifest["datasets"][0]["resolved"]["beam"]["order_x"] == 2

    def test_table1_matches_profile(self, tmp_path):
        from hgpol.turbulence import cn2_at_altitude

        paths = reproduce_figure("table1", out_dir=tmp_path)
        csv = next(p for p in paths if p.suffix == ".csv")
        lines = csv.read_text().splitlines()[1:]
        assert len(lines) == 7
        profile = default_config().profile
        for line in lines:
            h, cn2 = line.split(",")
            assert float(cn2) == pytest.approx(
                cn2_at_altitude(profile, float(h)), rel=1e-8
            )

    def test_fig5_has_interior_maxima_at_20km(self, tmp_path):
        paths = reproduce_figure("fig5", out_dir=tmp_path)
        csv = next(p for p in paths if p.suffix == ".csv")
        lines = csv.read_text().splitlines()
        header = lines[0].split(",")
        rows = [dict(zip(header, l.split(","))) for l in lines[1:]]
        for kind in ("slant_up", "slant_down"):
            curve = [
                (float(r["zenith_rad"]), float(r["P"]))
                for r in rows
                if r["figure"] == "fig5:z=20km" and r["path_kind"] == kind
            ]
            values = [p for _, p in curve]
            peak = max(values)
            assert values[0] < peak and values[-1] < peak

    def test_figure_outputs_are_deterministic(self, tmp_path):
        a = reproduce_figure("fig3", out_dir=tmp_path / "a")
        b = reproduce_figure("fig3", out_dir=tmp_path / "b", threads=4)
        csv_a = next(p for p in a if p.suffix == ".csv")
        csv_b = next(p for p in b if p.suffix == ".csv")
        assert csv_a.read_bytes() == csv_b.read_bytes()

    def test_svg_emitted_on_request(self, tmp_path):
        paths = reproduce_figure("fig3", out_dir=tmp_path, svg=True)
        svg = next(p for p in paths if p.suffix == ".svg")
        assert svg.exists() and svg.stat().st_size > 0


class TestCli:
    def test_validate_ok(self):
        assert cli.main(["validate", "--config", str(default_config_path())]) == 0

    def test_validate_bad_config(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert cli.main(["validate", "--config", str(path)]) == 2

    def test_run_writes_csv(self, tmp_path, capsys):
        doc = minimal_doc(
            sweep={"variable": "distance", "unit": "km", "grid": [1.0, 10.0]}
        )
        cfg_path = write_doc(tmp_path, doc)
        rc = cli.main(
            ["run", "--config", str(cfg_path), "--out", str(tmp_path / "out")]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "rows=8" in out
        assert (tmp_path / "out" / "sweep.csv").exists()

    def test_run_svg_format(self, tmp_path):
        doc = minimal_doc(
            paths=["free_space"],
            sweep={"variable": "distance", "unit": "km", "grid": [1.0, 5.0, 10.0]},
        )
        cfg_path = write_doc(tmp_path, doc)
        rc = cli.main(
            [
                "run", "--config", str(cfg_path),
                "--out", str(tmp_path / "out"), "--format", "csv+svg",
            ]
        )
        assert rc == 0
        assert (tmp_path / "out" / "sweep.svg").exists()

    def test_figure_command(self, tmp_path):
        rc = cli.main(["figure", "table1", "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "table1.csv").exists()

    def test_output_dir_env_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HGPOL_OUTPUT_DIR", str(tmp_path / "envout"))
        rc = cli.main(["figure", "table1"])
        assert rc == 0
        assert (tmp_path / "envout" / "table1.csv").exists()
