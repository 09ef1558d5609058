"""Scenario configuration, parameter sweeps and the bundled preset datasets.

A scenario is a JSON document with unit-suffixed keys (wavelength_nm,
waist_cm, distance_km, ...), normalized to SI on load.  Sweeps evaluate the
on-axis (or radial-cut) degree of polarization for every configured path
kind over one swept variable and emit deterministic CSV rows; the bundled
presets fig1..fig5 and table1 regenerate the package's reference datasets.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    DegenerateMatrixError,
    DivergentIntegralError,
    IntegrandDefinitionError,
    NumericFailure,
    RealizabilityError,
    UnsupportedOrderError,
)
from .polarization import (
    PolarizationSource,
    coherence_matrix_from_inverse_rho2,
    degree_of_polarization,
)
from .propagation import BeamParams, Observation
from .turbulence import (
    PathKind,
    PathSpec,
    TurbulenceProfile,
    cn2_at_altitude,
    effective_inverse_rho2,
)

PACKAGE_VERSION = "0.1.0"

SWEEP_UNIT_SCALE = {
    "distance": {"m": 1.0, "km": 1.0e3},
    "order": {"": 1.0},
    "sigma0": {"mm": 1.0e-3, "cm": 1.0e-2, "m": 1.0},
    "zenith": {"deg": math.pi / 180.0, "rad": 1.0},
    "radial_profile": {"mm": 1.0e-3, "cm": 1.0e-2, "m": 1.0},
}

CSV_COLUMNS = [
    "figure", "path_kind", "z_m", "zenith_rad", "m", "n", "sigma0xx_m",
    "rho_x_m", "rho_y_m", "P", "I_norm", "inv_rho2_m2", "status",
    "config_hash",
]

FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4", "fig5", "table1")

TABLE1_ALTITUDES_M = (0.0, 100.0, 200.0, 256.0, 300.0, 800.0, 1485.0)

OUTPUT_DIR_ENV = "HGPOL_OUTPUT_DIR"

_ROW_ERRORS = (
    NumericFailure,
    IntegrandDefinitionError,
    DegenerateMatrixError,
    RealizabilityError,
    DivergentIntegralError,
    UnsupportedOrderError,
    ValueError,
)


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable with its grid, stored in SI units."""

    variable: str
    unit: str
    grid: tuple[float, ...]

    def __post_init__(self):
        if self.variable not in SWEEP_UNIT_SCALE:
            raise ConfigError(
                f"sweep.variable must be one of {sorted(SWEEP_UNIT_SCALE)}, "
                f"got {self.variable!r}"
            )
        if self.unit not in SWEEP_UNIT_SCALE[self.variable]:
            raise ConfigError(
                f"sweep.unit {self.unit!r} not valid for {self.variable}; "
                f"use one of {sorted(SWEEP_UNIT_SCALE[self.variable])}"
            )
        if not self.grid:
            raise ConfigError("sweep.grid must not be empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigError("sweep.grid must be strictly increasing")
        if self.variable in ("distance", "sigma0") and self.grid[0] <= 0:
            raise ConfigError(f"sweep.grid for {self.variable} must be positive")
        if self.variable == "zenith" and not (
            0.0 <= self.grid[0] and self.grid[-1] < math.pi / 2
        ):
            raise ConfigError("zenith grid must lie inside [0, pi/2)")
        if self.variable == "order":
            for v in self.grid:
                if v != int(v) or not 0 <= v <= 20:
                    raise ConfigError(
                        f"order grid values must be integers in [0, 20], got {v}"
                    )


@dataclass(frozen=True)
class OutputSpec:
    directory: str | None = None
    svg: bool = False


@dataclass(frozen=True)
class ScenarioConfig:
    beam: BeamParams
    source: PolarizationSource
    profile: TurbulenceProfile
    paths: tuple[PathKind, ...]
    zenith: float
    distance: float
    sweep: SweepSpec
    output: OutputSpec = OutputSpec()

    def __post_init__(self):
        if not self.paths:
            raise ConfigError("at least one path kind is required")
        if len(set(self.paths)) != len(self.paths):
            raise ConfigError("path kinds must not repeat")
        if self.distance <= 0:
            raise ConfigError(f"distance must be > 0, got {self.distance}")
        if not 0.0 <= self.zenith < math.pi / 2:
            raise ConfigError(
                f"zenith must lie in [0, pi/2), got {self.zenith}"
            )


def _get(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing key {where}.{key}")
    return section[key]


def _num(section: dict, key: str, where: str) -> float:
    value = _get(section, key, where)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def parse_config(doc: dict) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration root must be a JSON object")
    beam_doc = _get(doc, "beam", "config")
    source_doc = _get(doc, "source", "config")
    profile_doc = _get(doc, "profile", "config")
    sweep_doc = _get(doc, "sweep", "config")
    output_doc = doc.get("output", {})

    try:
        beam = BeamParams(
            wavelength=_num(beam_doc, "wavelength_nm", "beam") * 1e-9,
            waist=_num(beam_doc, "waist_cm", "beam") * 1e-2,
            order_x=int(_num(beam_doc, "order_x", "beam")),
            order_y=int(_num(beam_doc, "order_y", "beam")),
        )
        source = PolarizationSource(
            gamma_xx=_num(source_doc, "gamma_xx", "source"),
            gamma_yy=_num(source_doc, "gamma_yy", "source"),
            gamma_xy=complex(
                _num(source_doc, "gamma_xy_re", "source"),
                float(source_doc.get("gamma_xy_im", 0.0)),
            ),
            sigma0_xx=_num(source_doc, "sigma0xx_cm", "source") * 1e-2,
            sigma0_yy=_num(source_doc, "sigma0yy_cm", "source") * 1e-2,
            sigma0_xy=_num(source_doc, "sigma0xy_cm", "source") * 1e-2,
        )
        profile = TurbulenceProfile(
            cn2_ground=_num(profile_doc, "cn2_ground", "profile"),
            wind_rms=_num(profile_doc, "wind_rms_mps", "profile"),
            inner_scale=_num(profile_doc, "inner_scale_mm", "profile") * 1e-3,
            ground_altitude=float(profile_doc.get("ground_altitude_m", 0.0)),
        )
    except (RealizabilityError, UnsupportedOrderError):
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    kinds = []
    for name in _get(doc, "paths", "config"):
        try:
            kinds.append(PathKind(name))
        except ValueError:
            raise ConfigError(
                f"unknown path kind {name!r}; use one of "
                f"{[k.value for k in PathKind]}"
            ) from None

    variable = _get(sweep_doc, "variable", "sweep")
    unit = sweep_doc.get("unit", "")
    scale = SWEEP_UNIT_SCALE.get(variable, {}).get(unit)
    if scale is None:
        # Let SweepSpec raise its own diagnostics for bad variable/unit.
        scale = 1.0
    raw_grid = _get(sweep_doc, "grid", "sweep")
    if not isinstance(raw_grid, list):
        raise ConfigError("sweep.grid must be a list of numbers")
    sweep = SweepSpec(
        variable=variable,
        unit=unit,
        grid=tuple(float(v) * scale for v in raw_grid),
    )

    return ScenarioConfig(
        beam=beam,
        source=source,
        profile=profile,
        paths=tuple(kinds),
        zenith=math.radians(_num(doc, "zenith_deg", "config")),
        distance=_num(doc, "distance_km", "config") * 1e3,
        sweep=sweep,
        output=OutputSpec(
            directory=output_doc.get("directory"),
            svg=bool(output_doc.get("svg", False)),
        ),
    )


def load_config(path: str | Path) -> ScenarioConfig:
    """Parse and validate a scenario file, with line diagnostics on errors."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}"
        ) from exc
    return parse_config(doc)


def _round12(x: float) -> float:
    return float(f"{x:.12g}")


def config_to_dict(cfg: ScenarioConfig) -> dict:
    """Serialize back to the unit-suffixed document shape (12 sig. digits)."""
    unit_scale = SWEEP_UNIT_SCALE[cfg.sweep.variable][cfg.sweep.unit]
    return {
        "beam": {
            "wavelength_nm": _round12(cfg.beam.wavelength * 1e9),
            "waist_cm": _round12(cfg.beam.waist * 1e2),
            "order_x": cfg.beam.order_x,
            "order_y": cfg.beam.order_y,
        },
        "source": {
            "gamma_xx": _round12(cfg.source.gamma_xx),
            "gamma_yy": _round12(cfg.source.gamma_yy),
            "gamma_xy_re": _round12(complex(cfg.source.gamma_xy).real),
            "gamma_xy_im": _round12(complex(cfg.source.gamma_xy).imag),
            "sigma0xx_cm": _round12(cfg.source.sigma0_xx * 1e2),
            "sigma0yy_cm": _round12(cfg.source.sigma0_yy * 1e2),
            "sigma0xy_cm": _round12(cfg.source.sigma0_xy * 1e2),
        },
        "profile": {
            "cn2_ground": _round12(cfg.profile.cn2_ground),
            "wind_rms_mps": _round12(cfg.profile.wind_rms),
            "inner_scale_mm": _round12(cfg.profile.inner_scale * 1e3),
            "ground_altitude_m": _round12(cfg.profile.ground_altitude),
        },
        "paths": [kind.value for kind in cfg.paths],
        "zenith_deg": _round12(math.degrees(cfg.zenith)),
        "distance_km": _round12(cfg.distance * 1e-3),
        "sweep": {
            "variable": cfg.sweep.variable,
            "unit": cfg.sweep.unit,
            "grid": [_round12(v / unit_scale) for v in cfg.sweep.grid],
        },
        "output": {
            "directory": cfg.output.directory,
            "svg": cfg.output.svg,
        },
    }


def config_hash(cfg: ScenarioConfig) -> str:
    payload = json.dumps(config_to_dict(cfg), sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()[:12]


def default_config_path() -> Path:
    return Path(resources.files("hgpol").joinpath("data/default_scenario.json"))


def default_config() -> ScenarioConfig:
    """The shipped scenario (the reference parameter set of the datasets)."""
    return load_config(default_config_path())


def _resolve_point(cfg: ScenarioConfig, kind: PathKind, value: float):
    """Beam, source, path, observation for one sweep point."""
    beam, source = cfg.beam, cfg.source
    z, zenith = cfg.distance, cfg.zenith
    rho_x = rho_y = 0.0
    variable = cfg.sweep.variable
    if variable == "distance":
        z = value
    elif variable == "order":
        beam = replace(beam, order_x=int(value), order_y=int(value))
    elif variable == "sigma0":
        ratio = cfg.source.sigma0_xy / cfg.source.sigma0_xx
        source = replace(
            source, sigma0_xx=value, sigma0_yy=value, sigma0_xy=value * ratio
        )
    elif variable == "zenith":
        zenith = value
    elif variable == "radial_profile":
        rho_x = rho_y = value / math.sqrt(2.0)
    path = PathSpec(kind=kind, distance=z, zenith=zenith, profile=cfg.profile)
    return beam, source, path, Observation(rho_x=rho_x, rho_y=rho_y, z=z)


def _evaluate_point(
    cfg: ScenarioConfig, kind: PathKind, value: float, chash: str, figure: str
) -> dict:
    row = {
        "figure": figure,
        "path_kind": kind.value,
        "z_m": cfg.distance,
        "zenith_rad": cfg.zenith,
        "m": cfg.beam.order_x,
        "n": cfg.beam.order_y,
        "sigma0xx_m": cfg.source.sigma0_xx,
        "rho_x_m": 0.0,
        "rho_y_m": 0.0,
        "P": None,
        "I_norm": None,
        "inv_rho2_m2": None,
        "status": "ok",
        "config_hash": chash,
        "_trace": None,
    }
    try:
        beam, source, path, obs = _resolve_point(cfg, kind, value)
        row.update(
            z_m=obs.z, zenith_rad=path.zenith, m=beam.order_x, n=beam.order_y,
            sigma0xx_m=source.sigma0_xx, rho_x_m=obs.rho_x, rho_y_m=obs.rho_y,
        )
        inv_rho2 = effective_inverse_rho2(path, beam.wavenumber)
        matrix = coherence_matrix_from_inverse_rho2(beam, source, inv_rho2, obs)
        row["P"] = degree_of_polarization(matrix)
        row["inv_rho2_m2"] = inv_rho2
        row["_trace"] = matrix.trace
    except _ROW_ERRORS as exc:
        row["status"] = f"error:{type(exc).__name__}"
    return row


def run_sweep(
    cfg: ScenarioConfig, threads: int = 1, figure: str = ""
) -> list[dict]:
    """Evaluate the configured sweep; one row per (path kind, grid value).

    Rows come back in declared order regardless of ``threads``; per-point
    numeric failures are recorded in the row's status and never abort the
    sweep.
    """
    label = figure or f"run:{cfg.sweep.variable}"
    chash = config_hash(cfg)
    points = [
        (kind, value) for kind in cfg.paths for value in cfg.sweep.grid
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(
                pool.map(
                    lambda p: _evaluate_point(cfg, p[0], p[1], chash, label),
                    points,
                )
            )
    else:
        rows = [_evaluate_point(cfg, k, v, chash, label) for k, v in points]

    if cfg.sweep.variable == "radial_profile":
        _normalize_intensity(rows)
    for row in rows:
        row.pop("_trace")
    return rows


def _normalize_intensity(rows: list[dict]) -> None:
    """Per-curve I/I_max; curves are (figure, path_kind) groups."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault((row["figure"], row["path_kind"]), []).append(row)
    for group in groups.values():
        traces = [r["_trace"] for r in group if r["_trace"] is not None]
        peak = max(traces) if traces else 0.0
        for r in group:
            if r["_trace"] is not None and peak > 0.0:
                r["I_norm"] = r["_trace"] / peak


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.9g}"


def write_csv(rows: list[dict], path: Path, columns=None) -> None:
    columns = columns or CSV_COLUMNS
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_cell(row.get(c)) for c in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def resolve_output_dir(out_dir: str | Path | None) -> Path:
    if out_dir is None:
        out_dir = os.environ.get(OUTPUT_DIR_ENV, "hgpol_out")
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


# --------------------------------------------------------------------------
# Bundled presets.  All inherit the shipped reference parameters; overrides
# are the per-preset mode orders, sweep definitions and sigma triplets.
# --------------------------------------------------------------------------

FIG1_DISTANCES_KM = (1.0, 5.0, 20.0, 50.0)
FIG5_DISTANCES_KM = (1.0, 5.0, 20.0)


def _gsm_width(cfg: ScenarioConfig, kind: PathKind, z: float) -> float:
    """Propagated Gaussian-mode 1/e^2 width used to size radial grids."""
    beam, source = cfg.beam, cfg.source
    path = PathSpec(kind=kind, distance=z, zenith=cfg.zenith, profile=cfg.profile)
    inv_rho2 = effective_inverse_rho2(path, beam.wavenumber)
    spread = (4.0 * z * z / beam.wavenumber**2) * (
        1.0 / beam.waist**2 + 1.0 / source.sigma0_xx**2 + 2.0 * inv_rho2
    )
    return math.sqrt(beam.waist**2 + spread)


def _figure_datasets(fig_id: str) -> list[tuple[str, ScenarioConfig]]:
    base = default_config()
    datasets: list[tuple[str, ScenarioConfig]] = []
    if fig_id == "fig1":
        cfg4 = replace(
            base, beam=replace(base.beam, order_x=4, order_y=4)
        )
        envelope = math.sqrt(2 * 4 + 1)  # mode extent over the Gaussian width
        for z_km in FIG1_DISTANCES_KM:
            z = z_km * 1e3
            for kind in base.paths:
                half = 2.0 * envelope * _gsm_width(cfg4, kind, z)
                grid = tuple(
                    _round12(v) for v in np.linspace(-half, half, 81)
                )
                datasets.append(
                    (
                        f"fig1:z={z_km:g}km",
                        replace(
                            cfg4,
                            paths=(kind,),
                            distance=z,
                            sweep=SweepSpec("radial_profile", "m", grid),
                        ),
                    )
                )
    elif fig_id == "fig2":
        datasets.append(("fig2", replace(base, sweep=_distance_sweep())))
    elif fig_id == "fig3":
        datasets.append(
            (
                "fig3",
                replace(
                    base,
                    sweep=SweepSpec("order", "", tuple(float(v) for v in range(11))),
                ),
            )
        )
    elif fig_id == "fig4":
        for label, sigma_cm in (("fig4a", 0.1), ("fig4b", 10.0)):
            datasets.append(
                (
                    label,
                    replace(
                        base,
                        source=replace(
                            base.source,
                            sigma0_xx=sigma_cm * 1e-2,
                            sigma0_yy=sigma_cm * 1e-2,
                            sigma0_xy=2.0 * sigma_cm * 1e-2,
                        ),
                        sweep=_distance_sweep(),
                    ),
                )
            )
    elif fig_id == "fig5":
        grid = tuple(
            _round12(math.radians(0.5 * i)) for i in range(1, 180)
        )
        for z_km in FIG5_DISTANCES_KM:
            datasets.append(
                (
                    f"fig5:z={z_km:g}km",
                    replace(
                        base,
                        paths=(PathKind.SLANT_UP, PathKind.SLANT_DOWN),
                        distance=z_km * 1e3,
                        sweep=SweepSpec("zenith", "rad", grid),
                    ),
                )
            )
    else:
        raise ConfigError(f"unknown figure id {fig_id!r}; use {FIGURE_IDS}")
    return datasets


def _distance_sweep() -> SweepSpec:
    grid = tuple(_round12(v) for v in np.geomspace(10.0, 1.0e5, 61))
    return SweepSpec("distance", "m", grid)


def _write_manifest(path: Path, fig_id: str, datasets) -> None:
    payload = {
        "figure": fig_id,
        "version": PACKAGE_VERSION,
        "datasets": [
            {
                "label": label,
                "config_hash": config_hash(cfg),
                "resolved": config_to_dict(cfg),
            }
            for label, cfg in datasets
        ],
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def reproduce_figure(
    fig_id: str,
    out_dir: str | Path | None = None,
    svg: bool = False,
    threads: int = 1,
) -> list[Path]:
    """Regenerate one preset dataset; returns the written file paths."""
    out = resolve_output_dir(out_dir)
    written: list[Path] = []

    if fig_id == "table1":
        profile = default_config().profile
        rows = [
            {"altitude_m": h, "cn2_m_minus_2_3": cn2_at_altitude(profile, h)}
            for h in TABLE1_ALTITUDES_M
        ]
        csv_path = out / "table1.csv"
        write_csv(rows, csv_path, columns=["altitude_m", "cn2_m_minus_2_3"])
        written.append(csv_path)
        manifest = out / "table1_manifest.json"
        manifest.write_text(
            json.dumps(
                {
                    "figure": "table1",
                    "version": PACKAGE_VERSION,
                    "profile": config_to_dict(default_config())["profile"],
                },
                indent=2,
                sort_keys=True,
            )
            + "\n"
        )
        written.append(manifest)
        return written

    datasets = _figure_datasets(fig_id)
    rows: list[dict] = []
    for label, cfg in datasets:
        rows.extend(run_sweep(cfg, threads=threads, figure=label))

    csv_path = out / f"{fig_id}.csv"
    write_csv(rows, csv_path)
    written.append(csv_path)

    manifest_path = out / f"{fig_id}_manifest.json"
    _write_manifest(manifest_path, fig_id, datasets)
    written.append(manifest_path)

    if svg:
        svg_path = out / f"{fig_id}.svg"
        _plot_figure(rows, fig_id, svg_path)
        written.append(svg_path)
    return written


_SWEEP_AXES = {
    "fig1": ("rho_x_m", "diagonal offset rho_x=rho_y (m)"),
    "fig2": ("z_m", "propagation distance (m)"),
    "fig3": ("m", "mode order m=n"),
    "fig4": ("z_m", "propagation distance (m)"),
    "fig5": ("zenith_rad", "zenith angle (rad)"),
}


def _plot_figure(
    rows: list[dict], fig_id: str, path: Path, axis: tuple[str, str] | None = None
) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x_col, x_label = axis if axis is not None else _SWEEP_AXES[fig_id]
    series: dict[tuple, list[dict]] = {}
    for row in rows:
        if row["status"] != "ok":
            continue
        series.setdefault((row["figure"], row["path_kind"]), []).append(row)

    if fig_id == "fig1":
        labels = sorted({key[0] for key in series})
        fig, axes = plt.subplots(
            len(labels), 2, figsize=(9, 2.6 * len(labels)), squeeze=False
        )
        for i, label in enumerate(labels):
            for (fig_label, kind), pts in sorted(series.items()):
                if fig_label != label:
                    continue
                xs = [p[x_col] for p in pts]
                axes[i][0].plot(xs, [p["I_norm"] for p in pts], label=kind)
                axes[i][1].plot(xs, [p["P"] for p in pts], label=kind)
            axes[i][0].set_ylabel(f"{label}\nI/Imax")
            axes[i][1].set_ylabel("P")
        for ax_row in axes:
            for ax in ax_row:
                ax.set_xlabel(x_label)
        axes[0][0].legend(fontsize="small")
    else:
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for (fig_label, kind), pts in sorted(series.items()):
            ax.plot(
                [p[x_col] for p in pts],
                [p["P"] for p in pts],
                label=f"{fig_label} {kind}",
            )
        if fig_id in ("fig2", "fig4"):
            ax.set_xscale("log")
        ax.set_xlabel(x_label)
        ax.set_ylabel("degree of polarization P")
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


@dataclass(frozen=True)
class InnerScaleCalibration:
    inner_scale: float
    p_up: float
    p_down: float
    residual: float


def calibrate_inner_scale(
    grid: tuple[float, ...] | None = None,
) -> InnerScaleCalibration:
    """Pick the inner scale that best matches the slant-path anchors.

    The anchors are the Gaussian-mode (m = n = 0) on-axis polarization at
    z = 10 km and zenith pi/3: 0.450 on the slant-up link and 0.590 on the
    slant-down link.  Scans l0 over [1, 20] mm (0.1 mm steps by default)
    and returns the least-squares best fit; the shipped profile default is
    the rounded result of this calibration.
    """
    base = default_config()
    if grid is None:
        grid = tuple(0.001 + 0.0001 * i for i in range(191))
    beam = replace(base.beam, order_x=0, order_y=0)
    z = 10.0e3
    obs = Observation(0.0, 0.0, z)
    best = None
    for l0 in grid:
        profile = replace(base.profile, inner_scale=l0)
        p = {}
        for kind, target in (
            (PathKind.SLANT_UP, 0.450),
            (PathKind.SLANT_DOWN, 0.590),
        ):
            path = PathSpec(kind, z, base.zenith, profile)
            inv_rho2 = effective_inverse_rho2(path, beam.wavenumber)
            matrix = coherence_matrix_from_inverse_rho2(
                beam, base.source, inv_rho2, obs
            )
            p[kind] = degree_of_polarization(matrix)
        residual = math.hypot(
            p[PathKind.SLANT_UP] - 0.450, p[PathKind.SLANT_DOWN] - 0.590
        )
        if best is None or residual < best.residual:
            best = InnerScaleCalibration(
                inner_scale=l0,
                p_up=p[PathKind.SLANT_UP],
                p_down=p[PathKind.SLANT_DOWN],
                residual=residual,
            )
    return best
