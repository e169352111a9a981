"""Batch runs: resolve a run configuration, compute every result, write artifacts."""

import hashlib
import json
from pathlib import Path
from typing import Any, Literal

import numpy as np
import structlog
from pydantic import ValidationError

from echo2d import __version__
from echo2d.errors import ConfigError
from echo2d.schemas.run import (
    DimerSystemConfig,
    FieldConfig,
    GridConfig,
    OutputKind,
    RunConfig,
    RunManifest,
    SystemConfig,
)
from echo2d.schemas.spectra import FrequencyGridSpec, GridAxes
from echo2d.schemas.system import MixingAngleReport, SiteDimerParams
from echo2d.services.model import ExcitonSystem, build_exciton_dimer, set_rates
from echo2d.services.outputs import (
    encode_grid_csv,
    encode_json,
    encode_pgm,
    encode_traces_csv,
    format_tau,
    pathway_record,
    write_artifacts,
)
from echo2d.services.pathways import ExperimentKind, render_pathways
from echo2d.services.response import (
    ComplexArray,
    FieldSet,
    PathwayAmplitude,
    pathway_amplitudes,
)
from echo2d.services.spectra import (
    SpectrumGrid,
    full_fourier,
    spectrum_grid,
    stick_spectrum,
    waiting_time_trace,
)
from echo2d.services.units import DEFAULT_UNITS, UnitContext

logger = structlog.get_logger()

METADATA_FILE = "metadata.json"
FREQUENCY_CONVENTION = (
    "THz values are ordinary frequencies nu; omega = 2*pi*nu / 1000 rad/fs"
)
COUPLING_CONVENTION = (
    "coupling is the site energy J in meV; J / hbar enters the 2x2 site Hamiltonian "
    "and omega_beta_alpha = 2*sqrt(Delta**2 + (J / hbar)**2)"
)


def load_config(path: Path | str) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e
    try:
        return RunConfig.model_validate_json(text)
    except ValidationError as e:
        raise ConfigError(f"Invalid config {path}: {e}") from e


def config_hash(config: RunConfig) -> str:
    payload = config.model_dump(mode="json")
    payload["outputs"] = sorted(payload["outputs"])
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def build_system(
    config: SystemConfig, units: UnitContext = DEFAULT_UNITS
) -> tuple[ExcitonSystem, MixingAngleReport | None]:
    """Resolve a system config into rad/fs and attach its linewidths."""
    report = None
    try:
        if isinstance(config, DimerSystemConfig):
            params = SiteDimerParams(
                omega_a=units.to_rad_per_fs(config.omega_a.value, config.omega_a.unit),
                omega_b=units.to_rad_per_fs(config.omega_b.value, config.omega_b.unit),
                J=units.to_mev(config.coupling.value, config.coupling.unit),
                mu_a=config.mu_a,
                mu_b=config.mu_b,
                biexciton_shift=units.to_mev(
                    config.biexciton_shift.value, config.biexciton_shift.unit
                ),
            )
            system, report = build_exciton_dimer(params, units)
        else:
            system = ExcitonSystem(
                energies=np.array(
                    [units.to_rad_per_fs(q.value, q.unit) for q in config.energies]
                ),
                band=tuple(config.bands),
                mu_plus=np.array(config.mu_plus, dtype=float),
                labels=tuple(config.labels or ()),
                ground_index=config.ground_index,
            )
        gamma = config.rates.per_level(system.n_levels)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from e
    system = set_rates(system, gamma, config.rates.population_relaxation)
    return system, report


def grid_spec(
    grid: GridConfig, kind: ExperimentKind, units: UnitContext = DEFAULT_UNITS
) -> FrequencyGridSpec:
    def rad(q: Any) -> float | None:
        return None if q is None else units.to_rad_per_fs(q.value, q.unit)

    try:
        return FrequencyGridSpec(
            omega_min=units.to_rad_per_fs(grid.omega_min.value, grid.omega_min.unit),
            omega_max=units.to_rad_per_fs(grid.omega_max.value, grid.omega_max.unit),
            n_points=grid.n_points,
            axes=(
                GridAxes.OMEGA2_OMEGA3
                if kind is ExperimentKind.TWO_QUANTUM
                else GridAxes.OMEGA1_OMEGA3
            ),
            first_min=rad(grid.first_min),
            first_max=rad(grid.first_max),
        )
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def fixed_delays(config: RunConfig, kind: ExperimentKind) -> list[float]:
    """τ1 values for two-quantum spectra, τ2 values otherwise."""
    if kind is ExperimentKind.TWO_QUANTUM:
        return config.tau1.delays()
    return config.tau2.delays()


def field_set(pulses: FieldConfig | None = None) -> FieldSet:
    if pulses is None:
        return FieldSet()
    return FieldSet(amplitudes=pulses.amplitudes, phases=pulses.phases)


def compute_traces(
    config: RunConfig,
    kind: ExperimentKind,
    amps: list[PathwayAmplitude],
    units: UnitContext = DEFAULT_UNITS,
) -> dict[str, ComplexArray]:
    """Waiting-time traces of the configured peaks belonging to ``kind``."""
    mode: Literal["stick", "grid"] = "stick" if config.grid == "stick" else "grid"
    delays = config.trace_delays()
    traces = {}
    for index, peak in enumerate(config.trace_peaks, start=1):
        if peak.experiment is not kind:
            continue
        position = (
            units.to_rad_per_fs(peak.omega1.value, peak.omega1.unit),
            units.to_rad_per_fs(peak.omega3.value, peak.omega3.unit),
        )
        traces[peak.label or f"peak{index}"] = waiting_time_trace(
            amps, position, delays, mode=mode, tolerance=peak.tolerance
        )
    return traces


def _add_grid(
    artifacts: dict[str, bytes],
    normalization: dict[str, dict[str, float]],
    grid: SpectrumGrid,
    channels: list[OutputKind],
) -> None:
    stem = f"grid_{grid.label}_tau{format_tau(grid.tau_fixed)}"
    for channel in channels:
        values = grid.channel(channel.value)
        artifacts[f"{stem}_{channel.value}.csv"] = encode_grid_csv(
            grid.omega_first, grid.omega_third, values
        )
        heatmap = encode_pgm(grid.omega_first, values)
        name = f"{stem}_{channel.value}.pgm"
        artifacts[name] = heatmap.content
        normalization[name] = {"min": heatmap.minimum, "max": heatmap.maximum}


def _metadata(
    config: RunConfig,
    system: ExcitonSystem,
    report: MixingAngleReport | None,
    normalization: dict[str, dict[str, float]],
    files: list[str],
    units: UnitContext,
) -> dict[str, Any]:
    levels = [
        {
            "label": label,
            "band": band,
            "energy": units.all_units(float(energy)),
            "gamma": float(gamma),
        }
        for label, band, energy, gamma in zip(
            system.labels, system.band, system.energies, system.gamma, strict=True
        )
    ]
    metadata: dict[str, Any] = {
        "version": __version__,
        "config_hash": config_hash(config),
        "hbar_meV_fs": units.hbar,
        "frequency_convention": FREQUENCY_CONVENTION,
        "coupling_convention": COUPLING_CONVENTION,
        "experiments": [kind.value for kind in config.experiment],
        "levels": levels,
        "gamma_matrix": system.gamma_matrix.tolist(),
        "population_relaxation": system.population_relaxation,
        "tau1": config.tau1.delays(),
        "tau2": config.tau2.delays(),
        "grid": (
            config.grid.model_dump(mode="json")
            if isinstance(config.grid, GridConfig)
            else config.grid
        ),
        "outputs": sorted(output.value for output in config.outputs),
        "pgm_normalization": normalization,
        "files": files,
    }
    if report is not None:
        frequencies = {
            "omega_bar": report.omega_bar,
            "Delta": report.Delta,
            "coupling": report.coupling,
            "omega_alpha": report.omega_alpha,
            "omega_beta": report.omega_beta,
            "omega_f": report.omega_f,
            "omega_beta_alpha": report.omega_beta_alpha,
        }
        metadata["dimer"] = {
            "theta": report.theta,
            "frequencies": {k: units.all_units(v) for k, v in frequencies.items()},
            "dipoles": {
                "mu_alpha_g": report.mu_alpha_g,
                "mu_beta_g": report.mu_beta_g,
                "mu_f_alpha": report.mu_f_alpha,
                "mu_f_beta": report.mu_f_beta,
            },
        }
    return metadata


def run(
    config: RunConfig,
    workers: int | None = None,
    units: UnitContext = DEFAULT_UNITS,
    output_dir: Path | None = None,
) -> RunManifest:
    """Compute every requested result, then write the artifacts and the metadata."""
    system, report = build_system(config.system, units)
    fields = field_set(config.pulses)
    artifacts: dict[str, bytes] = {}
    normalization: dict[str, dict[str, float]] = {}
    grids: dict[ExperimentKind, dict[float, SpectrumGrid]] = {}

    for kind in config.experiment:
        amps = pathway_amplitudes(system, kind, fields)
        label = kind.value
        delays = fixed_delays(config, kind)
        logger.info(
            "Computing experiment", kind=label, pathways=len(amps), delays=len(delays)
        )

        if OutputKind.PATHWAYS in config.outputs:
            artifacts[f"pathways_{label}.json"] = encode_json(
                {
                    "kind": label,
                    "levels": list(system.labels),
                    "pathways": [pathway_record(a) for a in amps],
                }
            )
        if OutputKind.DIAGRAMS in config.outputs:
            pathways = [a.pathway for a in amps if a.pathway is not None]
            artifacts[f"diagrams_{label}.txt"] = render_pathways(pathways).encode()
        if OutputKind.STICKS in config.outputs:
            spectra = [stick_spectrum(amps, tau, kind).to_dict() for tau in delays]
            artifacts[f"sticks_{label}.json"] = encode_json(
                {"kind": label, "spectra": spectra}
            )
        if config.channels and isinstance(config.grid, GridConfig):
            spec = grid_spec(config.grid, kind, units)
            grids[kind] = {}
            for tau in delays:
                grid = spectrum_grid(amps, spec, tau, kind, workers)
                grids[kind][tau] = grid
                _add_grid(artifacts, normalization, grid, config.channels)
        if OutputKind.TRACES in config.outputs:
            traces = compute_traces(config, kind, amps, units)
            if traces:
                artifacts[f"traces_{label}.csv"] = encode_traces_csv(
                    config.trace_delays(), traces
                )

    rephasing = grids.get(ExperimentKind.REPHASING, {})
    nonrephasing = grids.get(ExperimentKind.NONREPHASING, {})
    for tau, grid in rephasing.items():
        if tau in nonrephasing:
            _add_grid(
                artifacts,
                normalization,
                full_fourier(grid, nonrephasing[tau]),
                config.channels,
            )

    files = [*artifacts, METADATA_FILE]
    metadata = _metadata(config, system, report, normalization, files, units)
    artifacts[METADATA_FILE] = encode_json(metadata)

    target = output_dir or config.output_dir
    written = write_artifacts(target, artifacts)
    logger.info("Run complete", output_dir=str(target), files=len(written))
    return RunManifest(
        output_dir=str(target),
        files=written,
        config_hash=metadata["config_hash"],
        version=__version__,
    )
