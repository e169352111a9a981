"""Encoders for run artifacts.

CSV grids, 16-bit PGM heatmaps, JSON records and trace tables.
"""

import csv
import io
import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt
import structlog

from echo2d.errors import ConfigError
from echo2d.services.response import ComplexArray, PathwayAmplitude

logger = structlog.get_logger()

PGM_MAXVAL = 65535


def format_float(value: float) -> str:
    """Shortest representation that parses back to the same float."""
    return repr(float(value))


def format_tau(tau: float) -> str:
    return f"{tau:g}"


def encode_json(payload: Any) -> bytes:
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
    return (text + "\n").encode()


def encode_grid_csv(
    first_axis: npt.ArrayLike, third_axis: npt.ArrayLike, values: npt.ArrayLike
) -> bytes:
    """Header row ``axis,<third axis>``, then one ``<first>,<values...>`` row each."""
    first = np.asarray(first_axis, dtype=float)
    third = np.asarray(third_axis, dtype=float)
    data = np.asarray(values, dtype=float)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["axis", *(format_float(w) for w in third)])
    for w, row in zip(first, data, strict=True):
        writer.writerow([format_float(w), *(format_float(v) for v in row)])
    return buffer.getvalue().encode()


@dataclass(frozen=True)
class Heatmap:
    """Binary PGM image with the value range it was normalized from."""

    content: bytes
    minimum: float
    maximum: float


def encode_pgm(first_axis: npt.ArrayLike, values: npt.ArrayLike) -> Heatmap:
    """16-bit min-max normalized P5 image; the top row is the largest first axis."""
    first = np.asarray(first_axis, dtype=float)
    data = np.asarray(values, dtype=float)
    order = np.argsort(first, kind="stable")[::-1]
    image = data[order, :]
    minimum, maximum = float(image.min()), float(image.max())
    if maximum > minimum:
        scaled = np.rint((image - minimum) / (maximum - minimum) * PGM_MAXVAL)
    else:
        scaled = np.zeros_like(image)
    height, width = image.shape
    header = f"P5\n{width} {height}\n{PGM_MAXVAL}\n".encode("ascii")
    return Heatmap(
        content=header + scaled.astype(">u2").tobytes(),
        minimum=minimum,
        maximum=maximum,
    )


def encode_traces_csv(
    tau2: Sequence[float], traces: Mapping[str, ComplexArray]
) -> bytes:
    """One row per waiting time; real and imaginary columns per trace."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = ["tau2"]
    for label in traces:
        header += [f"{label}_real", f"{label}_imag"]
    writer.writerow(header)
    for k, tau in enumerate(tau2):
        row = [format_float(tau)]
        for trace in traces.values():
            row += [format_float(trace[k].real), format_float(trace[k].imag)]
        writer.writerow(row)
    return buffer.getvalue().encode()


def _complex(value: complex) -> dict[str, float]:
    return {"re": float(value.real), "im": float(value.imag)}


def pathway_record(amplitude: PathwayAmplitude) -> dict[str, Any]:
    """Pathway JSON record with its factored amplitude and interval frequencies."""
    record = amplitude.pathway.to_dict() if amplitude.pathway is not None else {}
    record["amplitude"] = _complex(amplitude.amp)
    record["omegas"] = [_complex(omega) for omega in amplitude.omegas]
    return record


def write_artifacts(output_dir: Path, artifacts: Mapping[str, bytes]) -> list[str]:
    """Write every artifact under ``output_dir``; returns the names in write order."""
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
        for name, payload in artifacts.items():
            (output_dir / name).write_bytes(payload)
    except OSError as e:
        logger.error(
            "Failed to write outputs", output_dir=str(output_dir), error=str(e)
        )
        raise ConfigError(f"Cannot write outputs to {output_dir}: {e}") from e
    return list(artifacts)
