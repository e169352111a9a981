"""Builders and artifact readers shared by the tests."""

import csv
import io

import numpy as np
import numpy.typing as npt

from echo2d.schemas.run import DimerSystemConfig, mev
from echo2d.schemas.system import MixingAngleReport
from echo2d.services.model import ExcitonSystem
from echo2d.services.outputs import PGM_MAXVAL
from echo2d.services.runner import build_system

FloatArray = npt.NDArray[np.float64]


def dimer_from_energies(
    energy_a: float,
    energy_b: float,
    J: float,
    mu_a: float,
    mu_b: float,
    biexciton_shift: float = 0.0,
) -> tuple[ExcitonSystem, MixingAngleReport]:
    """Unbroadened dimer from site energies, coupling and shift in meV."""
    config = DimerSystemConfig(
        omega_a=mev(energy_a),
        omega_b=mev(energy_b),
        coupling=mev(J),
        mu_a=mu_a,
        mu_b=mu_b,
        biexciton_shift=mev(biexciton_shift),
    )
    system, report = build_system(config)
    assert report is not None
    return system, report


def parse_grid_csv(content: bytes | str) -> tuple[FloatArray, FloatArray, FloatArray]:
    """First axis, third axis and values of a grid CSV."""
    text = content.decode() if isinstance(content, bytes) else content
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][0] != "axis":
        raise ValueError("grid CSV must start with an 'axis' header row")
    third = np.array([float(v) for v in rows[0][1:]])
    first = np.array([float(row[0]) for row in rows[1:]])
    values = np.array([[float(v) for v in row[1:]] for row in rows[1:]])
    return first, third, values.reshape(first.size, third.size)


def parse_pgm(content: bytes) -> npt.NDArray[np.uint16]:
    parts = content.split(b"\n", 3)
    if len(parts) < 4 or parts[0] != b"P5":
        raise ValueError("not a binary PGM image")
    width, height = (int(v) for v in parts[1].split())
    if int(parts[2]) != PGM_MAXVAL:
        raise ValueError(f"expected maxval {PGM_MAXVAL}")
    pixels = np.frombuffer(parts[3], dtype=">u2", count=width * height)
    return pixels.reshape(height, width).astype(np.uint16)


def parse_traces_csv(
    content: bytes | str,
) -> tuple[list[float], dict[str, npt.NDArray[np.complex128]]]:
    text = content.decode() if isinstance(content, bytes) else content
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    if header[0] != "tau2":
        raise ValueError("trace CSV must start with a 'tau2' column")
    tau2 = [float(row[0]) for row in body]
    traces = {}
    for column in range(1, len(header), 2):
        label = header[column].removesuffix("_real")
        traces[label] = np.array(
            [complex(float(row[column]), float(row[column + 1])) for row in body]
        )
    return tau2, traces
