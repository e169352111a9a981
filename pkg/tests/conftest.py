"""Shared fixtures for the echo2d test suite."""

from pathlib import Path

import pytest

from echo2d.schemas.system import MixingAngleReport
from echo2d.services.model import ExcitonSystem, set_rates
from echo2d.services.presets import COUPLED_DIMER, DEPHASING_DIMER
from echo2d.services.runner import build_system
from tests.helpers import dimer_from_energies

REPO_ROOT = Path(__file__).resolve().parents[1]
CONFIG_DIR = REPO_ROOT / "configs"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@pytest.fixture
def coupled() -> tuple[ExcitonSystem, MixingAngleReport]:
    """Unbroadened heterodimer with strong mixing."""
    system, report = build_system(COUPLED_DIMER)
    assert report is not None
    return system, report


@pytest.fixture
def coupled_system(coupled: tuple[ExcitonSystem, MixingAngleReport]) -> ExcitonSystem:
    return coupled[0]


@pytest.fixture
def dephasing_system() -> ExcitonSystem:
    """Same dimer with Γ_ij = 0.02 fs^-1 on every coherence and no population decay."""
    system, _ = build_system(DEPHASING_DIMER)
    return system


@pytest.fixture
def uncoupled() -> tuple[ExcitonSystem, MixingAngleReport]:
    """J = 0 dimer at 1510 / 1640 meV."""
    return dimer_from_energies(1510.0, 1640.0, J=0.0, mu_a=1.2, mu_b=0.7)


@pytest.fixture
def broadened_uncoupled(
    uncoupled: tuple[ExcitonSystem, MixingAngleReport],
) -> ExcitonSystem:
    return set_rates(uncoupled[0], [0.0, 0.01, 0.01, 0.02])


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN_DIR
