"""Simulation service shared by the HTTP routes."""

from typing import Any

import structlog

from echo2d.config import worker_count
from echo2d.schemas.run import FieldConfig, SystemConfig
from echo2d.services.oracle_check import OracleReport, check_oracle_triangle
from echo2d.services.outputs import pathway_record
from echo2d.services.pathways import ExperimentKind, render_pathways
from echo2d.services.response import pathway_amplitudes
from echo2d.services.runner import build_system, field_set
from echo2d.services.spectra import StickSpectrum, stick_spectrum

logger = structlog.get_logger()


class SimulationService:
    """Builds systems from request payloads and runs the library on them."""

    def __init__(self, workers: int | None = None):
        self.workers = worker_count(workers)
        self.requests_served = 0

    async def initialize(self) -> None:
        logger.info("Simulation service ready", workers=self.workers)

    async def close(self) -> None:
        logger.info("Simulation service closed", requests_served=self.requests_served)

    def pathways(
        self,
        system_config: SystemConfig,
        kind: ExperimentKind,
        include_diagrams: bool = False,
        pulses: FieldConfig | None = None,
    ) -> dict[str, Any]:
        system, _ = build_system(system_config)
        amps = pathway_amplitudes(system, kind, field_set(pulses))
        self.requests_served += 1
        result: dict[str, Any] = {
            "kind": kind,
            "count": len(amps),
            "levels": list(system.labels),
            "pathways": [pathway_record(a) for a in amps],
        }
        if include_diagrams:
            result["diagrams"] = render_pathways(
                [a.pathway for a in amps if a.pathway is not None]
            )
        logger.debug("Pathways served", kind=kind.value, count=len(amps))
        return result

    def sticks(
        self,
        system_config: SystemConfig,
        kind: ExperimentKind,
        tau: float = 0.0,
        pulses: FieldConfig | None = None,
    ) -> StickSpectrum:
        system, _ = build_system(system_config)
        amps = pathway_amplitudes(system, kind, field_set(pulses))
        self.requests_served += 1
        return stick_spectrum(amps, tau, kind)

    def oracle_check(
        self, sets: int, samples: int, seed: int, tolerance: float
    ) -> OracleReport:
        self.requests_served += 1
        return check_oracle_triangle(sets, samples, seed, tolerance)

    async def health_check(self) -> dict[str, Any]:
        return {"status": "healthy", "workers": self.workers}


# Global instance for dependency injection
_simulation_service: SimulationService | None = None


async def init_simulation_service(workers: int | None = None) -> None:
    """Initialize the global SimulationService instance."""
    global _simulation_service

    _simulation_service = SimulationService(workers)
    await _simulation_service.initialize()


async def shutdown_simulation_service() -> None:
    """Shutdown the global SimulationService instance."""
    global _simulation_service

    if _simulation_service:
        await _simulation_service.close()
        _simulation_service = None


def get_simulation_service() -> SimulationService:
    """FastAPI dependency returning the initialized SimulationService.

    Raises:
        RuntimeError: If the service is not initialized
    """
    if _simulation_service is None:
        raise RuntimeError(
            "SimulationService not initialized. Make sure to call "
            "init_simulation_service() in app lifespan."
        )
    return _simulation_service
