"""Unit handling: meV, rad/fs and THz with a fixed reduced Planck constant."""

import math
from dataclasses import dataclass
from enum import StrEnum

from echo2d.errors import ConfigError

HBAR_MEV_FS = 658.2119
"""Reduced Planck constant in meV·fs."""


class FrequencyUnit(StrEnum):
    """Units accepted for energies and frequencies."""

    MEV = "meV"
    THZ = "THz"
    RAD_PER_FS = "rad/fs"


@dataclass(frozen=True)
class UnitContext:
    """Conversions between energy (meV), angular frequency (rad/fs) and THz.

    THz values are ordinary frequencies, so omega = 2*pi*nu; 1 fs^-1 is
    1000 THz.
    """

    hbar: float = HBAR_MEV_FS

    def mev_to_rad_per_fs(self, energy: float) -> float:
        return energy / self.hbar

    def rad_per_fs_to_mev(self, omega: float) -> float:
        return omega * self.hbar

    def thz_to_rad_per_fs(self, nu: float) -> float:
        return 2.0 * math.pi * nu * 1e-3

    def rad_per_fs_to_thz(self, omega: float) -> float:
        return omega / (2.0 * math.pi) * 1e3

    def mev_to_thz(self, energy: float) -> float:
        return self.rad_per_fs_to_thz(self.mev_to_rad_per_fs(energy))

    def thz_to_mev(self, nu: float) -> float:
        return self.rad_per_fs_to_mev(self.thz_to_rad_per_fs(nu))

    def to_rad_per_fs(self, value: float, unit: FrequencyUnit | str) -> float:
        """Convert a tagged quantity to rad/fs."""
        unit = _parse_unit(unit)
        if unit is FrequencyUnit.MEV:
            return self.mev_to_rad_per_fs(value)
        if unit is FrequencyUnit.THZ:
            return self.thz_to_rad_per_fs(value)
        return float(value)

    def from_rad_per_fs(self, omega: float, unit: FrequencyUnit | str) -> float:
        unit = _parse_unit(unit)
        if unit is FrequencyUnit.MEV:
            return self.rad_per_fs_to_mev(omega)
        if unit is FrequencyUnit.THZ:
            return self.rad_per_fs_to_thz(omega)
        return float(omega)

    def to_mev(self, value: float, unit: FrequencyUnit | str) -> float:
        unit = _parse_unit(unit)
        if unit is FrequencyUnit.MEV:
            return float(value)
        if unit is FrequencyUnit.THZ:
            return self.thz_to_mev(value)
        return self.rad_per_fs_to_mev(value)

    def convert(
        self, value: float, source: FrequencyUnit | str, target: FrequencyUnit | str
    ) -> float:
        if _parse_unit(source) is _parse_unit(target):
            return float(value)
        if _parse_unit(target) is FrequencyUnit.MEV:
            return self.to_mev(value, source)
        return self.from_rad_per_fs(self.to_rad_per_fs(value, source), target)

    def all_units(self, omega: float) -> dict[str, float]:
        """Express an angular frequency in every supported unit."""
        return {unit.value: self.from_rad_per_fs(omega, unit) for unit in FrequencyUnit}


def _parse_unit(unit: FrequencyUnit | str) -> FrequencyUnit:
    try:
        return FrequencyUnit(unit)
    except ValueError as e:
        raise ConfigError(f"Unknown frequency unit: {unit!r}") from e


DEFAULT_UNITS = UnitContext()
