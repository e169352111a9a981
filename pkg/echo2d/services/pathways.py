"""Liouville pathway enumeration, classification and diagram rendering.

Each third-order term is a chain of density-matrix elements starting at
|g><g|. An interaction with field sign ``s`` on the ket (LEFT) raises the
ket for s=+ and lowers it for s=-; on the bra (RIGHT) it lowers the bra for
s=+ and raises it for s=-. Pathways store the elements of the emitted
diagram, so rephasing chains begin on the bra side.
"""

import itertools
from collections.abc import Iterator
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import structlog

from echo2d.services.model import ExcitonSystem

logger = structlog.get_logger()

Element = tuple[int, int]


class Side(StrEnum):
    LEFT = "L"
    RIGHT = "R"


class ExperimentKind(StrEnum):
    """Pulse ordering for the fixed signal direction -k_A + k_B + k_C."""

    REPHASING = "rephasing"
    NONREPHASING = "nonrephasing"
    TWO_QUANTUM = "two_quantum"

    @property
    def beam_a_slot(self) -> int:
        """Time slot (1..3) occupied by the conjugated beam A."""
        return {"rephasing": 1, "nonrephasing": 2, "two_quantum": 3}[self.value]

    @property
    def signs(self) -> tuple[int, int, int]:
        slot = self.beam_a_slot
        signs = tuple(-1 if j == slot else 1 for j in (1, 2, 3))
        return signs  # type: ignore[return-value]

    @property
    def conjugate_branch(self) -> bool:
        return self.beam_a_slot == 1

    @property
    def families(self) -> tuple[int, ...]:
        """Response-function families F_r retained by phase matching."""
        return {
            "rephasing": (1, 2, 3, 4),
            "nonrephasing": (1, 2, 4),
            "two_quantum": (1, 3),
        }[self.value]


class PathwayClass(StrEnum):
    GSB = "GSB"
    SE = "SE"
    ESA = "ESA"
    TWO_QUANTUM = "2Q"


FAMILY_SIGN = {1: 1, 2: -1, 3: -1, 4: 1}


def family_sides(r_index: int, first: Side = Side.LEFT) -> tuple[Side, Side, Side]:
    """Sides of interactions 1..3 for family F_r.

    r=1 keeps every interaction on the side of the first; r=2 moves the
    second to the other side, r=3 the third, r=4 both.
    """
    other = Side.RIGHT if first is Side.LEFT else Side.LEFT
    flips = r_index - 1
    return (
        first,
        other if flips & 1 else first,
        other if flips & 2 else first,
    )


@dataclass(frozen=True)
class Pathway:
    """One surviving term of the third-order response.

    ``elements`` holds the (ket, bra) pair after interactions 1, 2, 3 and
    after emission (a population). ``dipoles`` are the four transition
    dipole entries in interaction order; ``dipole_product`` includes the
    F_r sign.
    """

    kind: ExperimentKind
    r_index: int
    signs: tuple[int, int, int]
    sides: tuple[Side, Side, Side]
    elements: tuple[Element, Element, Element, Element]
    dipoles: tuple[float, float, float, float]
    dipole_product: float
    conjugate_branch: bool
    labels: tuple[str, ...]
    bands: tuple[int, ...]
    ground_index: int = 0

    @property
    def family_sign(self) -> int:
        return FAMILY_SIGN[self.r_index]

    @property
    def intervals(self) -> tuple[Element, Element, Element]:
        return self.elements[0], self.elements[1], self.elements[2]

    def transitions(self) -> list[tuple[int, int]]:
        """(upper, lower) level pair for interactions 1..3 and the emission."""
        g = self.ground_index
        chain = [(g, g), *self.elements]
        pairs = []
        for before, after in itertools.pairwise(chain):
            changed = 0 if before[0] != after[0] else 1
            a, b = before[changed], after[changed]
            pairs.append((a, b) if self.bands[a] > self.bands[b] else (b, a))
        return pairs

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "r_index": self.r_index,
            "family_sign": self.family_sign,
            "signs": list(self.signs),
            "sides": [side.value for side in self.sides],
            "elements": [list(element) for element in self.elements],
            "element_labels": [
                [self.labels[k], self.labels[b]] for k, b in self.elements
            ],
            "dipoles": list(self.dipoles),
            "dipole_product": self.dipole_product,
            "conjugate_branch": self.conjugate_branch,
            "class": classify_pathway(self).value,
        }


def _steps(
    system: ExcitonSystem, element: Element, sign: int, side: Side
) -> Iterator[tuple[Element, float]]:
    """Elements reachable from ``element`` by one dipole interaction."""
    ket, bra = element
    mu = system.mu_plus
    for level in range(system.n_levels):
        if side is Side.LEFT:
            dipole = mu[level, ket] if sign > 0 else mu[ket, level]
            if dipole != 0.0:
                yield (level, bra), float(dipole)
        else:
            dipole = mu[bra, level] if sign > 0 else mu[level, bra]
            if dipole != 0.0:
                yield (ket, level), float(dipole)


def _expand(
    system: ExcitonSystem,
    signs: tuple[int, int, int],
    sides: tuple[Side, Side, Side],
) -> Iterator[tuple[list[Element], list[float]]]:
    g = system.ground_index
    partial: list[tuple[list[Element], list[float]]] = [([(g, g)], [])]
    for sign, side in zip(signs, sides, strict=True):
        partial = [
            ([*chain, nxt], [*dipoles, dipole])
            for chain, dipoles in partial
            for nxt, dipole in _steps(system, chain[-1], sign, side)
        ]
    for chain, dipoles in partial:
        ket, bra = chain[-1]
        # the analytic signal is emitted by lowering the ket onto the bra
        emission = system.mu_plus[ket, bra]
        if emission != 0.0:
            yield [*chain[1:], (bra, bra)], [*dipoles, float(emission)]


def enumerate_pathways(system: ExcitonSystem, kind: ExperimentKind) -> list[Pathway]:
    """All nonzero pathways of ``kind``, ordered by r then level indices."""
    first = Side.RIGHT if kind.conjugate_branch else Side.LEFT
    pathways = []
    for r_index in kind.families:
        sides = family_sides(r_index, first)
        for elements, dipoles in _expand(system, kind.signs, sides):
            product = float(FAMILY_SIGN[r_index])
            for dipole in dipoles:
                product *= dipole
            if product == 0.0:
                continue
            pathways.append(
                Pathway(
                    kind=kind,
                    r_index=r_index,
                    signs=kind.signs,
                    sides=sides,
                    elements=tuple(elements),  # type: ignore[arg-type]
                    dipoles=tuple(dipoles),  # type: ignore[arg-type]
                    dipole_product=product,
                    conjugate_branch=kind.conjugate_branch,
                    labels=system.labels,
                    bands=system.band,
                    ground_index=system.ground_index,
                )
            )
    pathways.sort(key=lambda p: (p.r_index, [i for e in p.elements for i in e]))
    logger.debug("Enumerated pathways", kind=kind.value, count=len(pathways))
    return pathways


def classify_pathway(p: Pathway) -> PathwayClass:
    """GSB / SE / ESA / 2Q label from the interval-2 and interval-3 elements."""
    ket2, bra2 = p.elements[1]
    ket3, bra3 = p.elements[2]
    if 2 in (p.bands[ket2], p.bands[bra2]):
        return PathwayClass.TWO_QUANTUM
    if p.bands[ket2] == 0 and p.bands[bra2] == 0:
        return PathwayClass.GSB
    if 2 in (p.bands[ket3], p.bands[bra3]):
        return PathwayClass.ESA
    return PathwayClass.SE


@dataclass(frozen=True)
class DiagramText:
    """Fixed-width double-sided diagram; time runs from the bottom row up."""

    lines: tuple[str, ...]
    arrows: tuple[str, str, str]
    emission: str

    @property
    def text(self) -> str:
        return "\n".join(self.lines)


def render_diagram(p: Pathway) -> DiagramText:
    """Render a pathway as an ASCII ladder with rails for ket and bra."""
    width = max(len(label) for label in p.labels)
    rail = "-" * (2 * width + 3)

    def label(level: int) -> str:
        return p.labels[level]

    def evolution(element: Element, note: str) -> str:
        ket, bra = element
        return f"  |{label(ket):<{width}}   {label(bra):>{width}}|    {note}"

    def omega_note(k: int, element: Element) -> str:
        return f"tau{k} Omega_{label(element[0])}{label(element[1])}"

    transitions = p.transitions()
    rows = [evolution((p.ground_index, p.ground_index), "rho0")]
    arrows = []
    for j in range(3):
        sign, side = p.signs[j], p.sides[j]
        upper, lower = transitions[j]
        glyph = "->" if sign > 0 else "<-"
        arrows.append("right" if sign > 0 else "left")
        note = f"mu_{label(upper)}{label(lower)} E{'+' if sign > 0 else '-'}_{j + 1}"
        if side is Side.LEFT:
            rows.append(f"{glyph}|{rail}|    {note}")
        else:
            rows.append(f"  |{rail}|{glyph}  {note}")
        rows.append(evolution(p.elements[j], omega_note(j + 1, p.elements[j])))

    upper, lower = transitions[3]
    emission = f"<~|{rail}|    emit mu_{label(upper)}{label(lower)}"
    rows.append(emission)
    return DiagramText(
        lines=tuple(reversed(rows)),
        arrows=tuple(arrows),  # type: ignore[arg-type]
        emission=emission,
    )


def render_pathways(pathways: list[Pathway]) -> str:
    """Render a pathway list as one text document with numbered headers."""
    blocks = []
    for index, p in enumerate(pathways, start=1):
        header = f"{index:02d} {p.kind.value} r={p.r_index} {classify_pathway(p).value}"
        blocks.append(header + "\n" + render_diagram(p).text)
    return "\n\n".join(blocks) + "\n" if blocks else ""
