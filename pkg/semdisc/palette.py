# semdisc - Semantic discriminability toolkit
# Copyright (C) 2025 semdisc contributors
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""
Generación de paletas: asignación óptima de colores de la biblioteca a un conjunto de conceptos.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from semdisc.capacity import max_capacity
from semdisc.colorimetry import lab_to_srgb_hex
from semdisc.core_model import AssociationTable, ConceptSet, FeatureLibrary
from semdisc.errors import UnknownIdentifierError
from semdisc.stochastic import MonteCarloConfig, MonteCarloSimulator, encoded_accuracy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PaletteEntry:
    """Color asignado a un concepto."""

    concept: str
    feature_id: str
    lab: tuple[float, float, float]
    hex: str
    in_gamut: bool
    contrast: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "concept": self.concept,
            "feature_id": self.feature_id,
            "lab": list(self.lab),
            "hex": self.hex,
            "in_gamut": self.in_gamut,
            "contrast": self.contrast,
        }


@dataclass(frozen=True)
class PaletteOutput:
    """
    Paleta de un conjunto de conceptos.

    Attributes
    ----------
    entries : tuple[PaletteEntry, ...]
        Un color por concepto, en el orden de los conceptos.
    delta_s : float
        Distancia semántica generalizada (Monte Carlo) de la paleta.
    max_capacity : float
        Capacidad máxima del conjunto de conceptos.
    seed : int
        Semilla de la simulación.
    samples : int
        Iteraciones de la simulación.
    """

    entries: tuple[PaletteEntry, ...]
    delta_s: float
    max_capacity: float
    seed: int
    samples: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "palette": [entry.to_dict() for entry in self.entries],
            "delta_s": self.delta_s,
            "max_capacity": self.max_capacity,
            "seed": self.seed,
            "samples": self.samples,
        }


def generate_palette(table: AssociationTable, concepts: ConceptSet | Sequence[str], library: FeatureLibrary,
                     config: MonteCarloConfig | None = None) -> PaletteOutput:
    """
    Genera la paleta de un conjunto de conceptos con mérito equilibrado sobre toda la biblioteca.

    Los colores son exactamente las características de la asignación rectangular, en el orden de los conceptos.

    Parameters
    ----------
    table : AssociationTable
        Asociaciones de toda la biblioteca.
    concepts : ConceptSet | Sequence[str]
        Conceptos de la paleta.
    library : FeatureLibrary
        Biblioteca con coordenadas CIELAB de las características de la tabla.
    config : MonteCarloConfig | None
        Configuración de la simulación.

    Returns
    -------
    PaletteOutput
        Colores, contraste por concepto, ΔS y capacidad.

    Raises
    ------
    UnknownIdentifierError
        Si alguna característica elegida no tiene coordenadas en la biblioteca.
    """
    config = config or MonteCarloConfig()
    report = max_capacity(table=table, subset=concepts, config=config)
    selected = table.restrict(concepts=report.concepts, features=report.chosen_features)
    result = MonteCarloSimulator(config=config).run(table=selected)
    # Contraste de cada concepto respecto al color de la paleta, no al óptimo de la subtabla
    accuracy = encoded_accuracy(result=result, encoded=dict(zip(report.concepts, report.chosen_features)))

    entries = []
    for concept, feature_id in zip(report.concepts, report.chosen_features):
        lab = library.record(feature_id).lab
        if lab is None:
            raise UnknownIdentifierError(f"La característica '{feature_id}' no tiene coordenadas CIELAB")
        color = lab_to_srgb_hex(lab=lab)
        if not color.in_gamut:
            logger.warning("El color '%s' %s queda fuera de la gama sRGB; se recorta a %s", feature_id, lab,
                           color.hex)
        entries.append(PaletteEntry(
            concept=concept,
            feature_id=feature_id,
            lab=tuple(float(v) for v in lab),  # type: ignore[arg-type]
            hex=color.hex,
            in_gamut=color.in_gamut,
            contrast=accuracy["per_concept"][concept],
        ))
    return PaletteOutput(
        entries=tuple(entries),
        delta_s=result.delta_s,
        max_capacity=report.max_capacity,
        seed=config.seed,
        samples=config.samples,
    )
