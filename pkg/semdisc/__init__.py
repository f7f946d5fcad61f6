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
semdisc - Discriminabilidad semántica de paletas de colores.

Este paquete implementa la teoría de discriminabilidad semántica: modelo de asociaciones color-concepto,
funciones de mérito y asignación, distancia y contraste semánticos por Monte Carlo, capacidad de conjuntos de
conceptos y su análisis estadístico, con una CLI (`semdisc`) y un servidor MCP (`semdisc-mcp`).

Licencia: AGPL-3.0-or-later
"""

__version__ = "0.1.0"
__license__ = "AGPL-3.0-or-later"

from semdisc import data_source
from semdisc.analyzer import Analyzer
from semdisc.capacity import CapacityAnalyzer, CapacityReport, max_capacity
from semdisc.core_model import AssociationTable, ConceptDistribution, ConceptSet, FeatureLibrary, FeatureRecord
from semdisc.stochastic import MonteCarloConfig, MonteCarloResult, MonteCarloSimulator

__all__ = [
    "data_source",
    "Analyzer",
    "AssociationTable",
    "CapacityAnalyzer",
    "CapacityReport",
    "ConceptDistribution",
    "ConceptSet",
    "FeatureLibrary",
    "FeatureRecord",
    "MonteCarloConfig",
    "MonteCarloResult",
    "MonteCarloSimulator",
    "max_capacity",
]
