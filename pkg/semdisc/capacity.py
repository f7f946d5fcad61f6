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
Capacidad de conjuntos de conceptos sobre una biblioteca de características.

Este módulo implementa:
- La capacidad máxima: distancia semántica del conjunto de características elegido por asignación rectangular
  con mérito equilibrado sobre toda la biblioteca
- La distancia semántica de todos los pares de características para conjuntos de 2 conceptos
- Estadísticas alternativas de capacidad (máximo, media, mediana y proporción por encima de un umbral)
- La enumeración de subconjuntos de conceptos y su evaluación por lotes en paralelo
"""

import itertools
import logging
import math
import statistics
from collections.abc import Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, NamedTuple

import numpy as np

from semdisc.assignment import balanced_merit, solve_assignment
from semdisc.core_model import (
    AssociationTable,
    ConceptSet,
    distribution_difference,
    mean_entropy,
    normalize_all,
)
from semdisc.errors import InvalidArgumentError
from semdisc.stochastic import (
    SIGMA_SCALE,
    MonteCarloConfig,
    analytic_delta_s,
    generalized_semantic_distance,
    semantic_distance_analytic,
)

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.7
AUDIT_TOLERANCE = 1e-9


class PairDistance(NamedTuple):
    """Par de características (orientado: primera → primer concepto) y su ΔS analítica."""

    features: tuple[str, str]
    delta_s: float


@dataclass(frozen=True)
class CapacityStatistics:
    """
    Estadísticas de la distribución de ΔS de todos los pares de características.

    Attributes
    ----------
    max : float
        ΔS máxima.
    mean : float
        ΔS media.
    median : float
        ΔS mediana.
    threshold : float
        Umbral principal.
    threshold_proportion : float
        Fracción de ΔS estrictamente mayores que el umbral principal.
    sweep : dict[float, float]
        Fracción por cada umbral pedido (incluye el principal).
    """

    max: float
    mean: float
    median: float
    threshold: float
    threshold_proportion: float
    sweep: dict[float, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "max": self.max,
            "mean": self.mean,
            "median": self.median,
            "threshold": self.threshold,
            "threshold_proportion": self.threshold_proportion,
        }
        if len(self.sweep) > 1:
            payload["sweep"] = {str(t): p for t, p in self.sweep.items()}
        return payload


@dataclass(frozen=True)
class CapacityReport:
    """
    Capacidad de un subconjunto de conceptos.

    Attributes
    ----------
    concepts : tuple[str, ...]
        Conceptos del subconjunto.
    max_capacity : float
        ΔS del conjunto de características elegido, en [0, 1].
    chosen_features : tuple[str, ...]
        Característica elegida para cada concepto, en el orden de los conceptos.
    distribution_difference : float
        TV (n = 2) o GTV (n > 2) de las distribuciones de los conceptos sobre toda la biblioteca.
    mean_entropy : float
        Entropía media de esas distribuciones.
    statistics : CapacityStatistics | None
        Estadísticas exhaustivas de pares (solo n = 2 y si se piden).
    audit_gap : float | None
        Diferencia entre la ΔS exhaustiva máxima y la capacidad máxima (solo si se calculó la exhaustiva).
    """

    concepts: tuple[str, ...]
    max_capacity: float
    chosen_features: tuple[str, ...]
    distribution_difference: float
    mean_entropy: float
    statistics: CapacityStatistics | None = None
    audit_gap: float | None = None

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "concepts": list(self.concepts),
            "max_capacity": self.max_capacity,
            "chosen_features": list(self.chosen_features),
            "distribution_difference": self.distribution_difference,
            "mean_entropy": self.mean_entropy,
        }
        if self.statistics is not None:
            payload["statistics"] = self.statistics.to_dict()
        if self.audit_gap is not None:
            payload["audit_gap"] = self.audit_gap
        return payload


def max_capacity(table: AssociationTable, subset: ConceptSet | Sequence[str],
                 config: MonteCarloConfig | None = None) -> CapacityReport:
    """
    Capacidad máxima de un subconjunto de conceptos.

    Resuelve la asignación rectangular (N características × n conceptos) con mérito equilibrado y calcula la
    distancia semántica del conjunto elegido: analítica para n = 2 y Monte Carlo para n ≥ 3.

    Parameters
    ----------
    table : AssociationTable
        Tabla de asociaciones sobre toda la biblioteca.
    subset : ConceptSet | Sequence[str]
        Conceptos del subconjunto, presentes en la tabla.
    config : MonteCarloConfig | None
        Configuración Monte Carlo para n ≥ 3.

    Returns
    -------
    CapacityReport
        Capacidad, características elegidas y métricas de las distribuciones.

    Raises
    ------
    UnknownIdentifierError
        Si algún concepto no está en la tabla.
    InfeasibleAssignmentError
        Si N < n.
    """
    concepts = __concept_ids(subset=subset)
    sub = table.restrict(concepts=concepts)
    assignment = solve_assignment(merit=balanced_merit(table=sub))
    chosen = tuple(assignment.features)
    # Filas en el orden de los conceptos: la asignación óptima es la diagonal
    selected = sub.restrict(features=chosen)
    if len(concepts) == 2:
        capacity = semantic_distance_analytic(sub=selected)
    else:
        capacity = generalized_semantic_distance(table=selected, config=config).delta_s
    capacity = min(max(capacity, 0.0), 1.0)

    dists = normalize_all(table=sub)
    logger.debug("Capacidad de %s: %.6f con %s", concepts, capacity, chosen)
    return CapacityReport(
        concepts=tuple(concepts),
        max_capacity=float(capacity),
        chosen_features=chosen,
        distribution_difference=distribution_difference(dists=dists),
        mean_entropy=mean_entropy(dists=dists),
    )


def exhaustive_pair_semantics(table: AssociationTable, subset: ConceptSet | Sequence[str]) -> list[PairDistance]:
    """
    ΔS analítica de todos los pares no ordenados de características para un conjunto de 2 conceptos.

    Cada par se orienta de forma que el numerador sea no negativo (la mejor de las dos orientaciones; la ΔS
    no depende de la orientación). Los pares siguen el orden de la biblioteca (i < j).

    Returns
    -------
    list[PairDistance]
        C(N, 2) entradas.

    Raises
    ------
    InvalidArgumentError
        Si el subconjunto no tiene exactamente 2 conceptos.
    """
    concepts = __concept_ids(subset=subset)
    if len(concepts) != 2:
        raise InvalidArgumentError(
            f"La enumeración exhaustiva de pares necesita 2 conceptos, recibió {len(concepts)}"
        )
    sub = table.restrict(concepts=concepts)
    values = sub.values
    sigma_sq = (SIGMA_SCALE * values * (1.0 - values)) ** 2
    first, second = np.triu_indices(sub.shape[0], k=1)

    numerator = (values[first, 0] + values[second, 1]) - (values[first, 1] + values[second, 0])
    variance = sigma_sq[first].sum(axis=1) + sigma_sq[second].sum(axis=1)
    delta_s = analytic_delta_s(numerator=numerator, variance=variance)

    ids = sub.library.ids
    pairs = []
    for a, b, num, ds in zip(first, second, numerator, delta_s):
        features = (ids[a], ids[b]) if num >= 0.0 else (ids[b], ids[a])
        pairs.append(PairDistance(features=features, delta_s=float(ds)))
    return pairs


def capacity_statistics(pairs: Sequence[PairDistance] | Sequence[float],
                        threshold: float | Sequence[float] = DEFAULT_THRESHOLD) -> CapacityStatistics:
    """
    Máximo, media, mediana y proporción de ΔS estrictamente mayores que el umbral.

    Parameters
    ----------
    pairs : Sequence[PairDistance] | Sequence[float]
        Salida de exhaustive_pair_semantics (o directamente los valores de ΔS).
    threshold : float | Sequence[float]
        Umbral en [0, 1] o lista de umbrales; el primero es el principal.

    Returns
    -------
    CapacityStatistics
        Estadísticas y proporción por umbral.

    Raises
    ------
    InvalidArgumentError
        Si la lista está vacía o algún umbral está fuera de [0, 1].

    Examples
    --------
    >>> capacity_statistics([0.0, 1.0], threshold=0.5).mean
    0.5
    """
    if len(pairs) == 0:
        raise InvalidArgumentError("capacity_statistics necesita al menos un valor de ΔS")
    thresholds = [float(threshold)] if isinstance(threshold, (int, float)) else [float(t) for t in threshold]
    if not thresholds:
        raise InvalidArgumentError("Se necesita al menos un umbral")
    for t in thresholds:
        if not 0.0 <= t <= 1.0:
            raise InvalidArgumentError(f"El umbral debe estar en [0, 1]: {t}")

    values = np.array([p.delta_s if isinstance(p, PairDistance) else float(p) for p in pairs], dtype=float)
    sweep = {t: float(np.count_nonzero(values > t) / values.size) for t in thresholds}
    return CapacityStatistics(
        max=float(values.max()),
        mean=float(values.mean()),
        median=float(statistics.median(values.tolist())),
        threshold=thresholds[0],
        threshold_proportion=sweep[thresholds[0]],
        sweep=sweep,
    )


def enumerate_subsets(concepts: ConceptSet, k: int) -> Iterator[ConceptSet]:
    """
    Todos los subconjuntos de k conceptos en orden lexicográfico de posiciones.

    Raises
    ------
    InvalidArgumentError
        Si k no está en [2, m].

    Examples
    --------
    >>> sum(1 for _ in enumerate_subsets(ConceptSet(("a", "b", "c")), k=3))
    1
    """
    m = concepts.n
    if not 2 <= k <= m:
        raise InvalidArgumentError(f"El tamaño de subconjunto debe estar en [2, {m}], recibió {k}")
    return (ConceptSet(concepts=combo) for combo in itertools.combinations(concepts.concepts, k))


def subset_count(m: int, k: int) -> int:
    """Número de subconjuntos C(m, k)."""
    return math.comb(m, k)


class CapacityAnalyzer:
    """
    Evaluación de capacidad de subconjuntos de conceptos, individual o por lotes.

    Los subconjuntos de un lote se evalúan en paralelo con un pool de hilos; cada uno usa como flujo del
    generador su índice en la enumeración, de modo que el resultado depende solo de (semilla, subconjunto) y
    no del número de hilos. Los resultados se emiten en el orden de enumeración.

    Attributes
    ----------
    config : MonteCarloConfig
        Configuración Monte Carlo (semilla, muestras, hilos).
    threshold : float | Sequence[float]
        Umbral (o umbrales) de las estadísticas exhaustivas.
    """

    def __init__(self, config: MonteCarloConfig | None = None,
                 threshold: float | Sequence[float] = DEFAULT_THRESHOLD) -> None:
        self.config = config or MonteCarloConfig()
        self.threshold = threshold

    def evaluate(self, table: AssociationTable, subset: ConceptSet | Sequence[str], index: int = 0,
                 exhaustive: bool = False) -> CapacityReport:
        """
        Capacidad de un subconjunto con su flujo aleatorio propio.

        Parameters
        ----------
        table : AssociationTable
            Tabla completa.
        subset : ConceptSet | Sequence[str]
            Conceptos del subconjunto.
        index : int
            Índice del subconjunto en la enumeración (flujo del generador).
        exhaustive : bool
            Para n = 2, añade las estadísticas exhaustivas y la auditoría de la selección.

        Returns
        -------
        CapacityReport
            Informe del subconjunto.
        """
        config = replace(self.config, stream=index, workers=1)
        report = max_capacity(table=table, subset=subset, config=config)
        if not exhaustive or len(report.concepts) != 2:
            return report

        pairs = exhaustive_pair_semantics(table=table, subset=report.concepts)
        stats = capacity_statistics(pairs=pairs, threshold=self.threshold)
        gap = stats.max - report.max_capacity
        if gap > AUDIT_TOLERANCE:
            best = max(pairs, key=lambda p: p.delta_s)
            logger.warning(
                "La selección por mérito equilibrado de %s (%s, ΔS=%.6f) no alcanza el máximo exhaustivo "
                "(%s, ΔS=%.6f)", list(report.concepts), list(report.chosen_features), report.max_capacity,
                list(best.features), stats.max,
            )
        return replace(report, statistics=stats, audit_gap=float(gap))

    def batch(self, table: AssociationTable, concepts: ConceptSet, k: int,
              exhaustive: bool = False) -> Iterator[CapacityReport]:
        """
        Evalúa todos los subconjuntos de k conceptos y emite los informes en orden de enumeración.

        Los subconjuntos se envían al pool por ventanas para no acumular todos los resultados en memoria.

        Raises
        ------
        InvalidArgumentError
            Si k no está en [2, m].
        """
        subsets = enumerate_subsets(concepts=concepts, k=k)
        total = subset_count(m=concepts.n, k=k)
        logger.info("Evaluando %d subconjuntos de %d conceptos con %d hilos", total, k, self.config.workers)
        window = max(1, self.config.workers) * 4

        with ThreadPoolExecutor(max_workers=self.config.workers) as executor:
            index = 0
            while True:
                chunk = list(itertools.islice(subsets, window))
                if not chunk:
                    break
                futures = [
                    executor.submit(self.evaluate, table, subset, index + offset, exhaustive)
                    for offset, subset in enumerate(chunk)
                ]
                for future in futures:
                    yield future.result()
                index += len(chunk)

    def audit(self, reports: Sequence[CapacityReport]) -> list[CapacityReport]:
        """Informes en los que la selección por mérito no alcanza el máximo exhaustivo."""
        return [r for r in reports if r.audit_gap is not None and r.audit_gap > AUDIT_TOLERANCE]


def __concept_ids(subset: ConceptSet | Sequence[str]) -> tuple[str, ...]:
    return subset.concepts if isinstance(subset, ConceptSet) else tuple(str(c) for c in subset)
