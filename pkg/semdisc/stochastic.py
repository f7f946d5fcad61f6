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
Modelo de ruido, distancia semántica y simulación Monte Carlo de la inferencia de asignaciones.

Este módulo implementa:
- El modelo de ruido σ_ij = 1.4·a_ij·(1 − a_ij) sobre las asociaciones
- La distancia semántica analítica para 2 conceptos y 2 características
- La distancia semántica generalizada, el contraste semántico y la distribución de respuestas predicha,
  todas ellas calculadas sobre las mismas iteraciones de perturbar-y-resolver
- La precisión esperada de una asignación codificada arbitraria

Las iteraciones se agrupan en bloques de tamaño fijo. Cada bloque usa un generador Philox (basado en
contador) con clave (flujo, semilla) y contador inicial igual al índice de bloque, de modo que el valor
muestreado para una iteración y una celda no depende del número de hilos.
"""

import itertools
import logging
import math
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import erfc, ndtri

from semdisc.assignment import (
    Assignment,
    MeritKind,
    assignment_from_rows,
    merit_matrix,
    merit_values,
    permutation_totals,
)
from semdisc.core_model import AssociationTable
from semdisc.errors import InvalidArgumentError, ShapeError, UnknownIdentifierError, ValidationError

logger = logging.getLogger(__name__)

# Ajuste de la desviación típica de las asociaciones
SIGMA_SCALE = 1.4
DEFAULT_SAMPLES = 1000
DEFAULT_SEED = 0
# Iteraciones por bloque de contador; fijo para que las muestras no dependan del reparto entre hilos
BLOCK_SIZE = 256
# Hasta este n se enumeran las n! permutaciones de forma vectorizada
MAX_ENUMERATION_SIZE = 6

PerturbTarget = Literal["ratings", "merits"]


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """
    Desviaciones típicas por celda σ_ij = 1.4·a_ij·(1 − a_ij).

    Attributes
    ----------
    sigma : np.ndarray
        Matriz N × n con σ_ij ∈ [0, 0.35]; σ_ij = 0 solo si a_ij ∈ {0, 1}.
    """

    sigma: np.ndarray

    @classmethod
    def from_table(cls, table: AssociationTable) -> "NoiseModel":
        values = table.values
        return cls(sigma=SIGMA_SCALE * values * (1.0 - values))


@dataclass(frozen=True)
class MonteCarloConfig:
    """
    Configuración de una simulación Monte Carlo.

    Attributes
    ----------
    samples : int
        Número de iteraciones (por defecto 1000).
    seed : int
        Semilla maestra, entero sin signo de 64 bits.
    workers : int
        Hilos usados para repartir los bloques de iteraciones.
    clamp : bool
        Si True, recorta las asociaciones perturbadas a [0, 1].
    perturb : str
        "ratings" perturba las asociaciones y recalcula el mérito; "merits" perturba el mérito directamente.
    merit : str
        Función de mérito usada en cada iteración: "balanced" o "isolated".
    stream : int
        Identificador de flujo (p. ej. índice de subconjunto) que separa simulaciones con la misma semilla.
    """

    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    workers: int = 1
    clamp: bool = False
    perturb: PerturbTarget = "ratings"
    merit: MeritKind = "balanced"
    stream: int = 0

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise InvalidArgumentError(f"samples debe ser >= 1, recibió {self.samples}")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError(f"La semilla debe ser un entero sin signo de 64 bits: {self.seed}")
        if not 0 <= self.stream < 2**64:
            raise InvalidArgumentError(f"El flujo debe ser un entero sin signo de 64 bits: {self.stream}")
        if self.workers < 1:
            raise InvalidArgumentError(f"workers debe ser >= 1, recibió {self.workers}")
        if self.perturb not in ("ratings", "merits"):
            raise InvalidArgumentError(f"Objetivo de perturbación desconocido: {self.perturb}")
        if self.merit not in ("balanced", "isolated"):
            raise InvalidArgumentError(f"Tipo de mérito desconocido: {self.merit}")


@dataclass(frozen=True, eq=False)
class MonteCarloResult:
    """
    Resultado de una simulación Monte Carlo sobre una tabla n × n.

    Attributes
    ----------
    assignment_frequencies : dict[tuple[int, ...], int]
        Recuento por asignación; la clave es la fila asignada a cada concepto, en el orden de los conceptos.
    modal_proportion : float
        p, proporción de la asignación más frecuente.
    delta_s : float
        Distancia semántica generalizada (n!·p − 1) / (n! − 1).
    contrast : dict[str, float]
        Contraste semántico por característica.
    optimal : Assignment
        Asignación óptima sobre las asociaciones medias.
    prediction : np.ndarray
        Proporción de iteraciones en que la característica i se asignó al concepto j.
    samples : int
        Número de iteraciones.
    seed : int
        Semilla maestra.
    feature_ids : tuple[str, ...]
        Características (filas) de la tabla.
    concept_ids : tuple[str, ...]
        Conceptos (columnas) de la tabla.
    """

    assignment_frequencies: dict[tuple[int, ...], int]
    modal_proportion: float
    delta_s: float
    contrast: dict[str, float]
    optimal: Assignment
    prediction: np.ndarray
    samples: int
    seed: int
    feature_ids: tuple[str, ...] = field(default=())
    concept_ids: tuple[str, ...] = field(default=())

    @property
    def modal_assignment(self) -> dict[str, str]:
        """Asignación más frecuente como diccionario concepto → característica."""
        key = max(self.assignment_frequencies.items(), key=lambda item: (item[1], [-r for r in item[0]]))[0]
        return self.__key_to_mapping(key=key)

    def to_dict(self) -> dict[str, Any]:
        """Representación JSON estable del resultado."""
        frequencies = sorted(self.assignment_frequencies.items(), key=lambda item: (-item[1], item[0]))
        return {
            "concepts": list(self.concept_ids),
            "features": list(self.feature_ids),
            "samples": self.samples,
            "seed": self.seed,
            "delta_s": self.delta_s,
            "modal_proportion": self.modal_proportion,
            "modal_assignment": self.modal_assignment,
            "optimal_assignment": self.optimal.to_dict(),
            "contrast": dict(self.contrast),
            "assignment_frequencies": [
                {"assignment": self.__key_to_mapping(key=key), "count": count} for key, count in frequencies
            ],
        }

    def __key_to_mapping(self, key: tuple[int, ...]) -> dict[str, str]:
        return {concept: self.feature_ids[row] for concept, row in zip(self.concept_ids, key)}


class MonteCarloSimulator:
    """
    Simulador de inferencia de asignaciones con asociaciones ruidosas.

    Cada iteración perturba las asociaciones medias con el modelo de ruido, recalcula el mérito y resuelve el
    problema de asignación. Una única pasada alimenta la distancia semántica generalizada, el contraste
    semántico y la distribución de respuestas predicha.

    Attributes
    ----------
    config : MonteCarloConfig
        Configuración de la simulación.
    """

    def __init__(self, config: MonteCarloConfig | None = None) -> None:
        self.config = config or MonteCarloConfig()

    def run(self, table: AssociationTable) -> MonteCarloResult:
        """
        Ejecuta la simulación sobre una tabla cuadrada n × n.

        El proceso incluye:
        1. Resolver la asignación óptima sobre las asociaciones medias con el mérito configurado
        2. Perturbar, recalcular el mérito y resolver en cada iteración (por bloques, en paralelo)
        3. Contar las asignaciones y las veces que cada característica recibe cada concepto
        4. Calcular p, ΔS y el contraste de cada característica

        Parameters
        ----------
        table : AssociationTable
            Tabla n × n con n ≥ 2.

        Returns
        -------
        MonteCarloResult
            Resultado, función determinista de (tabla, configuración).

        Raises
        ------
        ShapeError
            Si la tabla no es cuadrada.
        """
        n_features, n = table.shape
        if n_features != n:
            raise ShapeError(f"La simulación necesita una tabla cuadrada, recibió {n_features} × {n}")

        config = self.config
        merit = merit_matrix(table=table, kind=config.merit)
        # Mismo resolvedor que las iteraciones: con ruido nulo cada iteración reproduce la asignación óptima
        optimal = assignment_from_rows(merit=merit, rows=self.__solve_stack(merits=merit.values[np.newaxis])[0])
        noise = NoiseModel.from_table(table=table)
        logger.debug("Monte Carlo: n=%d, samples=%d, seed=%d, workers=%d", n, config.samples, config.seed,
                     config.workers)

        blocks = [(start, min(BLOCK_SIZE, config.samples - start)) for start in range(0, config.samples, BLOCK_SIZE)]
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            outputs = list(executor.map(
                lambda block: self.__run_block(table=table, noise=noise, start=block[0], count=block[1]), blocks
            ))
        chosen = np.concatenate([block_chosen for block_chosen, _ in outputs], axis=0)
        clipped = sum(block_clipped for _, block_clipped in outputs)
        if clipped:
            logger.warning("Recortadas %d asociaciones perturbadas a [0, 1] en %d iteraciones", clipped,
                           config.samples)

        keys, counts = np.unique(chosen, axis=0, return_counts=True)
        frequencies = {tuple(int(r) for r in key): int(count) for key, count in zip(keys, counts)}
        modal_proportion = int(counts.max()) / config.samples

        # prediction_counts[i, j]: iteraciones en que el concepto j recibió la característica i
        prediction_counts = np.zeros((n, n), dtype=np.int64)
        for j in range(n):
            prediction_counts[:, j] = np.bincount(chosen[:, j], minlength=n)
        prediction = prediction_counts / config.samples

        feature_ids = tuple(table.library.ids)
        contrast = {}
        for j, row in enumerate(optimal.feature_indices):
            contrast[feature_ids[row]] = float(prediction[row, j])
        contrast = {fid: contrast[fid] for fid in feature_ids}

        return MonteCarloResult(
            assignment_frequencies=frequencies,
            modal_proportion=modal_proportion,
            delta_s=delta_s_from_proportion(p=modal_proportion, n=n),
            contrast=contrast,
            optimal=optimal,
            prediction=prediction,
            samples=config.samples,
            seed=config.seed,
            feature_ids=feature_ids,
            concept_ids=table.concepts.concepts,
        )

    def __run_block(self, table: AssociationTable, noise: NoiseModel, start: int, count: int
                    ) -> tuple[np.ndarray, int]:
        """
        Ejecuta un bloque de iteraciones.

        Returns
        -------
        tuple[np.ndarray, int]
            Matriz (count, n) con la fila elegida para cada concepto en cada iteración y número de asociaciones
            recortadas.
        """
        config = self.config
        rng = block_generator(seed=config.seed, stream=config.stream, block=start // BLOCK_SIZE)
        clipped = 0

        if config.perturb == "ratings":
            perturbed = sample_perturbed_table(table=table, noise=noise, rng=rng, size=count)
            if config.clamp:
                clipped = int(np.count_nonzero((perturbed < 0.0) | (perturbed > 1.0)))
                perturbed = np.clip(perturbed, 0.0, 1.0)
            merits = merit_values(values=perturbed, kind=config.merit)
        else:
            base = merit_values(values=table.values, kind=config.merit)
            merits = base + noise.sigma * ndtri(open_uniform(rng=rng, shape=(count, *base.shape)))

        return self.__solve_stack(merits=merits), clipped

    @staticmethod
    def __solve_stack(merits: np.ndarray) -> np.ndarray:
        """
        Resuelve una pila (S, n, n) de problemas de asignación y devuelve la fila elegida para cada concepto.

        Con n <= 6 se enumeran las n! permutaciones y los empates van a la primera en orden lexicográfico; con
        n mayor se usa el orden de recorrido de scipy.
        """
        count, _, n = merits.shape
        if n <= MAX_ENUMERATION_SIZE:
            permutations = permutation_table(n=n)
            best = permutation_totals(merits=merits, permutations=permutations).argmax(axis=1)
            return permutations[best]

        chosen = np.empty((count, n), dtype=np.int64)
        for s in range(count):
            rows, cols = linear_sum_assignment(merits[s], maximize=True)
            chosen[s, cols] = rows
        return chosen


def block_generator(seed: int, stream: int, block: int) -> np.random.Generator:
    """
    Generador Philox del bloque indicado.

    La clave combina flujo y semilla; la palabra alta del contador de 256 bits es el índice de bloque, por lo que
    los bloques nunca comparten contador.
    """
    bit_generator = np.random.Philox(key=(stream << 64) | seed, counter=block << 192)
    return np.random.Generator(bit_generator)


def open_uniform(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Uniformes en el intervalo abierto (0, 1): punto medio de la rejilla de 2^-53."""
    return rng.random(size=shape) + 0.5 / 2**53


def permutation_table(n: int) -> np.ndarray:
    """Las n! permutaciones de range(n) en orden lexicográfico, como matriz (n!, n)."""
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64)


def delta_s_from_proportion(p: float, n: int) -> float:
    """Reescala la proporción modal p a ΔS = (n!·p − 1) / (n! − 1)."""
    factorial = math.factorial(n)
    return (factorial * p - 1.0) / (factorial - 1.0)


def standard_normal_cdf(z: float) -> float:
    """
    Función de distribución de la normal estándar, Φ(z) = erfc(−z/√2) / 2.
    """
    return float(0.5 * erfc(-z / math.sqrt(2.0)))


def semantic_distance_analytic(sub: AssociationTable) -> float:
    """
    Distancia semántica de 2 conceptos y 2 características.

    Con x̄ las asociaciones medias en orden de filas (x̄1 = a_11, x̄2 = a_12, x̄3 = a_21, x̄4 = a_22):
    Prob(Δx > 0) = Φ(((x̄1 + x̄4) − (x̄2 + x̄3)) / √(σ1² + σ2² + σ3² + σ4²))
    y ΔS = |2·Prob(Δx > 0) − 1|.

    Si las cuatro σ son nulas, ΔS es 1 cuando el numerador no es cero y 0 cuando lo es.

    Raises
    ------
    ShapeError
        Si la tabla no es 2 × 2.
    """
    if sub.shape != (2, 2):
        raise ShapeError(f"La distancia semántica analítica necesita una tabla 2 × 2, recibió {sub.shape}")
    numerator, variance = pair_numerator_variance(values=sub.values)
    return float(analytic_delta_s(numerator=numerator, variance=variance))


def pair_numerator_variance(values: np.ndarray) -> tuple[Any, Any]:
    """
    Numerador (x̄1 + x̄4) − (x̄2 + x̄3) y varianza total de una o varias tablas 2 × 2 (forma (..., 2, 2)).
    """
    values = np.asarray(values, dtype=float)
    numerator = (values[..., 0, 0] + values[..., 1, 1]) - (values[..., 0, 1] + values[..., 1, 0])
    sigma = SIGMA_SCALE * values * (1.0 - values)
    variance = (sigma**2).sum(axis=(-2, -1))
    return numerator, variance


def analytic_delta_s(numerator: Any, variance: Any) -> Any:
    """ΔS vectorizado a partir del numerador y la varianza (límite degenerado para varianza nula)."""
    numerator = np.asarray(numerator, dtype=float)
    variance = np.asarray(variance, dtype=float)
    degenerate = variance == 0.0
    safe = np.where(degenerate, 1.0, variance)
    prob_positive = 0.5 * erfc(-(numerator / np.sqrt(safe)) / math.sqrt(2.0))
    return np.where(degenerate, (numerator != 0.0).astype(float), np.abs(2.0 * prob_positive - 1.0))


def sample_perturbed_table(table: AssociationTable, noise: NoiseModel, rng: np.random.Generator,
                           size: int | None = None, clamp: bool = False) -> np.ndarray:
    """
    Muestra asociaciones perturbadas: cada celda ~ Normal(a_ij, σ_ij), de forma independiente.

    Las normales se obtienen por inversión de la función de distribución sobre uniformes del generador, así que
    el resultado es determinista dado el estado del generador. Por defecto no se recorta a [0, 1].

    Parameters
    ----------
    table : AssociationTable
        Asociaciones medias.
    noise : NoiseModel
        Desviaciones típicas por celda.
    rng : np.random.Generator
        Flujo aleatorio.
    size : int | None
        Número de tablas a muestrear; None devuelve una única matriz N × n.
    clamp : bool
        Recorta las muestras a [0, 1].

    Returns
    -------
    np.ndarray
        Matriz N × n o pila (size, N, n).
    """
    if noise.sigma.shape != table.shape:
        raise ShapeError(f"El modelo de ruido tiene forma {noise.sigma.shape}, la tabla {table.shape}")
    shape = table.shape if size is None else (size, *table.shape)
    samples = table.values + noise.sigma * ndtri(open_uniform(rng=rng, shape=shape))
    if clamp:
        clipped = int(np.count_nonzero((samples < 0.0) | (samples > 1.0)))
        if clipped:
            logger.debug("Recortadas %d asociaciones perturbadas a [0, 1]", clipped)
        samples = np.clip(samples, 0.0, 1.0)
    return samples


def generalized_semantic_distance(table: AssociationTable, config: MonteCarloConfig | None = None
                                  ) -> MonteCarloResult:
    """
    Distancia semántica generalizada de una tabla n × n por Monte Carlo.

    Returns
    -------
    MonteCarloResult
        Frecuencias de asignación, p, ΔS, contraste y asignación óptima.
    """
    return MonteCarloSimulator(config=config).run(table=table)


def semantic_contrast(table: AssociationTable, config: MonteCarloConfig | None = None
                      ) -> tuple[dict[str, float], Assignment]:
    """
    Contraste semántico: proporción de iteraciones en que cada característica recibe su concepto óptimo.

    Returns
    -------
    tuple[dict[str, float], Assignment]
        Contraste por característica y asignación óptima (mérito configurado sobre las medias).
    """
    result = MonteCarloSimulator(config=config).run(table=table)
    return result.contrast, result.optimal


def predict_response_distribution(table: AssociationTable, config: MonteCarloConfig | None = None) -> np.ndarray:
    """
    Distribución de respuestas predicha: entrada (i, j) = proporción de iteraciones en que la característica i
    se asignó al concepto j. Filas y columnas suman 1.
    """
    return MonteCarloSimulator(config=config).run(table=table).prediction


def mapping_accuracy(table: AssociationTable, encoded: Mapping[str, str], config: MonteCarloConfig | None = None
                     ) -> dict[str, Any]:
    """
    Simula la tabla y devuelve la precisión esperada de la asignación codificada (ver encoded_accuracy).
    """
    result = MonteCarloSimulator(config=config).run(table=table)
    return encoded_accuracy(result=result, encoded=encoded)


def encoded_accuracy(result: MonteCarloResult, encoded: Mapping[str, str]) -> dict[str, Any]:
    """
    Precisión esperada de una asignación codificada arbitraria (concepto → característica).

    Generaliza el contraste semántico a una asignación definida por el diseñador: para cada concepto, la
    proporción de iteraciones en que recibió la característica codificada, y la proporción de iteraciones que
    reproducen la asignación completa.

    Parameters
    ----------
    result : MonteCarloResult
        Resultado de la simulación sobre la tabla n × n.
    encoded : Mapping[str, str]
        Biyección concepto → característica sobre la tabla.

    Returns
    -------
    dict[str, Any]
        "per_concept" (concepto → proporción) y "full_mapping" (proporción de la asignación completa).

    Raises
    ------
    ValidationError
        Si la asignación no es una biyección sobre los conceptos y características de la tabla.
    """
    if set(encoded) != set(result.concept_ids):
        raise ValidationError(f"La asignación codificada debe cubrir los conceptos {list(result.concept_ids)}")
    if sorted(encoded.values()) != sorted(result.feature_ids):
        raise ValidationError("La asignación codificada debe usar cada característica exactamente una vez")
    rows = {fid: i for i, fid in enumerate(result.feature_ids)}
    key = []
    per_concept = {}
    for j, concept in enumerate(result.concept_ids):
        feature = encoded[concept]
        if feature not in rows:
            raise UnknownIdentifierError(f"Característica desconocida: '{feature}'")
        key.append(rows[feature])
        per_concept[concept] = float(result.prediction[rows[feature], j])
    full = result.assignment_frequencies.get(tuple(key), 0) / result.samples
    return {"per_concept": per_concept, "full_mapping": full}
