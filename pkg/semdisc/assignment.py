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
Funciones de mérito y resolución de problemas de asignación.

Este módulo implementa:
- Mérito aislado: m_ij = a_ij
- Mérito equilibrado: m_ij = a_ij − max_{k≠j} a_ik
- Resolución exacta del problema de asignación (cuadrado o rectangular, N ≥ n) maximizando el mérito total
- Un oráculo de fuerza bruta para instancias pequeñas

Cada característica se asigna como mucho a un concepto. Los méritos pueden ser negativos.
"""

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import linear_sum_assignment

from semdisc.core_model import AssociationTable, ConceptSet
from semdisc.errors import InfeasibleAssignmentError, InvalidArgumentError, ShapeError, ValidationError

logger = logging.getLogger(__name__)

MeritKind = Literal["isolated", "balanced"]

# Límites del oráculo de fuerza bruta
MAX_BRUTE_FORCE_CONCEPTS = 8
MAX_BRUTE_FORCE_FEATURES = 12


@dataclass(frozen=True, eq=False)
class MeritMatrix:
    """
    Puntuaciones de mérito m_ij (filas: características, columnas: conceptos).

    Attributes
    ----------
    values : np.ndarray
        Matriz N × n de valores finitos con N ≥ n.
    kind : str
        "isolated" o "balanced".
    feature_ids : tuple[str, ...]
        Identificadores de las filas.
    concept_ids : tuple[str, ...]
        Identificadores de las columnas.
    """

    values: np.ndarray
    kind: MeritKind
    feature_ids: tuple[str, ...]
    concept_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 2:
            raise ShapeError(f"La matriz de mérito debe ser bidimensional, tiene forma {values.shape}")
        n_features, n_concepts = values.shape
        if (n_features, n_concepts) != (len(self.feature_ids), len(self.concept_ids)):
            raise ShapeError("Los identificadores no coinciden con la forma de la matriz de mérito")
        if n_concepts < 1:
            raise ShapeError("La matriz de mérito necesita al menos un concepto")
        if n_features < n_concepts:
            raise InfeasibleAssignmentError(
                f"No hay asignación inyectiva posible: {n_features} características para {n_concepts} conceptos"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("La matriz de mérito contiene valores no finitos")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "feature_ids", tuple(self.feature_ids))
        object.__setattr__(self, "concept_ids", tuple(self.concept_ids))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape  # type: ignore[return-value]


@dataclass(frozen=True)
class Assignment:
    """
    Asignación inyectiva concepto → característica con su mérito total.

    Attributes
    ----------
    mapping : dict[str, str]
        Concepto → característica, en el orden de los conceptos.
    total_merit : float
        Suma de m_ij sobre los pares elegidos.
    feature_indices : tuple[int, ...]
        Fila elegida para cada concepto, en el orden de los conceptos (clave canónica).
    """

    mapping: dict[str, str]
    total_merit: float
    feature_indices: tuple[int, ...]

    @property
    def features(self) -> list[str]:
        """Características elegidas en el orden de los conceptos."""
        return list(self.mapping.values())

    def to_dict(self) -> dict:
        return {"mapping": dict(self.mapping), "total_merit": self.total_merit}


def isolated_merit(table: AssociationTable) -> MeritMatrix:
    """
    Mérito aislado: usa directamente la fuerza de asociación (m_ij = a_ij).

    Parameters
    ----------
    table : AssociationTable
        Tabla de asociaciones.

    Returns
    -------
    MeritMatrix
        Matriz con la misma forma que la tabla y kind="isolated".
    """
    return MeritMatrix(
        values=merit_values(values=table.values, kind="isolated"),
        kind="isolated",
        feature_ids=tuple(table.library.ids),
        concept_ids=table.concepts.concepts,
    )


def balanced_merit(table: AssociationTable) -> MeritMatrix:
    """
    Mérito equilibrado: asociación del par menos la del siguiente concepto más asociado a esa característica.

    m_ij = a_ij − max_{k≠j} a_ik

    Raises
    ------
    InvalidArgumentError
        Si la tabla tiene menos de dos conceptos.
    """
    return MeritMatrix(
        values=merit_values(values=table.values, kind="balanced"),
        kind="balanced",
        feature_ids=tuple(table.library.ids),
        concept_ids=table.concepts.concepts,
    )


def merit_matrix(table: AssociationTable, kind: MeritKind = "balanced") -> MeritMatrix:
    """Matriz de mérito del tipo indicado ("balanced" o "isolated")."""
    if kind == "isolated":
        return isolated_merit(table=table)
    if kind != "balanced":
        raise InvalidArgumentError(f"Tipo de mérito desconocido: {kind}")
    return balanced_merit(table=table)


def merit_values(values: np.ndarray, kind: MeritKind = "balanced") -> np.ndarray:
    """
    Calcula el mérito sobre una matriz (o pila de matrices) de asociaciones arbitraria.

    Se usa tanto con asociaciones medias como con asociaciones perturbadas, que pueden salir de [0, 1].
    Acepta arrays de forma (..., N, n); el mérito se calcula por fila sobre el último eje.

    Parameters
    ----------
    values : np.ndarray
        Asociaciones (..., N, n).
    kind : str
        "isolated" o "balanced".

    Returns
    -------
    np.ndarray
        Méritos con la misma forma.
    """
    values = np.asarray(values, dtype=float)
    if kind == "isolated":
        return values.copy()
    if kind != "balanced":
        raise InvalidArgumentError(f"Tipo de mérito desconocido: {kind}")
    n = values.shape[-1]
    if n < 2:
        raise InvalidArgumentError(f"El mérito equilibrado necesita al menos 2 conceptos, recibió {n}")

    # Máximo de los competidores: el mayor valor de la fila salvo en la columna del máximo, donde es el segundo
    order = np.sort(values, axis=-1)
    row_max = order[..., -1:]
    row_second = order[..., -2:-1]
    is_max = values == row_max
    # Con empates en el máximo, el competidor de una columna máxima es ese mismo máximo
    ties = is_max.sum(axis=-1, keepdims=True) > 1
    competitor = np.where(is_max & ~ties, row_second, row_max)
    return values - competitor


def solve_assignment(merit: MeritMatrix, concepts: ConceptSet | Sequence[str] | None = None) -> Assignment:
    """
    Resuelve el problema de asignación maximizando el mérito total.

    Usa el algoritmo de caminos aumentantes más cortos de scipy (variante Jonker-Volgenant), exacto para
    instancias cuadradas (N = n) y rectangulares (N > n). Entre óptimos de igual mérito el resultado lo fija el
    orden determinista de recorrido del algoritmo (características en orden de biblioteca, conceptos en orden
    del conjunto), de modo que las ejecuciones son reproducibles.

    Parameters
    ----------
    merit : MeritMatrix
        Matriz de mérito N × n.
    concepts : ConceptSet | Sequence[str] | None
        Identificadores de los conceptos (por defecto los de la matriz).

    Returns
    -------
    Assignment
        Asignación inyectiva de mérito máximo.

    Raises
    ------
    InfeasibleAssignmentError
        Si N < n.
    """
    concept_ids = __resolve_concepts(merit=merit, concepts=concepts)
    rows, cols = linear_sum_assignment(merit.values, maximize=True)
    chosen = [0] * merit.shape[1]
    for row, col in zip(rows, cols):
        chosen[int(col)] = int(row)
    return assignment_from_rows(merit=merit, rows=chosen, concepts=concept_ids)


def brute_force_assignment(merit: MeritMatrix, concepts: ConceptSet | Sequence[str] | None = None) -> Assignment:
    """
    Oráculo exhaustivo: enumera todas las asignaciones inyectivas y devuelve una de mérito máximo.

    Los empates se resuelven a favor de la primera asignación en orden lexicográfico de filas. Pensado para
    verificar solve_assignment en tests.

    Raises
    ------
    InvalidArgumentError
        Si n > 8 o N > 12.
    """
    n_features, n_concepts = merit.shape
    if n_concepts > MAX_BRUTE_FORCE_CONCEPTS or n_features > MAX_BRUTE_FORCE_FEATURES:
        raise InvalidArgumentError(
            f"Instancia demasiado grande para fuerza bruta: N={n_features}, n={n_concepts} "
            f"(máximo N={MAX_BRUTE_FORCE_FEATURES}, n={MAX_BRUTE_FORCE_CONCEPTS})"
        )
    concept_ids = __resolve_concepts(merit=merit, concepts=concepts)
    columns = np.arange(n_concepts)
    best_total = -np.inf
    best: tuple[int, ...] = ()
    for rows in itertools.permutations(range(n_features), n_concepts):
        total = merit.values[list(rows), columns].sum()
        if total > best_total:
            best_total = total
            best = rows
    return assignment_from_rows(merit=merit, rows=list(best), concepts=concept_ids)


def permutation_totals(merits: np.ndarray, permutations: np.ndarray) -> np.ndarray:
    """
    Mérito total de cada permutación para una pila de matrices cuadradas.

    Parameters
    ----------
    merits : np.ndarray
        Pila de méritos (S, n, n).
    permutations : np.ndarray
        Permutaciones (P, n); permutations[p, j] es la fila asignada al concepto j.

    Returns
    -------
    np.ndarray
        Matriz (S, P) con el mérito total de cada permutación en cada muestra.
    """
    columns = np.arange(permutations.shape[1])
    return merits[:, permutations, columns].sum(axis=-1)


def assignment_from_rows(merit: MeritMatrix, rows: Sequence[int],
                         concepts: Sequence[str] | None = None) -> Assignment:
    """
    Construye la asignación que da al concepto j la fila rows[j] de la matriz de mérito.

    Raises
    ------
    ShapeError
        Si no hay una fila por concepto.
    ValidationError
        Si alguna fila se repite o no existe.
    """
    chosen = [int(row) for row in rows]
    concept_ids = merit.concept_ids if concepts is None else tuple(concepts)
    if len(chosen) != len(concept_ids):
        raise ShapeError(f"Se esperaban {len(concept_ids)} filas, se recibieron {len(chosen)}")
    if len(set(chosen)) != len(chosen) or not all(0 <= row < merit.shape[0] for row in chosen):
        raise ValidationError(f"Filas de asignación inválidas: {chosen}")
    total = float(sum(merit.values[row, col] for col, row in enumerate(chosen)))
    mapping = {concept: merit.feature_ids[row] for concept, row in zip(concept_ids, chosen)}
    return Assignment(mapping=mapping, total_merit=total, feature_indices=tuple(chosen))


def __resolve_concepts(merit: MeritMatrix, concepts: ConceptSet | Sequence[str] | None) -> tuple[str, ...]:
    if concepts is None:
        return merit.concept_ids
    concept_ids = concepts.concepts if isinstance(concepts, ConceptSet) else tuple(str(c) for c in concepts)
    if len(concept_ids) != merit.shape[1]:
        raise ShapeError(f"Se esperaban {merit.shape[1]} conceptos, se recibieron {len(concept_ids)}")
    return concept_ids


