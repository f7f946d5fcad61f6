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
Modelo de datos y matemática determinista de distribuciones.

Este módulo contiene los tipos básicos del paquete (biblioteca de características, conjunto de conceptos,
tabla de asociaciones y distribución de un concepto) y las operaciones puras sobre ellos:
- Normalización de asociaciones a distribuciones de probabilidad
- Entropía y entropía media (en nats)
- Variación total (TV) y variación total generalizada (GTV)
- Probabilidad de error del estimador de máxima verosimilitud
- Puntuaciones de especificidad

Todas las operaciones son funciones puras sobre entradas inmutables.
"""

import logging
from collections.abc import Sequence
from dataclasses import InitVar, dataclass, field

import numpy as np
import pandas as pd
from scipy.special import entr

from semdisc.errors import (
    DegenerateInputError,
    InvalidArgumentError,
    ShapeError,
    UnknownIdentifierError,
    ValidationError,
)

logger = logging.getLogger(__name__)

# Tolerancia para la suma de una distribución normalizada
SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FeatureRecord:
    """
    Característica candidata (un color) de la biblioteca.

    Attributes
    ----------
    id : str
        Identificador único y no vacío.
    lab : tuple[float, float, float] | None
        Coordenadas CIELAB (L*, a*, b*) opcionales.
    sorted_position : int | None
        Posición de la característica al ordenar la biblioteca por tono y croma.
    """

    id: str
    lab: tuple[float, float, float] | None = None
    sorted_position: int | None = None

    def __post_init__(self) -> None:
        if not self.id or not self.id.strip():
            raise ValidationError("El identificador de una característica no puede estar vacío")
        if self.lab is not None:
            if len(self.lab) != 3:
                raise ValidationError(f"Coordenadas CIELAB inválidas para '{self.id}': {self.lab}")
            lightness, a_star, b_star = self.lab
            if not 0.0 <= lightness <= 100.0:
                raise ValidationError(f"L* fuera de rango [0, 100] para '{self.id}': {lightness}")
            if not (-128.0 <= a_star <= 128.0 and -128.0 <= b_star <= 128.0):
                raise ValidationError(f"a*/b* fuera de rango [-128, 128] para '{self.id}': {self.lab}")
        if self.sorted_position is not None and self.sorted_position < 1:
            raise ValidationError(f"sorted_position debe ser positivo para '{self.id}': {self.sorted_position}")


@dataclass(frozen=True)
class FeatureLibrary:
    """
    Colección ordenada de características candidatas (índice i, tamaño N).

    Attributes
    ----------
    features : tuple[FeatureRecord, ...]
        Características en el orden de la biblioteca.
    """

    features: tuple[FeatureRecord, ...]
    _positions: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        features = tuple(self.features)
        object.__setattr__(self, "features", features)
        if len(features) < 2:
            raise ValidationError(f"La biblioteca necesita al menos 2 características, tiene {len(features)}")
        positions: dict[str, int] = {}
        for i, record in enumerate(features):
            if record.id in positions:
                raise ValidationError(f"Identificador de característica duplicado: '{record.id}'")
            positions[record.id] = i
        object.__setattr__(self, "_positions", positions)

    @classmethod
    def from_ids(cls, ids: Sequence[str]) -> "FeatureLibrary":
        """Crea una biblioteca sin coordenadas a partir de sus identificadores."""
        return cls(features=tuple(FeatureRecord(id=str(i)) for i in ids))

    @property
    def ids(self) -> list[str]:
        return [record.id for record in self.features]

    @property
    def size(self) -> int:
        return len(self.features)

    def index_of(self, feature_id: str) -> int:
        """Posición de una característica en la biblioteca."""
        try:
            return self._positions[feature_id]
        except KeyError:
            raise UnknownIdentifierError(f"Característica desconocida: '{feature_id}'") from None

    def record(self, feature_id: str) -> FeatureRecord:
        return self.features[self.index_of(feature_id)]


@dataclass(frozen=True)
class ConceptSet:
    """
    Conjunto ordenado de conceptos (índice j, tamaño n).

    Attributes
    ----------
    concepts : tuple[str, ...]
        Identificadores únicos de los conceptos.
    """

    concepts: tuple[str, ...]

    def __post_init__(self) -> None:
        concepts = tuple(str(c) for c in self.concepts)
        object.__setattr__(self, "concepts", concepts)
        if len(concepts) < 2:
            raise ValidationError(f"El conjunto de conceptos necesita al menos 2 conceptos, tiene {len(concepts)}")
        if len(set(concepts)) != len(concepts):
            raise ValidationError(f"Conceptos duplicados en el conjunto: {list(concepts)}")
        if any(not c.strip() for c in concepts):
            raise ValidationError("El identificador de un concepto no puede estar vacío")

    @property
    def n(self) -> int:
        return len(self.concepts)

    def index_of(self, concept: str) -> int:
        try:
            return self.concepts.index(concept)
        except ValueError:
            raise UnknownIdentifierError(f"Concepto desconocido: '{concept}'") from None


@dataclass(frozen=True, eq=False)
class AssociationTable:
    """
    Matriz de asociaciones brutas a_ij (filas: características, columnas: conceptos).

    La tabla valida forma, rango [0, 1], valores finitos y que cada columna sume más de 0 al construirse. Las
    subtablas con una selección de características (restrict con features) solo alimentan el mérito y la
    distancia semántica, y se construyen con check_columns=False: una columna puede anularse al quitar filas.

    Attributes
    ----------
    library : FeatureLibrary
        Biblioteca de características (filas).
    concepts : ConceptSet
        Conceptos (columnas).
    values : np.ndarray
        Matriz N × n de solo lectura.
    check_columns : bool
        Exige que cada columna sume más de 0 (solo en la construcción).
    """

    library: FeatureLibrary
    concepts: ConceptSet
    values: np.ndarray
    check_columns: InitVar[bool] = True

    def __post_init__(self, check_columns: bool) -> None:
        values = np.array(self.values, dtype=float, copy=True)
        expected = (self.library.size, self.concepts.n)
        if values.shape != expected:
            raise ShapeError(f"La matriz de asociaciones tiene forma {values.shape}, se esperaba {expected}")
        if not np.all(np.isfinite(values)):
            raise ValidationError("La matriz de asociaciones contiene valores no finitos")
        outside = np.argwhere((values < 0.0) | (values > 1.0))
        if outside.size:
            i, j = outside[0]
            raise ValidationError(
                f"Valor fuera de rango [0, 1] en característica '{self.library.features[i].id}', "
                f"concepto '{self.concepts.concepts[j]}': {values[i, j]}"
            )
        if check_columns:
            zero = np.flatnonzero(values.sum(axis=0) <= 0.0)
            if zero.size:
                raise DegenerateInputError(
                    f"La columna del concepto '{self.concepts.concepts[zero[0]]}' suma cero"
                )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, library: FeatureLibrary | None = None) -> "AssociationTable":
        """
        Construye una tabla a partir de un DataFrame indexado por característica con una columna por concepto.
        """
        ids = [str(i) for i in frame.index]
        if library is None:
            library = FeatureLibrary.from_ids(ids)
        elif library.ids != ids:
            raise ValidationError("Las filas del DataFrame no coinciden con la biblioteca de características")
        return cls(library=library, concepts=ConceptSet(tuple(frame.columns)), values=frame.to_numpy(dtype=float))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape  # type: ignore[return-value]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(data=self.values, index=self.library.ids, columns=list(self.concepts.concepts))
        frame.index.name = "feature_id"
        return frame

    def column(self, concept: str) -> np.ndarray:
        """Asociaciones brutas de un concepto."""
        return self.values[:, self.concepts.index_of(concept)]

    def restrict(self, concepts: Sequence[str] | None = None, features: Sequence[str] | None = None
                 ) -> "AssociationTable":
        """
        Subtabla con los conceptos y características indicados, en el orden indicado.

        Parameters
        ----------
        concepts : Sequence[str] | None
            Conceptos a conservar (todos si es None).
        features : Sequence[str] | None
            Características a conservar (todas si es None).

        Returns
        -------
        AssociationTable
            Nueva tabla con la biblioteca y el conjunto de conceptos reducidos.
        """
        concept_ids = list(self.concepts.concepts) if concepts is None else list(concepts)
        cols = [self.concepts.index_of(c) for c in concept_ids]
        if features is None:
            rows = list(range(self.library.size))
            library = self.library
        else:
            rows = [self.library.index_of(f) for f in features]
            library = FeatureLibrary(features=tuple(self.library.features[i] for i in rows))
        return AssociationTable(
            library=library,
            concepts=ConceptSet(tuple(concept_ids)),
            values=self.values[np.ix_(rows, cols)],
            check_columns=features is None,
        )


@dataclass(frozen=True, eq=False)
class ConceptDistribution:
    """
    Distribución de probabilidad p_j(·) de un concepto sobre la biblioteca.

    Attributes
    ----------
    concept : str
        Identificador del concepto.
    probabilities : np.ndarray
        Vector de longitud N, no negativo y de suma 1.
    """

    concept: str
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        probabilities = np.array(self.probabilities, dtype=float, copy=True)
        if probabilities.ndim != 1:
            raise ShapeError(f"La distribución de '{self.concept}' debe ser un vector")
        if np.any(probabilities < 0.0):
            raise ValidationError(f"La distribución de '{self.concept}' contiene probabilidades negativas")
        total = probabilities.sum()
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValidationError(f"La distribución de '{self.concept}' suma {total}, no 1")
        probabilities.setflags(write=False)
        object.__setattr__(self, "probabilities", probabilities)

    @property
    def size(self) -> int:
        return int(self.probabilities.shape[0])


def normalize(table: AssociationTable, concept: str) -> ConceptDistribution:
    """
    Normaliza las asociaciones de un concepto: p_j(i) = a_ij / Σ_k a_kj.

    Parameters
    ----------
    table : AssociationTable
        Tabla de asociaciones.
    concept : str
        Concepto a normalizar.

    Returns
    -------
    ConceptDistribution
        Distribución de longitud N que suma 1.

    Raises
    ------
    UnknownIdentifierError
        Si el concepto no está en la tabla.
    DegenerateInputError
        Si la columna del concepto suma cero.
    """
    column = table.column(concept)
    total = column.sum()
    if total <= 0.0:
        raise DegenerateInputError(f"La columna del concepto '{concept}' suma cero; no se puede normalizar")
    return ConceptDistribution(concept=concept, probabilities=column / total)


def normalize_all(table: AssociationTable) -> list[ConceptDistribution]:
    """Normaliza todas las columnas de la tabla, en el orden de sus conceptos."""
    return [normalize(table=table, concept=c) for c in table.concepts.concepts]


def entropy(dist: ConceptDistribution) -> float:
    """
    Entropía de Shannon en nats, con el convenio 0·log 0 = 0.

    Parameters
    ----------
    dist : ConceptDistribution
        Distribución de un concepto.

    Returns
    -------
    float
        H_j = −Σ p_j(i)·log p_j(i), en [0, log N].
    """
    return float(np.sum(entr(dist.probabilities)))


def mean_entropy(dists: Sequence[ConceptDistribution]) -> float:
    """
    Entropía media de un conjunto de conceptos: H_μ = (H_1 + ... + H_n) / n.

    Raises
    ------
    InvalidArgumentError
        Si la lista está vacía.
    ShapeError
        Si las distribuciones no comparten biblioteca (longitudes distintas).
    """
    if not dists:
        raise InvalidArgumentError("mean_entropy necesita al menos una distribución")
    __check_same_length(dists=dists)
    return float(np.mean([entropy(dist=d) for d in dists]))


def total_variation(d1: ConceptDistribution, d2: ConceptDistribution) -> float:
    """
    Variación total entre dos distribuciones: la mitad de la norma L1 de su diferencia.

    Returns
    -------
    float
        TV en [0, 1]; 0 si son idénticas y 1 si sus soportes son disjuntos.

    Raises
    ------
    ShapeError
        Si las longitudes no coinciden.
    """
    __check_same_length(dists=[d1, d2])
    return float(0.5 * np.abs(d1.probabilities - d2.probabilities).sum())


def generalized_total_variation(dists: Sequence[ConceptDistribution]) -> float:
    """
    Variación total generalizada de k distribuciones: GTV = −1 + Σ_i max_j p_j(i).

    Para k = 2 coincide con la variación total. Los empates en el máximo por característica no requieren
    desempate (el máximo está bien definido).

    Parameters
    ----------
    dists : Sequence[ConceptDistribution]
        Al menos dos distribuciones sobre la misma biblioteca.

    Returns
    -------
    float
        GTV en [0, k − 1].

    Raises
    ------
    InvalidArgumentError
        Si k < 2.
    ShapeError
        Si las longitudes no coinciden.
    """
    k = len(dists)
    if k < 2:
        raise InvalidArgumentError(f"La GTV necesita al menos 2 distribuciones, recibió {k}")
    __check_same_length(dists=dists)
    stacked = np.vstack([d.probabilities for d in dists])
    value = stacked.max(axis=0).sum() - 1.0
    # Redondeo en coma flotante en los extremos
    return float(np.clip(value, 0.0, k - 1.0))


def distribution_difference(dists: Sequence[ConceptDistribution]) -> float:
    """TV para dos conceptos y GTV para más de dos."""
    if len(dists) == 2:
        return total_variation(d1=dists[0], d2=dists[1])
    return generalized_total_variation(dists=dists)


def ml_error_probability(dists: Sequence[ConceptDistribution]) -> float:
    """
    Probabilidad media de error al elegir la distribución más verosímil a partir de una única muestra.

    Con un concepto elegido uniformemente y una característica muestreada de su distribución, el estimador de
    máxima verosimilitud falla con probabilidad (1 − 1/k) − GTV/k.

    Returns
    -------
    float
        Probabilidad de error en [0, 1 − 1/k].
    """
    k = len(dists)
    gtv = generalized_total_variation(dists=dists)
    return (1.0 - 1.0 / k) - gtv / k


def specificity_scores(entropies: Sequence[float]) -> list[float]:
    """
    Especificidad: 1 menos la entropía normalizada min-max sobre la colección recibida.

    La normalización se calcula sobre la colección que aporta el llamador (por ejemplo, la entropía media de
    todos los subconjuntos analizados); valores mayores indican conceptos más específicos.

    Parameters
    ----------
    entropies : Sequence[float]
        Entropías (o entropías medias) de la colección.

    Returns
    -------
    list[float]
        Puntuaciones en [0, 1], en el mismo orden.

    Raises
    ------
    DegenerateInputError
        Si todos los valores son iguales (o hay menos de dos).
    """
    values = np.asarray(entropies, dtype=float)
    if values.size < 2 or np.ptp(values) == 0.0:
        raise DegenerateInputError("La normalización min-max necesita al menos dos valores distintos")
    scores = 1.0 - (values - values.min()) / np.ptp(values)
    return [float(s) for s in scores]


def __check_same_length(dists: Sequence[ConceptDistribution]) -> None:
    lengths = {d.size for d in dists}
    if len(lengths) > 1:
        raise ShapeError(f"Las distribuciones tienen longitudes distintas: {sorted(lengths)}")
