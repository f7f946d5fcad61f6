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

import logging
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from semdisc.core_model import AssociationTable, ConceptSet, FeatureLibrary, FeatureRecord
from semdisc.errors import DataFormatError, IntegrityError, SemDiscError, ValidationError

logger = logging.getLogger(__name__)

FEATURE_ID_COLUMN = "feature_id"
LIBRARY_COLUMNS = ["index", "sorted_position", "L", "a", "b"]
UW71_RESOURCE = "uw71.csv"
UW71_SIZE = 71


def load_association_csv(path: str | Path) -> AssociationTable:
    """
    Carga una tabla de asociaciones desde un CSV.

    El fichero tiene cabecera "feature_id" seguida de los nombres de los conceptos y una fila por característica.
    El orden de las filas define el orden de la biblioteca.

    Parameters
    ----------
    path : str | Path
        Ruta al fichero CSV (UTF-8, separado por comas, punto decimal).

    Returns
    -------
    AssociationTable
        Tabla validada.

    Raises
    ------
    DataFormatError
        Si el fichero no existe, está vacío o no tiene la cabecera esperada.
    ValidationError
        Si hay valores no numéricos o fuera de [0, 1] (indicando fila y columna) o identificadores duplicados.
    DegenerateInputError
        Si algún concepto tiene todas sus asociaciones a 0.

    Examples
    --------
    >>> table = load_association_csv(path="tests/data_source_samples/assoc_3x2.csv")
    >>> table.shape
    (3, 2)
    """
    logger.info("Cargando tabla de asociaciones desde %s", path)
    ids, concepts, matrix = __parse_association_csv(path=path)
    table = AssociationTable(
        library=FeatureLibrary.from_ids(ids),
        concepts=ConceptSet(tuple(concepts)),
        values=matrix,
    )
    logger.info("Tabla de asociaciones cargada: N=%d, n=%d", *table.shape)
    return table


def __parse_association_csv(path: str | Path) -> tuple[list[str], list[str], np.ndarray]:
    frame = __read_csv(path=path)
    if frame.columns[0] != FEATURE_ID_COLUMN:
        raise DataFormatError(
            f"Cabecera ausente o inválida en {path}: la primera columna debe ser '{FEATURE_ID_COLUMN}', "
            f"es '{frame.columns[0]}'"
        )
    if frame.shape[1] < 2:
        raise DataFormatError(f"{path} no contiene columnas de conceptos")

    ids = frame[FEATURE_ID_COLUMN].astype(str).str.strip()
    duplicated = ids[ids.duplicated()]
    if not duplicated.empty:
        raise ValidationError(f"Identificador de característica duplicado en {path}: '{duplicated.iloc[0]}'")

    concepts = [str(c).strip() for c in frame.columns[1:]]
    values = frame.iloc[:, 1:].apply(pd.to_numeric, errors="coerce")
    for row, column in np.argwhere(values.isna().to_numpy()):
        raise ValidationError(
            f"Valor no numérico en fila {row + 1}, columna '{concepts[column]}': "
            f"{frame.iloc[row, column + 1]!r}"
        )
    # float() por celda: redondeo correcto, la recarga reproduce la tabla escrita
    matrix = np.asarray(frame.iloc[:, 1:].to_numpy(dtype=object), dtype=float)
    for row, column in np.argwhere((matrix < 0.0) | (matrix > 1.0)):
        raise ValidationError(
            f"Valor fuera de rango [0, 1] en fila {row + 1}, columna '{concepts[column]}': {matrix[row, column]}"
        )
    return ids.tolist(), concepts, matrix


def write_association_csv(table: AssociationTable, path: str | Path) -> None:
    """
    Escribe una tabla de asociaciones en el formato de load_association_csv.

    Los reales se escriben con su representación decimal más corta y load_association_csv los convierte con
    redondeo correcto, de modo que la tabla recargada es idéntica bit a bit.
    """
    table.to_frame().to_csv(path, index=True)
    logger.info("Tabla de asociaciones escrita en %s", path)


def validate_association_csv(path: str | Path) -> dict[str, Any]:
    """
    Diagnóstico de ingestión de un CSV de asociaciones.

    Returns
    -------
    dict[str, Any]
        "valid", "features" (N), "concepts" (n), sumas por concepto, conceptos de suma cero, valores mínimo y
        máximo y lista de incidencias. Un fichero que no se puede cargar devuelve valid=False con el motivo.
    """
    try:
        ids, concepts, matrix = __parse_association_csv(path=path)
        FeatureLibrary.from_ids(ids)
        ConceptSet(tuple(concepts))
    except (DataFormatError, ValidationError) as e:
        logger.warning("Validación fallida de %s: %s", path, e)
        return {"path": str(path), "valid": False, "issues": [str(e)]}

    sums = matrix.sum(axis=0)
    column_sums = {concept: float(s) for concept, s in zip(concepts, sums)}
    zero_sum = [concept for concept, s in column_sums.items() if s <= 0.0]
    issues = [f"El concepto '{concept}' tiene todas sus asociaciones a 0" for concept in zero_sum]
    return {
        "path": str(path),
        "valid": not issues,
        "features": len(ids),
        "concepts": len(concepts),
        "column_sums": column_sums,
        "zero_sum_columns": zero_sum,
        "min": float(matrix.min()),
        "max": float(matrix.max()),
        "issues": issues,
    }


def load_uw71() -> FeatureLibrary:
    """
    Biblioteca UW-71 empaquetada: 71 colores con coordenadas CIELAB y posición ordenada.

    Los identificadores son los índices de color ("1" a "71").

    Raises
    ------
    IntegrityError
        Si el fichero empaquetado falta, está incompleto o no se puede interpretar.
    """
    resource = resources.files("semdisc") / "data" / UW71_RESOURCE
    try:
        with resource.open("r", encoding="utf-8") as handle:
            library = __parse_library(frame=pd.read_csv(handle), source="UW-71")
    except (OSError, SemDiscError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise IntegrityError(f"El fichero UW-71 empaquetado está dañado: {e}") from e
    if library.size != UW71_SIZE:
        raise IntegrityError(f"El fichero UW-71 empaquetado tiene {library.size} colores, se esperaban {UW71_SIZE}")
    return library


def load_feature_library_csv(path: str | Path) -> FeatureLibrary:
    """
    Carga una biblioteca de características con columnas index, sorted_position, L, a, b.

    Raises
    ------
    DataFormatError
        Si faltan columnas o el fichero no se puede leer.
    ValidationError
        Si alguna coordenada está fuera de rango o hay índices duplicados.
    """
    logger.info("Cargando biblioteca de características desde %s", path)
    return __parse_library(frame=__read_csv(path=path), source=str(path))


def __read_csv(path: str | Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, dtype=str, skipinitialspace=True, encoding="utf-8")
    except FileNotFoundError:
        raise DataFormatError(f"No existe el fichero {path}") from None
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DataFormatError(f"No se puede interpretar {path}: {e}") from e


def __parse_library(frame: pd.DataFrame, source: str) -> FeatureLibrary:
    missing = [c for c in LIBRARY_COLUMNS if c not in frame.columns]
    if missing:
        raise DataFormatError(f"Faltan columnas en la biblioteca {source}: {missing}")
    numeric = frame[LIBRARY_COLUMNS].apply(pd.to_numeric, errors="coerce")
    if numeric.isna().any().any():
        row = int(np.flatnonzero(numeric.isna().any(axis=1).to_numpy())[0])
        raise ValidationError(f"Valor no numérico en la biblioteca {source}, fila {row + 1}")
    records = tuple(
        FeatureRecord(
            id=str(int(row["index"])),
            lab=(float(row["L"]), float(row["a"]), float(row["b"])),
            sorted_position=int(row["sorted_position"]),
        )
        for _, row in numeric.iterrows()
    )
    return FeatureLibrary(features=records)
