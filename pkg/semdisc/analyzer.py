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
Análisis estadístico de la capacidad de conjuntos de conceptos.

Este módulo proporciona la tabla de análisis por subconjunto (capacidad, diferencia de distribuciones, entropía
media, especificidad y sus transformaciones logarítmicas), la correlación de Pearson, la comparación de
correlaciones mediante la transformación r-a-z de Fisher y la regresión lineal múltiple con predictores
tipificados.
"""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
import pandas as pd
from scipy import stats

from semdisc.capacity import CapacityAnalyzer
from semdisc.core_model import AssociationTable, ConceptSet, specificity_scores
from semdisc.errors import DegenerateInputError, InvalidArgumentError, ShapeError, SingularDesignError
from semdisc.stochastic import MonteCarloConfig

logger = logging.getLogger(__name__)

# "log_n": 1 − H_μ / log N; "min_max": 1 − entropía media normalizada min-max sobre la colección
SpecificityKind = Literal["log_n", "min_max"]

FRAME_COLUMNS = [
    "capacity",
    "distribution_difference",
    "mean_entropy",
    "specificity",
    "log_distribution_difference",
    "log_specificity",
]


@dataclass(frozen=True)
class AnalysisFrame:
    """
    Tabla de análisis: una fila por subconjunto de conceptos.

    Attributes
    ----------
    data : pd.DataFrame
        Índice "concepts" (identificadores unidos por "|") y columnas FRAME_COLUMNS, sin valores ausentes.
    excluded : list[str]
        Subconjuntos excluidos porque una transformación logarítmica no estaba definida.
    k : int
        Tamaño de los subconjuntos.
    """

    data: pd.DataFrame
    excluded: list[str] = field(default_factory=list)
    k: int = 2

    def __len__(self) -> int:
        return len(self.data)


@dataclass(frozen=True)
class CorrelationResult:
    """Correlación de Pearson con sus grados de libertad y p bilateral."""

    r: float
    df: int
    p: float

    def to_dict(self) -> dict[str, float]:
        return {"r": self.r, "df": self.df, "p": self.p}


@dataclass(frozen=True)
class RegressionResult:
    """
    Resultado de una regresión lineal por mínimos cuadrados.

    Attributes
    ----------
    coefficients : pd.DataFrame
        Índice "intercept" y nombres de predictores; columnas beta, se, t, p.
    r_squared : float
        Coeficiente de determinación.
    df_resid : int
        Grados de libertad residuales.
    """

    coefficients: pd.DataFrame
    r_squared: float
    df_resid: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "coefficients": {
                name: {col: float(value) for col, value in row.items()}
                for name, row in self.coefficients.iterrows()
            },
            "r_squared": self.r_squared,
            "df_resid": self.df_resid,
        }


def pearson_r(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """
    Correlación de Pearson muestral con p bilateral (distribución t con len − 2 grados de libertad).

    Raises
    ------
    ShapeError
        Si las longitudes difieren.
    InvalidArgumentError
        Si hay menos de 3 observaciones.
    DegenerateInputError
        Si alguno de los vectores tiene varianza nula.

    Examples
    --------
    >>> round(pearson_r([1, 2, 3, 4], [1, 3, 2, 4]).r, 6)
    0.8
    """
    x_arr = np.asarray(x, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    if x_arr.shape != y_arr.shape or x_arr.ndim != 1:
        raise ShapeError(f"pearson_r necesita dos vectores de igual longitud: {x_arr.shape} y {y_arr.shape}")
    if x_arr.size < 3:
        raise InvalidArgumentError(f"pearson_r necesita al menos 3 observaciones, recibió {x_arr.size}")
    if np.ptp(x_arr) == 0.0 or np.ptp(y_arr) == 0.0:
        raise DegenerateInputError("pearson_r no está definida con varianza nula")
    result = stats.pearsonr(x_arr, y_arr)
    return CorrelationResult(r=float(result.statistic), df=int(x_arr.size - 2), p=float(result.pvalue))


def fisher_r_to_z_compare(r1: float, r2: float, df: int, r12: float | None = None) -> dict[str, float]:
    """
    Compara dos correlaciones con la transformación r-a-z de Fisher.

    Sin r12 usa el contraste de muestras independientes z = (atanh r1 − atanh r2) / √(2 / (n − 3)), con
    n = df + 2. Con r12 (correlación entre las dos variables que comparten la tercera) usa el contraste de
    correlaciones dependientes de Steiger.

    Parameters
    ----------
    r1, r2 : float
        Correlaciones a comparar, |r| < 1.
    df : int
        Grados de libertad de cada correlación (n − 2).
    r12 : float | None
        Correlación entre los predictores para la variante dependiente.

    Returns
    -------
    dict[str, float]
        "z" y "p" bilateral.

    Raises
    ------
    DegenerateInputError
        Si |r1| o |r2| es 1 (transformación no definida).
    InvalidArgumentError
        Si df < 2 o |r12| > 1.
    """
    for r in (r1, r2):
        if abs(r) >= 1.0:
            raise DegenerateInputError(f"La transformación de Fisher no está definida para r = {r}")
    if df < 2:
        raise InvalidArgumentError(f"Se necesitan al menos 2 grados de libertad, recibió {df}")
    n = df + 2
    z1, z2 = math.atanh(r1), math.atanh(r2)

    if r12 is None:
        z = (z1 - z2) / math.sqrt(2.0 / (n - 3))
    else:
        if abs(r12) > 1.0:
            raise InvalidArgumentError(f"r12 debe estar en [-1, 1], recibió {r12}")
        r_mean = (r1 + r2) / 2.0
        psi = r12 * (1.0 - 2.0 * r_mean**2) - 0.5 * r_mean**2 * (1.0 - 2.0 * r_mean**2 - r12**2)
        covariance = psi / (1.0 - r_mean**2) ** 2
        denominator = 2.0 - 2.0 * covariance
        if denominator <= 0.0:
            raise DegenerateInputError("La varianza del contraste dependiente es nula")
        z = (z1 - z2) * math.sqrt(n - 3) / math.sqrt(denominator)
    p = float(2.0 * stats.norm.sf(abs(z)))
    return {"z": float(z), "p": p}


def z_score(values: Sequence[float]) -> np.ndarray:
    """Tipifica un vector (media 0, varianza 1)."""
    arr = np.asarray(values, dtype=float)
    if arr.size < 2 or np.ptp(arr) == 0.0:
        raise DegenerateInputError("No se puede tipificar un vector de varianza nula")
    return stats.zscore(arr)


def ols_regression(y: Sequence[float], X: Mapping[str, Sequence[float]] | pd.DataFrame,
                   z_score_predictors: bool = True, z_score_response: bool = False) -> RegressionResult:
    """
    Regresión lineal múltiple por mínimos cuadrados ordinarios con intercepto.

    Los errores estándar usan la varianza residual insesgada; t y p bilaterales por coeficiente.

    Parameters
    ----------
    y : Sequence[float]
        Variable respuesta (capacidad).
    X : Mapping[str, Sequence[float]] | pd.DataFrame
        Predictores por nombre.
    z_score_predictors : bool
        Tipifica cada predictor antes de ajustar.
    z_score_response : bool
        Tipifica también la respuesta.

    Returns
    -------
    RegressionResult
        Coeficientes, R² y grados de libertad residuales.

    Raises
    ------
    InvalidArgumentError
        Si hay menos filas que predictores + 2.
    SingularDesignError
        Si la matriz de diseño no tiene rango completo.
    """
    predictors = pd.DataFrame(X).astype(float)
    response = np.asarray(y, dtype=float)
    n_rows, n_predictors = predictors.shape
    if response.shape != (n_rows,):
        raise ShapeError(f"La respuesta tiene forma {response.shape}, se esperaban {n_rows} filas")
    if n_rows < n_predictors + 2:
        raise InvalidArgumentError(f"Se necesitan al menos {n_predictors + 2} filas, hay {n_rows}")

    design = predictors.to_numpy()
    if np.linalg.matrix_rank(np.column_stack([np.ones(n_rows), design])) < n_predictors + 1:
        raise SingularDesignError("La matriz de diseño no tiene rango completo")
    if z_score_predictors:
        design = np.column_stack([z_score(design[:, c]) for c in range(n_predictors)])
    if z_score_response:
        response = z_score(response)
    design = np.column_stack([np.ones(n_rows), design])

    beta, _, _, _ = np.linalg.lstsq(design, response, rcond=None)
    residuals = response - design @ beta
    df_resid = n_rows - design.shape[1]
    rss = float(residuals @ residuals)
    sigma_sq = rss / df_resid
    se = np.sqrt(sigma_sq * np.diag(np.linalg.inv(design.T @ design)))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_values = np.where(se > 0.0, beta / np.where(se > 0.0, se, 1.0), np.sign(beta) * np.inf)
    p_values = 2.0 * stats.t.sf(np.abs(t_values), df_resid)

    tss = float(((response - response.mean()) ** 2).sum())
    coefficients = pd.DataFrame(
        data={"beta": beta, "se": se, "t": t_values, "p": p_values},
        index=["intercept", *[str(c) for c in predictors.columns]],
    )
    return RegressionResult(
        coefficients=coefficients,
        r_squared=1.0 - rss / tss if tss > 0.0 else 1.0,
        df_resid=int(df_resid),
    )


class Analyzer:
    """
    Analizador de la capacidad de conjuntos de conceptos.

    Construye la tabla de análisis sobre todos los subconjuntos de k conceptos y resume la relación entre
    capacidad, diferencia de distribuciones y especificidad.

    Attributes
    ----------
    config : MonteCarloConfig
        Configuración Monte Carlo para subconjuntos de más de 2 conceptos.
    """

    def __init__(self, config: MonteCarloConfig | None = None) -> None:
        self.config = config or MonteCarloConfig()

    def build_frame(self, table: AssociationTable, k: int, concepts: ConceptSet | None = None,
                    specificity: SpecificityKind = "log_n") -> AnalysisFrame:
        """
        Tabla de análisis con una fila por subconjunto de k conceptos.

        La diferencia de distribuciones se normaliza dividiendo por su máximo en la colección y la especificidad
        es 1 − H_μ / log N, o bien 1 − H_μ normalizada min-max sobre todos los subconjuntos con
        specificity="min_max". Ambas se transforman con logaritmo natural; los subconjuntos en los que algún
        argumento es 0 se excluyen de la tabla con un aviso.

        Parameters
        ----------
        table : AssociationTable
            Tabla de asociaciones completa.
        k : int
            Tamaño de los subconjuntos.
        concepts : ConceptSet | None
            Conceptos a combinar (por defecto todos los de la tabla).
        specificity : str
            Normalización de la entropía media: "log_n" o "min_max".

        Returns
        -------
        AnalysisFrame
            Tabla de análisis y lista de subconjuntos excluidos.

        Raises
        ------
        DegenerateInputError
            Si todas las diferencias de distribución son nulas, o con "min_max" si todas las entropías medias
            son iguales.
        InvalidArgumentError
            Si la normalización de especificidad es desconocida.
        """
        if specificity not in ("log_n", "min_max"):
            raise InvalidArgumentError(f"Normalización de especificidad desconocida: {specificity}")
        concepts = concepts or table.concepts
        analyzer = CapacityAnalyzer(config=self.config)
        rows = []
        labels = []
        for report in analyzer.batch(table=table, concepts=concepts, k=k):
            labels.append("|".join(report.concepts))
            rows.append({
                "capacity": report.max_capacity,
                "distribution_difference": report.distribution_difference,
                "mean_entropy": report.mean_entropy,
            })
        data = pd.DataFrame(rows, index=pd.Index(labels, name="concepts"))

        max_difference = data["distribution_difference"].max()
        if not max_difference > 0.0:
            raise DegenerateInputError("Todas las diferencias de distribución son nulas; no se pueden normalizar")
        if specificity == "min_max":
            data["specificity"] = specificity_scores(entropies=data["mean_entropy"].tolist())
        else:
            data["specificity"] = 1.0 - data["mean_entropy"] / math.log(table.shape[0])

        normalized = data["distribution_difference"] / max_difference
        invalid = (normalized <= 0.0) | (data["specificity"] <= 0.0)
        excluded = list(data.index[invalid])
        if excluded:
            logger.warning("Excluidos %d subconjuntos con logaritmo no definido: %s", len(excluded), excluded)
        data = data.loc[~invalid].copy()
        data["log_distribution_difference"] = np.log(normalized.loc[~invalid])
        data["log_specificity"] = np.log(data["specificity"])
        logger.info("Tabla de análisis: %d filas, %d excluidas", len(data), len(excluded))
        return AnalysisFrame(data=data[FRAME_COLUMNS], excluded=excluded, k=k)

    def summary(self, frame: AnalysisFrame) -> dict[str, Any]:
        """
        Correlaciones de la capacidad con cada predictor, su comparación y la regresión múltiple.

        Returns
        -------
        dict[str, Any]
            Correlaciones, comparaciones de Fisher (independiente y dependiente) y regresión tipificada.
        """
        data = frame.data
        capacity = data["capacity"].to_numpy()
        difference = data["log_distribution_difference"].to_numpy()
        specificity = data["log_specificity"].to_numpy()

        r_difference = pearson_r(x=difference, y=capacity)
        r_specificity = pearson_r(x=specificity, y=capacity)
        r_predictors = pearson_r(x=difference, y=specificity)
        regression = ols_regression(
            y=capacity,
            X={"log_distribution_difference": difference, "log_specificity": specificity},
            z_score_predictors=True,
        )
        return {
            "k": frame.k,
            "rows": len(frame),
            "excluded": list(frame.excluded),
            "correlations": {
                "capacity_vs_log_distribution_difference": r_difference.to_dict(),
                "capacity_vs_log_specificity": r_specificity.to_dict(),
                "log_distribution_difference_vs_log_specificity": r_predictors.to_dict(),
            },
            "fisher": {
                "independent": fisher_r_to_z_compare(r1=r_difference.r, r2=r_specificity.r, df=r_difference.df),
                "dependent": fisher_r_to_z_compare(
                    r1=r_difference.r, r2=r_specificity.r, df=r_difference.df, r12=r_predictors.r
                ),
            },
            "regression": regression.to_dict(),
        }

    def capacity_metric_correlations(self, table: AssociationTable,
                                     concepts: ConceptSet | None = None) -> dict[str, Any]:
        """
        Correlaciones entre capacidad máxima, ΔS media y ΔS mediana sobre todos los pares de conceptos.

        Returns
        -------
        dict[str, Any]
            Correlación de Pearson para cada par de métricas ("max_mean", "max_median", "mean_median").
        """
        concepts = concepts or table.concepts
        analyzer = CapacityAnalyzer(config=self.config)
        metrics: dict[str, list[float]] = {"max": [], "mean": [], "median": []}
        for report in analyzer.batch(table=table, concepts=concepts, k=2, exhaustive=True):
            metrics["max"].append(report.max_capacity)
            metrics["mean"].append(report.statistics.mean)
            metrics["median"].append(report.statistics.median)
        return {
            "pairs": len(metrics["max"]),
            "max_mean": pearson_r(x=metrics["max"], y=metrics["mean"]).to_dict(),
            "max_median": pearson_r(x=metrics["max"], y=metrics["median"]).to_dict(),
            "mean_median": pearson_r(x=metrics["mean"], y=metrics["median"]).to_dict(),
        }
