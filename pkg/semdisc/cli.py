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
Interfaz de línea de comandos de semdisc.

Cada subcomando tiene una función de comando que devuelve un diccionario serializable a JSON; el servidor MCP
usa las mismas funciones, de modo que ambas superficies producen la misma salida. Los registros van a stderr y
stdout queda reservado para la salida JSON, NDJSON o CSV.

Códigos de salida: 0 éxito, 1 error de datos o validación, 2 error de uso (argumentos o identificadores
desconocidos).
"""

import argparse
import json
import logging
import math
import os
import sys
from collections.abc import Iterator, Mapping, Sequence
from pathlib import Path
from typing import Any, TextIO

import pandas as pd

from semdisc import data_source
from semdisc.analyzer import Analyzer, SpecificityKind
from semdisc.capacity import DEFAULT_THRESHOLD, CapacityAnalyzer
from semdisc.core_model import (
    ConceptSet,
    distribution_difference,
    entropy,
    ml_error_probability,
    normalize_all,
    specificity_scores,
)
from semdisc.errors import DegenerateInputError, InvalidArgumentError, SemDiscError, UnknownIdentifierError
from semdisc.palette import generate_palette
from semdisc.stochastic import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    MonteCarloConfig,
    MonteCarloSimulator,
    encoded_accuracy,
    semantic_distance_analytic,
)

logger = logging.getLogger(__name__)

WORKERS_ENV = "SEMDISC_WORKERS"
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def positive_int(raw: str) -> int:
    """Tipo argparse: entero >= 1."""
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"se esperaba un entero positivo, recibió '{raw}'") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"se esperaba un entero positivo, recibió {value}")
    return value


def seed_int(raw: str) -> int:
    """Tipo argparse: entero sin signo de 64 bits."""
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"semilla no entera: '{raw}'") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"la semilla debe estar en [0, 2^64), recibió {value}")
    return value


def default_workers() -> int:
    """Número de hilos por defecto: variable de entorno SEMDISC_WORKERS o 1."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or not raw.strip():
        return 1
    try:
        workers = int(raw)
    except ValueError:
        raise InvalidArgumentError(f"{WORKERS_ENV} debe ser un entero positivo, es '{raw}'") from None
    if workers < 1:
        raise InvalidArgumentError(f"{WORKERS_ENV} debe ser un entero positivo, es {workers}")
    return workers


def parse_list(value: str | Sequence[str]) -> list[str]:
    """Convierte "a,b,c" (o una lista) en una lista de identificadores sin espacios."""
    items = value.split(",") if isinstance(value, str) else list(value)
    items = [str(item).strip() for item in items]
    if not items or any(not item for item in items):
        raise InvalidArgumentError(f"Lista de identificadores inválida: {value!r}")
    return items


def parse_encoded(value: str | Mapping[str, str]) -> dict[str, str]:
    """Convierte "concepto=característica,..." en un diccionario."""
    if isinstance(value, Mapping):
        return {str(k): str(v) for k, v in value.items()}
    mapping = {}
    for item in parse_list(value):
        concept, sep, feature = item.partition("=")
        if not sep or not concept.strip() or not feature.strip():
            raise InvalidArgumentError(f"Asignación codificada inválida: '{item}' (formato concepto=característica)")
        mapping[concept.strip()] = feature.strip()
    return mapping


def parse_thresholds(value: str | float | Sequence[float]) -> list[float]:
    if isinstance(value, (int, float)):
        return [float(value)]
    try:
        return [float(v) for v in parse_list(value)]
    except ValueError:
        raise InvalidArgumentError(f"Umbral inválido: {value!r}") from None


# ---------------------------------------------------------------------------------------------------------------------
# Comandos
# ---------------------------------------------------------------------------------------------------------------------


def validate_command(path: str | Path) -> dict[str, Any]:
    """Diagnóstico de ingestión de un CSV de asociaciones."""
    return data_source.validate_association_csv(path=path)


def entropy_command(path: str | Path) -> dict[str, Any]:
    """Entropía, entropía normalizada y especificidad de cada concepto."""
    table = data_source.load_association_csv(path=path)
    dists = normalize_all(table=table)
    entropies = [entropy(dist=d) for d in dists]
    try:
        specificity: list[float | None] = list(specificity_scores(entropies=entropies))
    except DegenerateInputError:
        logger.warning("Todas las entropías son iguales; la especificidad min-max no está definida")
        specificity = [None] * len(entropies)
    max_entropy = math.log(table.shape[0])
    return {
        "features": table.shape[0],
        "concepts": [
            {
                "concept": dist.concept,
                "entropy": h,
                "normalized_entropy": h / max_entropy,
                "specificity": s,
            }
            for dist, h, s in zip(dists, entropies, specificity)
        ],
    }


def distance_command(path: str | Path, concepts: str | Sequence[str]) -> dict[str, Any]:
    """TV (2 conceptos) o GTV (más de 2) y probabilidad de error de máxima verosimilitud."""
    table = data_source.load_association_csv(path=path)
    concept_ids = parse_list(concepts)
    dists = normalize_all(table=table.restrict(concepts=concept_ids))
    return {
        "concepts": concept_ids,
        "measure": "tv" if len(concept_ids) == 2 else "gtv",
        "distribution_difference": distribution_difference(dists=dists),
        "ml_error_probability": ml_error_probability(dists=dists),
    }


def semdist_command(path: str | Path, concepts: str | Sequence[str], features: str | Sequence[str],
                    config: MonteCarloConfig, encoded: str | Mapping[str, str] | None = None) -> dict[str, Any]:
    """
    Distancia semántica de un conjunto de características: analítica para 2 × 2 y Monte Carlo en otro caso,
    con el contraste semántico de cada característica.
    """
    table = data_source.load_association_csv(path=path)
    sub = table.restrict(concepts=parse_list(concepts), features=parse_list(features))
    result = MonteCarloSimulator(config=config).run(table=sub)
    if sub.shape == (2, 2):
        method, delta_s = "analytic", semantic_distance_analytic(sub=sub)
    else:
        method, delta_s = "monte_carlo", result.delta_s
    payload: dict[str, Any] = {
        "concepts": list(sub.concepts.concepts),
        "features": sub.library.ids,
        "method": method,
        "delta_s": delta_s,
        "delta_s_monte_carlo": result.delta_s,
        "modal_proportion": result.modal_proportion,
        "contrast": result.contrast,
        "optimal_assignment": result.optimal.to_dict(),
        "seed": config.seed,
        "samples": config.samples,
    }
    if encoded is not None:
        payload["encoded_accuracy"] = encoded_accuracy(result=result, encoded=parse_encoded(encoded))
    return payload


def capacity_command(path: str | Path, config: MonteCarloConfig, k: int | None = None,
                     concepts: str | Sequence[str] | None = None, all_subsets: bool = False,
                     threshold: str | float | Sequence[float] = DEFAULT_THRESHOLD,
                     statistics: bool = False) -> Iterator[dict[str, Any]]:
    """
    Informes de capacidad: de un subconjunto (--concepts) o de todos los subconjuntos de k conceptos (--all).

    Devuelve un iterador en orden de enumeración; cada registro incluye semilla y muestras.
    """
    table = data_source.load_association_csv(path=path)
    thresholds = parse_thresholds(threshold)
    analyzer = CapacityAnalyzer(config=config, threshold=thresholds[0] if len(thresholds) == 1 else thresholds)

    if all_subsets == (concepts is not None):
        raise InvalidArgumentError("Indique --all o --concepts (solo uno de ellos)")
    if all_subsets:
        if k is None:
            raise InvalidArgumentError("--all necesita --k")
        reports = analyzer.batch(table=table, concepts=table.concepts, k=k, exhaustive=statistics)
        return (__with_run_info(report.to_dict(), config) for report in reports)

    concept_ids = parse_list(concepts)  # type: ignore[arg-type]
    if k is not None and k != len(concept_ids):
        raise InvalidArgumentError(f"--k={k} no coincide con los {len(concept_ids)} conceptos indicados")
    report = analyzer.evaluate(table=table, subset=ConceptSet(tuple(concept_ids)), exhaustive=statistics)
    return iter([__with_run_info(report.to_dict(), config)])


def palette_command(path: str | Path, concepts: str | Sequence[str], config: MonteCarloConfig,
                    library: str | Path = "uw71") -> dict[str, Any]:
    """Paleta óptima del conjunto de conceptos sobre la biblioteca indicada."""
    table = data_source.load_association_csv(path=path)
    if str(library) == "uw71":
        features = data_source.load_uw71()
    else:
        features = data_source.load_feature_library_csv(path=library)
    palette = generate_palette(table=table, concepts=parse_list(concepts), library=features, config=config)
    return palette.to_dict()


def predict_command(path: str | Path, concepts: str | Sequence[str], features: str | Sequence[str],
                    config: MonteCarloConfig) -> dict[str, Any]:
    """Distribución de respuestas predicha (filas: características, columnas: conceptos)."""
    table = data_source.load_association_csv(path=path)
    sub = table.restrict(concepts=parse_list(concepts), features=parse_list(features))
    result = MonteCarloSimulator(config=config).run(table=sub)
    return {
        "concepts": list(sub.concepts.concepts),
        "features": sub.library.ids,
        "prediction": [[float(v) for v in row] for row in result.prediction],
        "seed": config.seed,
        "samples": config.samples,
    }


def analyze_command(path: str | Path, k: int, config: MonteCarloConfig,
                    capacity_metrics: bool = False, specificity: SpecificityKind = "log_n") -> dict[str, Any]:
    """Tabla de análisis, correlaciones, comparación de Fisher y regresión tipificada."""
    table = data_source.load_association_csv(path=path)
    analyzer = Analyzer(config=config)
    frame = analyzer.build_frame(table=table, k=k, specificity=specificity)
    payload = analyzer.summary(frame=frame)
    payload["specificity"] = specificity
    payload["frame"] = frame.data.reset_index().to_dict(orient="records")
    payload["seed"] = config.seed
    payload["samples"] = config.samples
    if capacity_metrics:
        if k != 2:
            raise InvalidArgumentError("--capacity-metrics solo está disponible con --k 2")
        payload["capacity_metrics"] = analyzer.capacity_metric_correlations(table=table)
    return payload


def __with_run_info(record: dict[str, Any], config: MonteCarloConfig) -> dict[str, Any]:
    record["seed"] = config.seed
    record["samples"] = config.samples
    return record


# ---------------------------------------------------------------------------------------------------------------------
# Argumentos y salida
# ---------------------------------------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    """Construye el parser con los subcomandos y las opciones globales."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=["json", "csv"], default="json", help="Formato de salida")
    common.add_argument("--seed", type=seed_int, default=DEFAULT_SEED, help="Semilla de la simulación")
    common.add_argument("--samples", type=positive_int, default=DEFAULT_SAMPLES, help="Iteraciones Monte Carlo")
    common.add_argument("--workers", type=positive_int, default=None, help=f"Hilos (por defecto ${WORKERS_ENV} o 1)")
    common.add_argument("--clamp", action="store_true", help="Recorta las asociaciones perturbadas a [0, 1]")
    common.add_argument("--perturb", choices=["ratings", "merits"], default="ratings",
                        help="Magnitud perturbada en cada iteración")
    common.add_argument("--merit", choices=["balanced", "isolated"], default="balanced",
                        help="Función de mérito de cada iteración")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Registro detallado en stderr")
    verbosity.add_argument("--quiet", action="store_true", help="Solo errores en stderr")

    parser = argparse.ArgumentParser(prog="semdisc", description="Discriminabilidad semántica de paletas")
    subparsers = parser.add_subparsers(dest="command", required=True)

    validate = subparsers.add_parser("validate", parents=[common], help="Diagnóstico de un CSV de asociaciones")
    validate.add_argument("path")

    entropy_parser = subparsers.add_parser("entropy", parents=[common], help="Entropía y especificidad")
    entropy_parser.add_argument("path")

    distance = subparsers.add_parser("distance", parents=[common], help="Variación total (generalizada)")
    distance.add_argument("path")
    distance.add_argument("--concepts", required=True)

    semdist = subparsers.add_parser("semdist", parents=[common], help="Distancia semántica y contraste")
    semdist.add_argument("path")
    semdist.add_argument("--concepts", required=True)
    semdist.add_argument("--features", required=True)
    semdist.add_argument("--encoded", default=None, help="Asignación codificada concepto=característica,...")

    capacity = subparsers.add_parser("capacity", parents=[common], help="Capacidad máxima")
    capacity.add_argument("path")
    capacity.add_argument("--k", type=int, default=None)
    target = capacity.add_mutually_exclusive_group(required=True)
    target.add_argument("--all", action="store_true", dest="all_subsets")
    target.add_argument("--concepts")
    capacity.add_argument("--threshold", default=str(DEFAULT_THRESHOLD), help="Umbral o lista de umbrales")
    capacity.add_argument("--statistics", action="store_true", help="Estadísticas exhaustivas de pares (k = 2)")

    palette = subparsers.add_parser("palette", parents=[common], help="Paleta óptima")
    palette.add_argument("path")
    palette.add_argument("--concepts", required=True)
    palette.add_argument("--library", default="uw71", help="uw71 o ruta a un CSV de biblioteca")

    predict = subparsers.add_parser("predict", parents=[common], help="Distribución de respuestas predicha")
    predict.add_argument("path")
    predict.add_argument("--concepts", required=True)
    predict.add_argument("--features", required=True)

    analyze = subparsers.add_parser("analyze", parents=[common], help="Análisis estadístico de capacidad")
    analyze.add_argument("path")
    analyze.add_argument("--k", type=int, required=True)
    analyze.add_argument("--capacity-metrics", action="store_true")
    analyze.add_argument("--specificity", choices=["log_n", "min_max"], default="log_n",
                         help="Normalización de la entropía media")
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Registro en stderr; WARNING por defecto."""
    level = logging.DEBUG if verbose else logging.ERROR if quiet else logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


def execute(args: argparse.Namespace) -> tuple[dict[str, Any] | Iterator[dict[str, Any]], bool]:
    """
    Ejecuta el subcomando y devuelve la carga útil y si la ejecución es correcta.
    """
    config = MonteCarloConfig(
        samples=args.samples,
        seed=args.seed,
        workers=args.workers if args.workers is not None else default_workers(),
        clamp=args.clamp,
        perturb=args.perturb,
        merit=args.merit,
    )
    command = args.command
    if command == "validate":
        report = validate_command(path=args.path)
        return report, bool(report["valid"])
    elif command == "entropy":
        return entropy_command(path=args.path), True
    elif command == "distance":
        return distance_command(path=args.path, concepts=args.concepts), True
    elif command == "semdist":
        return semdist_command(path=args.path, concepts=args.concepts, features=args.features, config=config,
                               encoded=args.encoded), True
    elif command == "capacity":
        return capacity_command(path=args.path, config=config, k=args.k, concepts=args.concepts,
                                all_subsets=args.all_subsets, threshold=args.threshold,
                                statistics=args.statistics), True
    elif command == "palette":
        return palette_command(path=args.path, concepts=args.concepts, config=config, library=args.library), True
    elif command == "predict":
        return predict_command(path=args.path, concepts=args.concepts, features=args.features, config=config), True
    elif command == "analyze":
        return analyze_command(path=args.path, k=args.k, config=config,
                               capacity_metrics=args.capacity_metrics, specificity=args.specificity), True
    raise InvalidArgumentError(f"Subcomando desconocido: {command}")


def write_output(command: str, payload: dict[str, Any] | Iterator[dict[str, Any]], output: str,
                 stream: TextIO) -> None:
    """Escribe la carga útil en JSON (NDJSON para capacity) o CSV."""
    if command == "capacity":
        header = True
        for record in payload:  # type: ignore[union-attr]
            if output == "json":
                stream.write(json.dumps(record, ensure_ascii=False) + "\n")
            else:
                pd.DataFrame([__flatten(record)]).to_csv(stream, index=False, header=header)
                header = False
            stream.flush()
        return
    if output == "json":
        stream.write(json.dumps(payload, ensure_ascii=False, indent=2) + "\n")
    else:
        __csv_frame(command=command, payload=payload).to_csv(stream, index=False)  # type: ignore[arg-type]


def main(argv: Sequence[str] | None = None, stream: TextIO | None = None) -> int:
    """
    Punto de entrada de la CLI.

    Returns
    -------
    int
        Código de salida: 0 éxito, 1 error de datos, 2 error de uso.
    """
    stream = stream or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    configure_logging(verbose=args.verbose, quiet=args.quiet)

    try:
        payload, ok = execute(args=args)
        write_output(command=args.command, payload=payload, output=args.output, stream=stream)
    except UnknownIdentifierError as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except SemDiscError as e:
        logger.error("%s", e)
        return EXIT_FAILURE
    return EXIT_OK if ok else EXIT_FAILURE


def run() -> None:
    """Función síncrona para el script `semdisc` definido en pyproject.toml."""
    sys.exit(main())


def __flatten(record: dict[str, Any]) -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in record.items():
        if isinstance(value, dict):
            for inner, inner_value in value.items():
                flat[f"{key}.{inner}"] = inner_value
        elif isinstance(value, list):
            flat[key] = "|".join(str(v) for v in value)
        else:
            flat[key] = value
    return flat


def __csv_frame(command: str, payload: dict[str, Any]) -> pd.DataFrame:
    if command == "entropy":
        return pd.DataFrame(payload["concepts"])
    if command == "semdist":
        rows = [{"feature": f, "contrast": c} for f, c in payload["contrast"].items()]
        frame = pd.DataFrame(rows)
        for key in ("method", "delta_s", "modal_proportion", "seed", "samples"):
            frame[key] = payload[key]
        return frame
    if command == "palette":
        frame = pd.DataFrame([__flatten(entry) for entry in payload["palette"]])
        for key in ("delta_s", "max_capacity", "seed", "samples"):
            frame[key] = payload[key]
        return frame
    if command == "predict":
        frame = pd.DataFrame(payload["prediction"], columns=payload["concepts"])
        frame.insert(0, "feature_id", payload["features"])
        return frame
    if command == "analyze":
        return pd.DataFrame(payload["frame"])
    return pd.DataFrame([__flatten(payload)])
