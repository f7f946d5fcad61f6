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
Servidor MCP de semdisc.

Expone por stdio las mismas operaciones que los subcomandos de la CLI. Cada herramienta recibe la ruta de un
CSV de asociaciones y devuelve el mismo JSON que `semdisc <subcomando> --output json`.
"""

import asyncio
import json
import logging
import sys
from typing import Any

from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import TextContent, Tool

from semdisc import cli
from semdisc.capacity import DEFAULT_THRESHOLD
from semdisc.stochastic import DEFAULT_SAMPLES, DEFAULT_SEED, MonteCarloConfig

logger = logging.getLogger(__name__)

# Crear instancia del servidor MCP
app = Server(name="semdisc")

PATH_PROPERTY = {"type": "string", "description": "Ruta al CSV de asociaciones (cabecera feature_id,<conceptos>)"}
CONCEPTS_PROPERTY = {
    "type": "array",
    "items": {"type": "string"},
    "description": "Conceptos por nombre, en orden",
}
FEATURES_PROPERTY = {
    "type": "array",
    "items": {"type": "string"},
    "description": "Características por identificador, una por concepto",
}
SIMULATION_PROPERTIES = {
    "samples": {"type": "integer", "description": f"Iteraciones Monte Carlo (por defecto {DEFAULT_SAMPLES})"},
    "seed": {"type": "integer", "description": f"Semilla (por defecto {DEFAULT_SEED})"},
    "workers": {"type": "integer", "description": "Hilos de la simulación"},
    "clamp": {"type": "boolean", "description": "Recorta las asociaciones perturbadas a [0, 1]"},
    "perturb": {"type": "string", "enum": ["ratings", "merits"]},
    "merit": {"type": "string", "enum": ["balanced", "isolated"]},
}


@app.list_tools()
async def list_tools() -> list[Tool]:
    """
    Lista todas las herramientas disponibles en el servidor MCP.

    Returns
    -------
    list[Tool]
        Lista de herramientas MCP con sus descripciones y esquemas de parámetros.
    """
    return [
        Tool(
            name="validate",
            description="Diagnóstico de ingestión de un CSV de asociaciones color-concepto.",
            inputSchema={"type": "object", "properties": {"path": PATH_PROPERTY}, "required": ["path"]},
        ),
        Tool(
            name="entropy",
            description="Entropía, entropía normalizada y especificidad de cada concepto.",
            inputSchema={"type": "object", "properties": {"path": PATH_PROPERTY}, "required": ["path"]},
        ),
        Tool(
            name="distance",
            description=(
                "Variación total (2 conceptos) o variación total generalizada (más de 2) entre las distribuciones "
                "de asociación, con la probabilidad de error de máxima verosimilitud."
            ),
            inputSchema={
                "type": "object",
                "properties": {"path": PATH_PROPERTY, "concepts": CONCEPTS_PROPERTY},
                "required": ["path", "concepts"],
            },
        ),
        Tool(
            name="semdist",
            description=(
                "Distancia semántica de un conjunto de colores para un conjunto de conceptos (analítica para 2 × 2, "
                "Monte Carlo en otro caso) y contraste semántico de cada color."
            ),
            inputSchema={
                "type": "object",
                "properties": {
                    "path": PATH_PROPERTY,
                    "concepts": CONCEPTS_PROPERTY,
                    "features": FEATURES_PROPERTY,
                    "encoded": {
                        "type": "object",
                        "additionalProperties": {"type": "string"},
                        "description": "Asignación codificada concepto → característica",
                    },
                    **SIMULATION_PROPERTIES,
                },
                "required": ["path", "concepts", "features"],
            },
        ),
        Tool(
            name="capacity",
            description=(
                "Capacidad máxima de discriminabilidad semántica de un conjunto de conceptos, o de todos los "
                "subconjuntos de k conceptos (all=true, devuelve una lista)."
            ),
            inputSchema={
                "type": "object",
                "properties": {
                    "path": PATH_PROPERTY,
                    "k": {"type": "integer", "description": "Tamaño de los subconjuntos"},
                    "all": {"type": "boolean", "description": "Evalúa todos los subconjuntos de k conceptos"},
                    "concepts": CONCEPTS_PROPERTY,
                    "threshold": {"type": "number", "description": f"Umbral (por defecto {DEFAULT_THRESHOLD})"},
                    "statistics": {"type": "boolean", "description": "Estadísticas exhaustivas de pares (k = 2)"},
                    **SIMULATION_PROPERTIES,
                },
                "required": ["path"],
            },
        ),
        Tool(
            name="palette",
            description="Paleta óptima (mérito equilibrado) con colores hexadecimales y contraste por concepto.",
            inputSchema={
                "type": "object",
                "properties": {
                    "path": PATH_PROPERTY,
                    "concepts": CONCEPTS_PROPERTY,
                    "library": {"type": "string", "description": "uw71 o ruta a un CSV de biblioteca"},
                    **SIMULATION_PROPERTIES,
                },
                "required": ["path", "concepts"],
            },
        ),
        Tool(
            name="predict",
            description="Distribución de respuestas predicha para un conjunto de colores y conceptos.",
            inputSchema={
                "type": "object",
                "properties": {
                    "path": PATH_PROPERTY,
                    "concepts": CONCEPTS_PROPERTY,
                    "features": FEATURES_PROPERTY,
                    **SIMULATION_PROPERTIES,
                },
                "required": ["path", "concepts", "features"],
            },
        ),
        Tool(
            name="analyze",
            description=(
                "Tabla de análisis de todos los subconjuntos de k conceptos, correlaciones de Pearson, comparación "
                "de Fisher y regresión múltiple con predictores tipificados."
            ),
            inputSchema={
                "type": "object",
                "properties": {
                    "path": PATH_PROPERTY,
                    "k": {"type": "integer", "description": "Tamaño de los subconjuntos"},
                    "capacity_metrics": {"type": "boolean", "description": "Correlaciones entre métricas (k = 2)"},
                    "specificity": {
                        "type": "string",
                        "enum": ["log_n", "min_max"],
                        "description": "Normalización de la entropía media (por defecto log_n)",
                    },
                    **SIMULATION_PROPERTIES,
                },
                "required": ["path", "k"],
            },
        ),
    ]


def simulation_config(arguments: dict[str, Any]) -> MonteCarloConfig:
    """Configuración Monte Carlo a partir de los argumentos de una herramienta."""
    workers = arguments.get("workers")
    return MonteCarloConfig(
        samples=int(arguments.get("samples", DEFAULT_SAMPLES)),
        seed=int(arguments.get("seed", DEFAULT_SEED)),
        workers=int(workers) if workers is not None else cli.default_workers(),
        clamp=bool(arguments.get("clamp", False)),
        perturb=arguments.get("perturb", "ratings"),
        merit=arguments.get("merit", "balanced"),
    )


@app.call_tool()
async def call_tool(name: str, arguments: Any) -> list[TextContent]:
    """
    Maneja las llamadas a las herramientas del servidor MCP.

    Parameters
    ----------
    name : str
        Nombre de la herramienta a ejecutar.
    arguments : Any
        Argumentos de la herramienta en formato de diccionario.

    Returns
    -------
    list[TextContent]
        Lista con el contenido de texto resultante; los errores se devuelven como texto.
    """
    arguments = arguments or {}
    try:
        path = arguments["path"]
        if name == "validate":
            result: Any = cli.validate_command(path=path)
        elif name == "entropy":
            result = cli.entropy_command(path=path)
        elif name == "distance":
            result = cli.distance_command(path=path, concepts=arguments["concepts"])
        elif name == "semdist":
            result = cli.semdist_command(
                path=path,
                concepts=arguments["concepts"],
                features=arguments["features"],
                config=simulation_config(arguments=arguments),
                encoded=arguments.get("encoded"),
            )
        elif name == "capacity":
            all_subsets = bool(arguments.get("all", False))
            records = list(cli.capacity_command(
                path=path,
                config=simulation_config(arguments=arguments),
                k=arguments.get("k"),
                concepts=arguments.get("concepts"),
                all_subsets=all_subsets,
                threshold=arguments.get("threshold", DEFAULT_THRESHOLD),
                statistics=bool(arguments.get("statistics", False)),
            ))
            result = records if all_subsets else records[0]
        elif name == "palette":
            result = cli.palette_command(
                path=path,
                concepts=arguments["concepts"],
                config=simulation_config(arguments=arguments),
                library=arguments.get("library", "uw71"),
            )
        elif name == "predict":
            result = cli.predict_command(
                path=path,
                concepts=arguments["concepts"],
                features=arguments["features"],
                config=simulation_config(arguments=arguments),
            )
        elif name == "analyze":
            result = cli.analyze_command(
                path=path,
                k=int(arguments["k"]),
                config=simulation_config(arguments=arguments),
                capacity_metrics=bool(arguments.get("capacity_metrics", False)),
                specificity=arguments.get("specificity", "log_n"),
            )
        else:
            raise ValueError(f"Herramienta desconocida: {name}")

        return [TextContent(type="text", text=json.dumps(obj=result, ensure_ascii=False, indent=2))]

    except Exception as e:
        logger.error("Error al ejecutar %s: %s", name, e)
        error_msg = f"Error al ejecutar {name}: {str(e)}"
        return [TextContent(type="text", text=error_msg)]


async def main() -> None:
    """
    Punto de entrada principal del servidor MCP.

    Inicia el servidor utilizando stdio (entrada/salida estándar) para comunicarse con el cliente MCP. Los
    registros van a stderr.
    """
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    async with stdio_server() as (read_stream, write_stream):
        await app.run(
            read_stream=read_stream,
            write_stream=write_stream,
            initialization_options=app.create_initialization_options(),
        )


def run() -> None:
    """
    Función síncrona que ejecuta el servidor MCP.

    Es el punto de entrada del script `semdisc-mcp` definido en pyproject.toml.
    """
    asyncio.run(main())


if __name__ == "__main__":
    run()
