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
Tests para la interfaz de línea de comandos.

Estos tests ejecutan `semdisc.cli.main` con distintos subcomandos sobre los ficheros de ejemplo y comprueban
la salida JSON/NDJSON/CSV y los códigos de salida.

Ejecutar: python -m pytest tests/test_cli.py -v -s
"""

import io
import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from semdisc import cli
from semdisc.core_model import AssociationTable, ConceptSet, FeatureLibrary
from semdisc.data_source import write_association_csv
from semdisc.errors import InvalidArgumentError

SAMPLES = Path(__file__).parent / "data_source_samples"


def run_cli(*argv: str) -> tuple[int, str]:
    stream = io.StringIO()
    code = cli.main(argv=list(argv), stream=stream)
    return code, stream.getvalue()


def test_semdist_two_by_two() -> None:
    """
    Prueba `semdist` sobre la tabla 2 × 2 de ejemplo: método analítico y ΔS ≈ 0.9926.

    Raises
    ------
    AssertionError
        Si el código de salida o la ΔS no son los esperados.
    """
    print("=" * 80)
    print("TEST: test_semdist_two_by_two()")
    print("=" * 80)

    code, output = run_cli("semdist", str(SAMPLES / "semdist_2x2.csv"), "--concepts", "c1,c2",
                           "--features", "f1,f2", "--samples", "500", "--encoded", "c1=f1,c2=f2")
    payload = json.loads(output)
    print(f"Output: {payload}")

    assert code == 0, "❌ Código de salida distinto de 0"
    assert payload["method"] == "analytic", "❌ Método incorrecto"
    assert abs(payload["delta_s"] - 0.9926) <= 1e-4, "❌ ΔS distinta de 0.9926"
    assert payload["optimal_assignment"]["mapping"] == {"c1": "f1", "c2": "f2"}, "❌ Asignación óptima incorrecta"
    assert payload["seed"] == 0 and payload["samples"] == 500, "❌ Faltan semilla o muestras"
    assert set(payload["encoded_accuracy"]) == {"per_concept", "full_mapping"}, "❌ Falta la precisión codificada"
    print("✅ semdist correcto")


def test_validate_exit_codes() -> None:
    """
    Prueba `validate`: 0 con un fichero válido y 1 con un valor fuera de rango.

    Raises
    ------
    AssertionError
        Si los códigos de salida no son los esperados.
    """
    print("=" * 80)
    print("TEST: test_validate_exit_codes()")
    print("=" * 80)

    code, output = run_cli("validate", str(SAMPLES / "assoc_3x2.csv"))
    assert code == 0 and json.loads(output)["valid"], "❌ Fichero válido rechazado"

    code, output = run_cli("validate", str(SAMPLES / "assoc_out_of_range.csv"))
    assert code == 1, "❌ Fichero inválido con código distinto de 1"
    assert "fila 2" in json.loads(output)["issues"][0], "❌ El informe no indica la fila"
    print("✅ Códigos de salida de validate correctos")


def test_usage_errors() -> None:
    """
    Prueba los errores de uso: concepto desconocido, argumentos ausentes y --all con --concepts.

    Raises
    ------
    AssertionError
        Si el código de salida no es 2.
    """
    print("=" * 80)
    print("TEST: test_usage_errors()")
    print("=" * 80)

    path = str(SAMPLES / "assoc_3x2.csv")
    assert run_cli("distance", path, "--concepts", "peach,unknown")[0] == 2, "❌ Concepto desconocido"
    assert run_cli("semdist", path, "--concepts", "peach,celery")[0] == 2, "❌ Falta --features"
    assert run_cli("capacity", path, "--all", "--concepts", "peach,celery")[0] == 2, "❌ --all y --concepts"
    assert run_cli("entropy", str(SAMPLES / "no_existe.csv"))[0] == 1, "❌ Fichero inexistente"
    print("✅ Errores de uso correctos")


def test_capacity_all_ndjson() -> None:
    """
    Prueba `capacity --all`: una línea NDJSON por subconjunto, en orden de enumeración.

    Raises
    ------
    AssertionError
        Si el número de líneas o los conceptos no coinciden.
    """
    print("=" * 80)
    print("TEST: test_capacity_all_ndjson()")
    print("=" * 80)

    code, output = run_cli("capacity", str(SAMPLES / "assoc_library_3.csv"), "--all", "--k", "2", "--statistics",
                           "--threshold", "0.5,0.9")
    records = [json.loads(line) for line in output.splitlines()]
    print(f"Output: {records}")

    assert code == 0, "❌ Código de salida distinto de 0"
    assert len(records) == 3, "❌ Número de líneas incorrecto"
    assert [r["concepts"] for r in records] == [["sun", "sea"], ["sun", "leaf"], ["sea", "leaf"]], \
        "❌ Orden de enumeración incorrecto"
    assert all(set(r["statistics"]["sweep"]) == {"0.5", "0.9"} for r in records), "❌ Falta el barrido"
    print("✅ capacity --all correcto")


def test_capacity_deterministic_output() -> None:
    """
    Prueba que dos ejecuciones con la misma semilla y distinto número de hilos producen la misma salida.

    Raises
    ------
    AssertionError
        Si las salidas difieren.
    """
    print("=" * 80)
    print("TEST: test_capacity_deterministic_output()")
    print("=" * 80)

    args = ("capacity", str(SAMPLES / "assoc_library_3.csv"), "--all", "--k", "3", "--samples", "400",
            "--seed", "11")
    first = run_cli(*args, "--workers", "1")
    second = run_cli(*args, "--workers", "3")

    assert first[0] == 0 and first == second, "❌ Salida no determinista"
    print("✅ Salida determinista")


def test_csv_output() -> None:
    """
    Prueba la salida CSV de `entropy` y de `predict`.

    Raises
    ------
    AssertionError
        Si las tablas CSV no tienen las filas y columnas esperadas.
    """
    print("=" * 80)
    print("TEST: test_csv_output()")
    print("=" * 80)

    code, output = run_cli("entropy", str(SAMPLES / "assoc_3x2.csv"), "--output", "csv")
    frame = pd.read_csv(io.StringIO(output))
    print(f"Output:\n{frame}")
    assert code == 0, "❌ Código de salida distinto de 0"
    assert list(frame["concept"]) == ["peach", "celery"], "❌ Filas de entropía incorrectas"

    code, output = run_cli("predict", str(SAMPLES / "assoc_library_3.csv"), "--concepts", "sun,sea,leaf",
                           "--features", "1,3,2", "--samples", "300", "--output", "csv")
    frame = pd.read_csv(io.StringIO(output))
    assert code == 0, "❌ Código de salida distinto de 0"
    assert list(frame.columns) == ["feature_id", "sun", "sea", "leaf"], "❌ Columnas de la predicción incorrectas"
    assert (frame[["sun", "sea", "leaf"]].sum(axis=1) - 1.0).abs().max() <= 1e-9, "❌ Las filas no suman 1"
    print("✅ Salida CSV correcta")


def test_palette_command() -> None:
    """
    Prueba `palette` con una biblioteca externa.

    Raises
    ------
    AssertionError
        Si la paleta no tiene un color por concepto.
    """
    print("=" * 80)
    print("TEST: test_palette_command()")
    print("=" * 80)

    code, output = run_cli("palette", str(SAMPLES / "assoc_library_3.csv"), "--concepts", "sun,sea",
                           "--library", str(SAMPLES / "library_3.csv"), "--samples", "300")
    payload = json.loads(output)

    assert code == 0, "❌ Código de salida distinto de 0"
    assert [e["concept"] for e in payload["palette"]] == ["sun", "sea"], "❌ Conceptos de la paleta incorrectos"
    assert all(e["hex"].startswith("#") and len(e["hex"]) == 7 for e in payload["palette"]), "❌ Hexadecimal"
    print("✅ palette correcto")


def test_workers_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    """
    Prueba la variable de entorno del número de hilos y el análisis de argumentos auxiliares.

    Raises
    ------
    AssertionError
        Si los valores leídos no son los esperados.
    """
    print("=" * 80)
    print("TEST: test_workers_environment()")
    print("=" * 80)

    monkeypatch.delenv(cli.WORKERS_ENV, raising=False)
    assert cli.default_workers() == 1, "❌ Valor por defecto distinto de 1"
    monkeypatch.setenv(cli.WORKERS_ENV, "4")
    assert cli.default_workers() == 4, "❌ Variable de entorno ignorada"
    monkeypatch.setenv(cli.WORKERS_ENV, "cero")
    with pytest.raises(InvalidArgumentError):
        cli.default_workers()

    assert cli.parse_encoded("a=1, b=2") == {"a": "1", "b": "2"}, "❌ Asignación codificada mal leída"
    assert cli.parse_thresholds("0.5,0.7") == [0.5, 0.7], "❌ Umbrales mal leídos"
    with pytest.raises(InvalidArgumentError):
        cli.parse_encoded("a1")
    print("✅ Configuración auxiliar correcta")


def test_simulation_options_are_usage_errors() -> None:
    """
    Prueba que muestras, semilla e hilos fuera de dominio son errores de uso (código 2).

    Raises
    ------
    AssertionError
        Si el código de salida no es 2.
    """
    print("=" * 80)
    print("TEST: test_simulation_options_are_usage_errors()")
    print("=" * 80)

    path = str(SAMPLES / "semdist_2x2.csv")
    base = ("semdist", path, "--concepts", "c1,c2", "--features", "f1,f2")
    for option in (("--samples", "0"), ("--samples", "diez"), ("--seed", "-1"), ("--seed", str(2**64)),
                   ("--workers", "0")):
        code, _ = run_cli(*base, *option)
        assert code == 2, f"❌ {option} no es un error de uso"
    assert run_cli(*base, "--seed", str(2**64 - 1), "--samples", "10")[0] == 0, "❌ Semilla máxima rechazada"
    print("✅ Opciones de simulación validadas por argparse")


def test_full_size_determinism(tmp_path: Path) -> None:
    """
    Prueba `capacity --k 4 --all` sobre una tabla sintética 71 × 8 con semilla 7: la salida NDJSON es idéntica
    con 1 y con 4 hilos.

    Raises
    ------
    AssertionError
        Si las salidas difieren o no hay una línea por subconjunto.
    """
    print("=" * 80)
    print("TEST: test_full_size_determinism()")
    print("=" * 80)

    table = AssociationTable(
        library=FeatureLibrary.from_ids([str(i + 1) for i in range(71)]),
        concepts=ConceptSet(tuple(f"concepto_{j + 1}" for j in range(8))),
        values=np.random.default_rng(7).random((71, 8)),
    )
    path = tmp_path / "sintetica.csv"
    write_association_csv(table=table, path=path)

    args = ("capacity", str(path), "--all", "--k", "4", "--seed", "7", "--samples", "1000")
    single = run_cli(*args, "--workers", "1")
    parallel = run_cli(*args, "--workers", "4")

    assert single[0] == 0 and parallel[0] == 0, "❌ Código de salida distinto de 0"
    assert len(single[1].splitlines()) == 70, "❌ Se esperaban C(8, 4) = 70 líneas"
    assert single[1] == parallel[1], "❌ Salida NDJSON distinta con 1 y 4 hilos"
    print("✅ Salida idéntica a tamaño completo")


def test_analyze_specificity_option(tmp_path: Path) -> None:
    """
    Prueba `analyze --specificity min_max` sobre una tabla aleatoria de 8 características y 5 conceptos.

    Raises
    ------
    AssertionError
        Si la normalización no se refleja en la salida.
    """
    print("=" * 80)
    print("TEST: test_analyze_specificity_option()")
    print("=" * 80)

    table = AssociationTable(
        library=FeatureLibrary.from_ids([f"f{i + 1}" for i in range(8)]),
        concepts=ConceptSet(tuple(f"c{j + 1}" for j in range(5))),
        values=np.random.default_rng(46).random((8, 5)),
    )
    path = tmp_path / "analisis.csv"
    write_association_csv(table=table, path=path)

    code, output = run_cli("analyze", str(path), "--k", "2", "--specificity", "min_max")
    payload = json.loads(output)

    assert code == 0, "❌ Código de salida distinto de 0"
    assert payload["specificity"] == "min_max", "❌ Normalización no indicada"
    assert payload["rows"] == 9 and len(payload["excluded"]) == 1, "❌ Filas o exclusiones incorrectas"
    assert run_cli("analyze", str(path), "--k", "2", "--specificity", "otra")[0] == 2, "❌ Opción inválida aceptada"
    print("✅ Opción de especificidad correcta")
