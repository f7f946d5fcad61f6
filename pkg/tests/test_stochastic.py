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
Tests para el módulo stochastic.

Estos tests verifican la distancia semántica analítica, la simulación Monte Carlo (distancia generalizada,
contraste y distribución predicha), su determinismo con semilla y su independencia del número de hilos.

Ejecutar: python -m pytest tests/test_stochastic.py -v -s
"""

import itertools
import math

import numpy as np
import pytest

from semdisc.core_model import AssociationTable, ConceptSet, FeatureLibrary
from semdisc.errors import InvalidArgumentError, ShapeError, ValidationError
from semdisc.stochastic import (
    MonteCarloConfig,
    MonteCarloSimulator,
    NoiseModel,
    block_generator,
    delta_s_from_proportion,
    encoded_accuracy,
    generalized_semantic_distance,
    mapping_accuracy,
    predict_response_distribution,
    sample_perturbed_table,
    semantic_contrast,
    semantic_distance_analytic,
    standard_normal_cdf,
)

# Instancias globales para los tests
simulator = MonteCarloSimulator(config=MonteCarloConfig(samples=2000, seed=5))


def make_table(values: np.ndarray, prefix: str = "f") -> AssociationTable:
    values = np.asarray(values, dtype=float)
    n_features, n_concepts = values.shape
    return AssociationTable(
        library=FeatureLibrary.from_ids([f"{prefix}{i + 1}" for i in range(n_features)]),
        concepts=ConceptSet(tuple(f"c{j + 1}" for j in range(n_concepts))),
        values=values,
    )


def test_standard_normal_cdf() -> None:
    """
    Prueba valores conocidos de Φ.

    Raises
    ------
    AssertionError
        Si Φ(0) ≠ 0.5 o Φ(1.96) no es ≈ 0.975.
    """
    print("=" * 80)
    print("TEST: test_standard_normal_cdf()")
    print("=" * 80)

    assert standard_normal_cdf(z=0.0) == 0.5, "❌ Φ(0) distinto de 0.5"
    assert abs(standard_normal_cdf(z=1.96) - 0.9750021) <= 1e-6, "❌ Φ(1.96) incorrecto"
    print("✅ Φ correcta")


def test_analytic_fixture() -> None:
    """
    Prueba la distancia semántica analítica de la tabla (0.8, 0.2 / 0.2, 0.8): ΔS ≈ 0.9926.

    Raises
    ------
    AssertionError
        Si ΔS no coincide con el cálculo a mano.
    """
    print("=" * 80)
    print("TEST: test_analytic_fixture()")
    print("=" * 80)

    delta_s = semantic_distance_analytic(sub=make_table([[0.8, 0.2], [0.2, 0.8]]))
    expected = abs(2 * standard_normal_cdf(z=1.2 / math.sqrt(4 * (1.4 * 0.16) ** 2)) - 1)
    print(f"ΔS = {delta_s}")

    assert abs(delta_s - expected) <= 1e-12, "❌ ΔS distinta de la fórmula"
    assert abs(delta_s - 0.9926) <= 1e-4, "❌ ΔS distinta de 0.9926"
    print("✅ ΔS analítica correcta")


def test_analytic_orientation_and_degenerate() -> None:
    """
    Prueba que la ΔS analítica no depende del orden de las filas y el límite con σ nulas.

    Raises
    ------
    AssertionError
        Si la orientación cambia ΔS o los casos degenerados no dan 1 y 0.
    """
    print("=" * 80)
    print("TEST: test_analytic_orientation_and_degenerate()")
    print("=" * 80)

    forward = semantic_distance_analytic(sub=make_table([[0.7, 0.4], [0.3, 0.6]]))
    backward = semantic_distance_analytic(sub=make_table([[0.3, 0.6], [0.7, 0.4]]))
    assert abs(forward - backward) <= 1e-15, "❌ La orientación cambia ΔS"

    assert semantic_distance_analytic(sub=make_table([[1.0, 0.0], [0.0, 1.0]])) == 1.0, "❌ Caso disjunto != 1"
    assert semantic_distance_analytic(sub=make_table([[1.0, 1.0], [1.0, 1.0]])) == 0.0, "❌ Caso nulo != 0"
    assert semantic_distance_analytic(sub=make_table([[0.5, 0.5], [0.5, 0.5]])) == 0.0, "❌ Columnas iguales != 0"

    with pytest.raises(ShapeError):
        semantic_distance_analytic(sub=make_table([[0.5, 0.5], [0.5, 0.5], [0.1, 0.2]]))
    print("✅ Orientación y casos degenerados correctos")


def test_delta_s_endpoints() -> None:
    """
    Prueba los extremos del reescalado: p = 1 da ΔS = 1 y p = 1/n! da ΔS = 0.

    Raises
    ------
    AssertionError
        Si algún extremo no es exacto.
    """
    print("=" * 80)
    print("TEST: test_delta_s_endpoints()")
    print("=" * 80)

    for n in (2, 3, 4):
        assert delta_s_from_proportion(p=1.0, n=n) == 1.0, f"❌ p = 1 no da 1 con n={n}"
        assert delta_s_from_proportion(p=1.0 / math.factorial(n), n=n) == 0.0, f"❌ p = 1/n! no da 0 con n={n}"
    print("✅ Extremos del reescalado exactos")


def test_monte_carlo_matches_analytic() -> None:
    """
    Prueba que la distancia generalizada coincide en media con la analítica en 50 tablas 2 × 2 aleatorias.

    Raises
    ------
    AssertionError
        Si la diferencia media supera 0.02 o la máxima 0.05.
    """
    print("=" * 80)
    print("TEST: test_monte_carlo_matches_analytic()")
    print("=" * 80)

    rng = np.random.default_rng(21)
    config = MonteCarloConfig(samples=10000, seed=3)
    differences = []
    for _ in range(50):
        table = make_table(rng.random((2, 2)))
        mc = generalized_semantic_distance(table=table, config=config).delta_s
        differences.append(abs(mc - semantic_distance_analytic(sub=table)))
    print(f"Media: {np.mean(differences)}, máxima: {np.max(differences)}")

    assert np.mean(differences) <= 0.02, "❌ Diferencia media excesiva"
    assert np.max(differences) <= 0.05, "❌ Diferencia máxima excesiva"
    print("✅ Monte Carlo coincide con la fórmula analítica")


def test_diagonal_table_reaches_one() -> None:
    """
    Prueba que una tabla diagonal de unos (σ nulas) produce siempre la misma asignación: p = 1 y ΔS = 1.

    Raises
    ------
    AssertionError
        Si ΔS o el contraste no son 1.
    """
    print("=" * 80)
    print("TEST: test_diagonal_table_reaches_one()")
    print("=" * 80)

    for n in (2, 3, 4):
        result = simulator.run(table=make_table(np.eye(n)))
        assert result.modal_proportion == 1.0, f"❌ p distinto de 1 con n={n}"
        assert result.delta_s == 1.0, f"❌ ΔS distinta de 1 con n={n}"
        assert all(c == 1.0 for c in result.contrast.values()), f"❌ Contraste distinto de 1 con n={n}"
    print("✅ Tablas diagonales alcanzan ΔS = 1")


def test_equal_table_is_chance() -> None:
    """
    Prueba que con todas las asociaciones iguales las 3! asignaciones son equiprobables.

    Raises
    ------
    AssertionError
        Si alguna frecuencia se aleja de 1/6 más de 4 errores estándar.
    """
    print("=" * 80)
    print("TEST: test_equal_table_is_chance()")
    print("=" * 80)

    samples = 6000
    result = generalized_semantic_distance(
        table=make_table(np.full((3, 3), 0.5)), config=MonteCarloConfig(samples=samples, seed=9)
    )
    chance = 1 / 6
    standard_error = math.sqrt(chance * (1 - chance) / samples)
    print(f"Frecuencias: {result.assignment_frequencies}, ΔS = {result.delta_s}")

    assert len(result.assignment_frequencies) == 6, "❌ No aparecen las 6 asignaciones"
    for count in result.assignment_frequencies.values():
        assert abs(count / samples - chance) <= 4 * standard_error, "❌ Frecuencia alejada del azar"
    assert result.delta_s <= 6 * 4 * standard_error / 5, "❌ ΔS demasiado alta para una tabla sin estructura"
    print("✅ Tabla sin estructura en el nivel de azar")


def test_determinism_and_workers() -> None:
    """
    Prueba que la simulación es determinista dada la semilla y no depende del número de hilos.

    Raises
    ------
    AssertionError
        Si dos ejecuciones con la misma semilla difieren.
    """
    print("=" * 80)
    print("TEST: test_determinism_and_workers()")
    print("=" * 80)

    table = make_table([[0.6, 0.3, 0.2], [0.4, 0.5, 0.3], [0.2, 0.4, 0.6]])
    single = generalized_semantic_distance(table=table, config=MonteCarloConfig(samples=1500, seed=42))
    again = generalized_semantic_distance(table=table, config=MonteCarloConfig(samples=1500, seed=42))
    parallel = generalized_semantic_distance(table=table, config=MonteCarloConfig(samples=1500, seed=42, workers=4))
    other = generalized_semantic_distance(table=table, config=MonteCarloConfig(samples=1500, seed=43))

    assert single.to_dict() == again.to_dict(), "❌ Misma semilla, resultados distintos"
    assert single.to_dict() == parallel.to_dict(), "❌ El número de hilos cambia el resultado"
    assert single.assignment_frequencies != other.assignment_frequencies, "❌ Semillas distintas, mismas muestras"
    print("✅ Simulación determinista e independiente de los hilos")


def test_prediction_is_doubly_stochastic() -> None:
    """
    Prueba que la distribución predicha suma 1 por filas y por columnas y que su entrada óptima es el contraste.

    Raises
    ------
    AssertionError
        Si las sumas o el contraste no coinciden.
    """
    print("=" * 80)
    print("TEST: test_prediction_is_doubly_stochastic()")
    print("=" * 80)

    table = make_table([[0.7, 0.2, 0.3], [0.3, 0.6, 0.2], [0.2, 0.3, 0.5]])
    prediction = predict_response_distribution(table=table, config=MonteCarloConfig(samples=3000, seed=1))
    print(f"Output:\n{prediction}")

    assert np.allclose(prediction.sum(axis=0), 1.0), "❌ Las columnas no suman 1"
    assert np.allclose(prediction.sum(axis=1), 1.0), "❌ Las filas no suman 1"

    contrast, optimal = semantic_contrast(table=table, config=MonteCarloConfig(samples=3000, seed=1))
    assert optimal.mapping == {"c1": "f1", "c2": "f2", "c3": "f3"}, "❌ Asignación óptima incorrecta"
    for j, row in enumerate(optimal.feature_indices):
        assert contrast[f"f{row + 1}"] == prediction[row, j], "❌ El contraste no es la entrada óptima"
    print("✅ Distribución predicha coherente con el contraste")


def test_mean_contrast_bounds_modal_proportion() -> None:
    """
    Prueba que, cuando la asignación modal es la óptima, la media del contraste es al menos p.

    Raises
    ------
    AssertionError
        Si la media del contraste es menor que p.
    """
    print("=" * 80)
    print("TEST: test_mean_contrast_bounds_modal_proportion()")
    print("=" * 80)

    table = make_table([[0.8, 0.3, 0.1, 0.2], [0.2, 0.7, 0.3, 0.1], [0.1, 0.2, 0.9, 0.3], [0.3, 0.1, 0.2, 0.6]])
    result = simulator.run(table=table)
    print(f"p = {result.modal_proportion}, contraste = {result.contrast}")

    assert result.modal_assignment == result.optimal.mapping, "❌ La asignación modal no es la óptima"
    assert np.mean(list(result.contrast.values())) >= result.modal_proportion, "❌ Contraste medio menor que p"
    assert all(0.0 <= c <= 1.0 for c in result.contrast.values()), "❌ Contraste fuera de [0, 1]"
    print("✅ Contraste medio acotado por p")


def test_large_table_uses_solver() -> None:
    """
    Prueba la simulación con n = 7 (resolución por iteración) en una tabla casi diagonal.

    Raises
    ------
    AssertionError
        Si la asignación no es siempre la diagonal.
    """
    print("=" * 80)
    print("TEST: test_large_table_uses_solver()")
    print("=" * 80)

    values = np.full((7, 7), 0.05) + np.eye(7) * 0.9
    result = generalized_semantic_distance(table=make_table(values), config=MonteCarloConfig(samples=60, seed=2))

    assert result.delta_s == 1.0, "❌ ΔS distinta de 1"
    assert result.assignment_frequencies == {tuple(range(7)): 60}, "❌ Frecuencias incorrectas"
    print("✅ Resolución por iteración correcta")


def test_merit_perturbation_variant() -> None:
    """
    Prueba las variantes de configuración: perturbar el mérito y usar mérito aislado.

    Raises
    ------
    AssertionError
        Si una tabla muy clara no da ΔS cercana a 1 en alguna variante.
    """
    print("=" * 80)
    print("TEST: test_merit_perturbation_variant()")
    print("=" * 80)

    table = make_table([[0.95, 0.05], [0.05, 0.95]])
    for perturb, merit in (("merits", "balanced"), ("ratings", "isolated"), ("ratings", "balanced")):
        config = MonteCarloConfig(samples=1000, seed=4, perturb=perturb, merit=merit, clamp=True)
        delta_s = generalized_semantic_distance(table=table, config=config).delta_s
        print(f"{perturb}/{merit}: ΔS = {delta_s}")
        assert delta_s >= 0.95, f"❌ ΔS demasiado baja con {perturb}/{merit}"
    print("✅ Variantes de configuración correctas")


def test_encoded_mapping_accuracy() -> None:
    """
    Prueba la precisión de una asignación codificada: con la óptima coincide con el contraste, con la
    contraria es complementaria en 2 × 2.

    Raises
    ------
    AssertionError
        Si las precisiones no coinciden.
    """
    print("=" * 80)
    print("TEST: test_encoded_mapping_accuracy()")
    print("=" * 80)

    table = make_table([[0.7, 0.3], [0.4, 0.6]])
    config = MonteCarloConfig(samples=2000, seed=8)
    result = generalized_semantic_distance(table=table, config=config)

    optimal = encoded_accuracy(result=result, encoded={"c1": "f1", "c2": "f2"})
    swapped = mapping_accuracy(table=table, encoded={"c1": "f2", "c2": "f1"}, config=config)
    print(f"Óptima: {optimal}, intercambiada: {swapped}")

    assert optimal["per_concept"]["c1"] == result.contrast["f1"], "❌ Precisión distinta del contraste"
    assert optimal["full_mapping"] == result.modal_proportion, "❌ Precisión completa distinta de p"
    assert abs(optimal["full_mapping"] + swapped["full_mapping"] - 1.0) <= 1e-12, "❌ No son complementarias"
    with pytest.raises(ValidationError):
        encoded_accuracy(result=result, encoded={"c1": "f1", "c2": "f1"})
    print("✅ Precisión de la asignación codificada correcta")


def test_sample_perturbed_table() -> None:
    """
    Prueba el muestreo de asociaciones: celdas con σ = 0 no cambian, el recorte respeta [0, 1] y el mismo
    generador reproduce la muestra.

    Raises
    ------
    AssertionError
        Si alguna de las propiedades no se cumple.
    """
    print("=" * 80)
    print("TEST: test_sample_perturbed_table()")
    print("=" * 80)

    table = make_table([[1.0, 0.5], [0.0, 0.02]])
    noise = NoiseModel.from_table(table=table)
    assert np.allclose(noise.sigma, [[0.0, 0.35], [0.0, 1.4 * 0.02 * 0.98]]), "❌ σ incorrectas"

    first = sample_perturbed_table(table=table, noise=noise, rng=block_generator(seed=1, stream=0, block=0), size=500)
    second = sample_perturbed_table(table=table, noise=noise, rng=block_generator(seed=1, stream=0, block=0), size=500)
    clamped = sample_perturbed_table(table=table, noise=noise, rng=block_generator(seed=1, stream=0, block=0),
                                     size=500, clamp=True)

    assert np.array_equal(first, second), "❌ El mismo generador no reproduce la muestra"
    assert np.all(first[:, 0, 0] == 1.0) and np.all(first[:, 1, 0] == 0.0), "❌ Celdas sin ruido modificadas"
    assert first.min() < 0.0 or first.max() > 1.0, "❌ Sin recorte deberían salir valores de [0, 1]"
    assert clamped.min() >= 0.0 and clamped.max() <= 1.0, "❌ El recorte no respeta [0, 1]"
    print("✅ Muestreo de asociaciones correcto")


def test_config_validation() -> None:
    """
    Prueba la validación de la configuración y de la forma de la tabla.

    Raises
    ------
    AssertionError
        Si no se lanzan los errores esperados.
    """
    print("=" * 80)
    print("TEST: test_config_validation()")
    print("=" * 80)

    with pytest.raises(InvalidArgumentError):
        MonteCarloConfig(samples=0)
    with pytest.raises(InvalidArgumentError):
        MonteCarloConfig(seed=-1)
    with pytest.raises(InvalidArgumentError):
        MonteCarloConfig(workers=0)
    with pytest.raises(ShapeError):
        simulator.run(table=make_table([[0.5, 0.2], [0.1, 0.3], [0.3, 0.3]]))
    print("✅ Validación de la configuración correcta")


def test_zero_noise_reproduces_optimum() -> None:
    """
    Prueba que con ruido nulo todas las iteraciones reproducen la asignación óptima, también con empates.

    Recorre todas las tablas 3 × 3 de ceros y unos con columnas no nulas (σ = 0 en todas las celdas) y una tabla
    7 × 7 de unos, que se resuelve con scipy en cada iteración.

    Raises
    ------
    AssertionError
        Si alguna iteración se aparta del óptimo o el contraste no es 1.
    """
    print("=" * 80)
    print("TEST: test_zero_noise_reproduces_optimum()")
    print("=" * 80)

    config = MonteCarloConfig(samples=5, seed=0)
    tables = [np.array(cells, dtype=float).reshape(3, 3) for cells in itertools.product((0.0, 1.0), repeat=9)]
    tables = [values for values in tables if np.all(values.sum(axis=0) > 0.0)]
    tables.append(np.ones((7, 7)))
    for merit in ("balanced", "isolated"):
        for values in tables:
            result = MonteCarloSimulator(config=MonteCarloConfig(samples=5, seed=0, merit=merit)).run(
                table=make_table(values)
            )
            assert result.assignment_frequencies == {result.optimal.feature_indices: 5}, \
                f"❌ Iteraciones distintas del óptimo en {values.tolist()}"
            assert all(c == 1.0 for c in result.contrast.values()), f"❌ Contraste != 1 en {values.tolist()}"
            assert result.modal_proportion == 1.0 and result.delta_s == 1.0, "❌ p o ΔS distintos de 1"

    tied = generalized_semantic_distance(table=make_table([[0, 0, 1], [0, 0, 1], [1, 1, 0]]), config=config)
    print(f"Output: {tied.optimal.mapping}, contraste = {tied.contrast}")
    assert tied.modal_assignment == tied.optimal.mapping, "❌ Asignación modal distinta de la óptima"
    print(f"✅ {2 * len(tables)} tablas sin ruido reproducen su óptimo")


def test_optimum_uses_configured_merit() -> None:
    """
    Prueba que la asignación óptima del resultado usa el tipo de mérito configurado.

    Raises
    ------
    AssertionError
        Si el mérito total no corresponde al tipo configurado.
    """
    print("=" * 80)
    print("TEST: test_optimum_uses_configured_merit()")
    print("=" * 80)

    table = make_table([[0.9, 0.8, 0.0], [0.8, 0.1, 0.0], [0.0, 0.0, 0.5]])
    balanced = generalized_semantic_distance(table=table, config=MonteCarloConfig(samples=200))
    isolated = generalized_semantic_distance(table=table, config=MonteCarloConfig(samples=200, merit="isolated"))
    print(f"Equilibrado: {balanced.optimal}, aislado: {isolated.optimal}")

    expected = {"c1": "f2", "c2": "f1", "c3": "f3"}
    assert balanced.optimal.mapping == expected and isolated.optimal.mapping == expected, "❌ Asignación óptima"
    assert abs(balanced.optimal.total_merit - 1.1) <= 1e-12, "❌ Mérito equilibrado total incorrecto"
    assert abs(isolated.optimal.total_merit - 2.1) <= 1e-12, "❌ Mérito aislado total incorrecto"
    print("✅ Óptimo con el mérito configurado")


def test_noise_standard_deviation() -> None:
    """
    Prueba que la desviación típica de 10^5 muestras de una celda de media 0.5 es 0.35 con un 2 % de margen.

    Raises
    ------
    AssertionError
        Si la desviación típica muestral se aleja de 0.35.
    """
    print("=" * 80)
    print("TEST: test_noise_standard_deviation()")
    print("=" * 80)

    table = make_table([[0.5, 0.5]])
    samples = sample_perturbed_table(table=table, noise=NoiseModel.from_table(table=table),
                                     rng=block_generator(seed=3, stream=0, block=0), size=50_000)
    std = float(samples.reshape(-1).std(ddof=1))
    print(f"Output: {std}")

    assert samples.size == 100_000, "❌ Número de muestras incorrecto"
    assert abs(std - 0.35) <= 0.02 * 0.35, "❌ Desviación típica alejada de 0.35"
    assert abs(float(samples.mean()) - 0.5) <= 0.005, "❌ Media alejada de 0.5"
    print("✅ Momento del modelo de ruido correcto")


def test_sample_size_stability() -> None:
    """
    Prueba que doblar el número de iteraciones no cambia ΔS más de 4/√muestras en tablas aleatorias.

    Raises
    ------
    AssertionError
        Si alguna ΔS cambia más de la cota.
    """
    print("=" * 80)
    print("TEST: test_sample_size_stability()")
    print("=" * 80)

    rng = np.random.default_rng(60)
    samples = 500
    for _ in range(10):
        n = int(rng.integers(2, 5))
        table = make_table(0.05 + 0.9 * rng.random((n, n)))
        small = generalized_semantic_distance(table=table, config=MonteCarloConfig(samples=samples, seed=4))
        large = generalized_semantic_distance(table=table, config=MonteCarloConfig(samples=2 * samples, seed=4))
        assert abs(large.delta_s - small.delta_s) <= 4 / math.sqrt(samples), "❌ ΔS inestable al doblar muestras"
    print("✅ ΔS estable con el número de iteraciones")


def test_equal_table_contrast_is_chance() -> None:
    """
    Prueba que con todas las asociaciones a 0.5 el contraste de cada característica es 1/n.

    Raises
    ------
    AssertionError
        Si algún contraste se aleja de 1/3 más de 4 errores estándar.
    """
    print("=" * 80)
    print("TEST: test_equal_table_contrast_is_chance()")
    print("=" * 80)

    samples = 10_000
    contrast, _ = semantic_contrast(table=make_table(np.full((3, 3), 0.5)),
                                    config=MonteCarloConfig(samples=samples, seed=12))
    chance = 1 / 3
    standard_error = math.sqrt(chance * (1 - chance) / samples)
    print(f"Output: {contrast}")

    for value in contrast.values():
        assert abs(value - chance) <= 4 * standard_error, "❌ Contraste alejado de 1/n"
    print("✅ Contraste en el nivel de azar")
