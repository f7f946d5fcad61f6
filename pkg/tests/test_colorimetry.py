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
Tests para los módulos colorimetry y palette.

Estos tests verifican la conversión CIELAB → sRGB hexadecimal y la generación de paletas a partir de una
biblioteca con coordenadas.

Ejecutar: python -m pytest tests/test_colorimetry.py -v -s
"""

import re
from pathlib import Path

import numpy as np
import pytest

from semdisc.colorimetry import lab_to_srgb_hex, lab_to_xyz
from semdisc.data_source import load_association_csv, load_feature_library_csv, load_uw71
from semdisc.errors import InvalidArgumentError
from semdisc.palette import generate_palette
from semdisc.stochastic import MonteCarloConfig

SAMPLES = Path(__file__).parent / "data_source_samples"


def channels(hex_color: str) -> list[int]:
    return [int(hex_color[i:i + 2], 16) for i in (1, 3, 5)]


def test_neutral_colors() -> None:
    """
    Prueba los grises: negro, blanco y gris medio.

    Raises
    ------
    AssertionError
        Si algún hexadecimal no coincide.
    """
    print("=" * 80)
    print("TEST: test_neutral_colors()")
    print("=" * 80)

    assert lab_to_srgb_hex(lab=(0.0, 0.0, 0.0)) == ("#000000", True), "❌ Negro incorrecto"
    assert lab_to_srgb_hex(lab=(100.0, 0.0, 0.0)) == ("#ffffff", True), "❌ Blanco incorrecto"
    gray = lab_to_srgb_hex(lab=(50.0, 0.0, 0.0))
    print(f"Output: {gray}")
    assert gray.hex == "#777777" and gray.in_gamut, "❌ Gris medio incorrecto"
    print("✅ Grises correctos")


def test_white_point() -> None:
    """
    Prueba que L* = 100 sin croma da el blanco de referencia D65 en XYZ.

    Raises
    ------
    AssertionError
        Si XYZ no coincide con el blanco.
    """
    print("=" * 80)
    print("TEST: test_white_point()")
    print("=" * 80)

    assert np.allclose(lab_to_xyz(lab=(100.0, 0.0, 0.0)), [0.95047, 1.0, 1.08883], atol=1e-4), "❌ Blanco D65"
    print("✅ Punto blanco correcto")


def test_out_of_gamut_color() -> None:
    """
    Prueba un color fuera de la gama sRGB: se recorta y se marca.

    Raises
    ------
    AssertionError
        Si el color no se marca o los canales difieren más de 1.
    """
    print("=" * 80)
    print("TEST: test_out_of_gamut_color()")
    print("=" * 80)

    color = lab_to_srgb_hex(lab=(50.0, 80.0, -80.0))
    print(f"Output: {color}")

    assert not color.in_gamut, "❌ El color debería estar fuera de gama"
    assert re.fullmatch(r"#[0-9a-f]{6}", color.hex), "❌ Formato hexadecimal incorrecto"
    for got, expected in zip(channels(color.hex), (0xAD, 0x30, 0xFF)):
        assert abs(got - expected) <= 1, "❌ Canal recortado incorrecto"
    print("✅ Color fuera de gama recortado")


def test_invalid_lightness() -> None:
    """
    Prueba que L* fuera de [0, 100] o un triplete incompleto son errores de argumento.

    Raises
    ------
    AssertionError
        Si no se lanza InvalidArgumentError.
    """
    print("=" * 80)
    print("TEST: test_invalid_lightness()")
    print("=" * 80)

    with pytest.raises(InvalidArgumentError):
        lab_to_srgb_hex(lab=(120.0, 0.0, 0.0))
    with pytest.raises(InvalidArgumentError):
        lab_to_srgb_hex(lab=(50.0, 0.0))
    print("✅ Coordenadas inválidas rechazadas")


def test_uw71_colors_convert() -> None:
    """
    Prueba que todos los colores UW-71 se convierten a un hexadecimal válido.

    Raises
    ------
    AssertionError
        Si algún hexadecimal no tiene formato #rrggbb.
    """
    print("=" * 80)
    print("TEST: test_uw71_colors_convert()")
    print("=" * 80)

    colors = [lab_to_srgb_hex(lab=record.lab) for record in load_uw71().features]
    assert all(re.fullmatch(r"#[0-9a-f]{6}", c.hex) for c in colors), "❌ Hexadecimal inválido"
    assert colors[24].hex == "#000000" and colors[28].hex == "#ffffff", "❌ Negro o blanco UW-71 incorrectos"
    print("✅ Colores UW-71 convertidos")


def test_generate_palette() -> None:
    """
    Prueba la paleta de tres conceptos sobre una biblioteca de tres colores.

    Raises
    ------
    AssertionError
        Si la asignación, los colores o el contraste no son los esperados.
    """
    print("=" * 80)
    print("TEST: test_generate_palette()")
    print("=" * 80)

    table = load_association_csv(path=SAMPLES / "assoc_library_3.csv")
    library = load_feature_library_csv(path=SAMPLES / "library_3.csv")
    palette = generate_palette(table=table, concepts=["sun", "sea", "leaf"], library=library,
                               config=MonteCarloConfig(samples=800, seed=3))
    print(f"Output: {palette.to_dict()}")

    assert [e.feature_id for e in palette.entries] == ["1", "3", "2"], "❌ Asignación incorrecta"
    assert [e.concept for e in palette.entries] == ["sun", "sea", "leaf"], "❌ Orden de conceptos incorrecto"
    assert palette.entries[0].hex == lab_to_srgb_hex(lab=(50.0, 60.0, 40.0)).hex, "❌ Color de sun incorrecto"
    assert all(0.0 <= e.contrast <= 1.0 for e in palette.entries), "❌ Contraste fuera de [0, 1]"
    assert palette.seed == 3 and palette.samples == 800, "❌ Metadatos de la simulación incorrectos"
    assert 0.0 <= palette.delta_s <= 1.0, "❌ ΔS fuera de [0, 1]"
    print("✅ Paleta generada correctamente")
