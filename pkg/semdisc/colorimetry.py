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
Conversión de coordenadas CIELAB a color sRGB hexadecimal (iluminante D65, observador 2°).
"""

import logging
from collections.abc import Sequence
from typing import NamedTuple

import numpy as np

from semdisc.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

# Blanco de referencia D65, observador 2°
WHITE_D65 = np.array([0.95047, 1.0, 1.08883])

# XYZ → RGB lineal (primarios sRGB, D65)
XYZ_TO_LINEAR_RGB = np.array([
    [3.2404542, -1.5371385, -0.4985314],
    [-0.9692660, 1.8760108, 0.0415560],
    [0.0556434, -0.2040259, 1.0572252],
])

EPSILON = 216.0 / 24389.0
KAPPA = 24389.0 / 27.0


class HexColor(NamedTuple):
    """Color sRGB en hexadecimal y si estaba dentro de la gama sin recortar."""

    hex: str
    in_gamut: bool


def lab_to_xyz(lab: Sequence[float]) -> np.ndarray:
    """CIELAB → XYZ relativo al blanco D65."""
    lightness, a, b = (float(v) for v in lab)
    fy = (lightness + 16.0) / 116.0
    f = np.array([fy + a / 500.0, fy, fy - b / 200.0])
    cubed = f**3
    linear = np.where(cubed > EPSILON, cubed, (116.0 * f - 16.0) / KAPPA)
    # Y usa directamente L* en el tramo lineal
    linear[1] = cubed[1] if lightness > KAPPA * EPSILON else lightness / KAPPA
    return linear * WHITE_D65


def lab_to_srgb_hex(lab: Sequence[float]) -> HexColor:
    """
    Convierte un triplete CIELAB a hexadecimal sRGB.

    CIELAB → XYZ (D65, 2°) → RGB lineal → corrección gamma sRGB. Los canales se recortan a [0, 1]; si hubo que
    recortar, in_gamut es False. El resultado se redondea a 8 bits por canal.

    Parameters
    ----------
    lab : Sequence[float]
        (L*, a*, b*) con L* ∈ [0, 100].

    Returns
    -------
    HexColor
        Cadena "#rrggbb" en minúsculas e indicador de gama.

    Raises
    ------
    InvalidArgumentError
        Si L* está fuera de [0, 100] o el triplete no tiene 3 componentes.

    Examples
    --------
    >>> lab_to_srgb_hex((100.0, 0.0, 0.0))
    HexColor(hex='#ffffff', in_gamut=True)
    """
    if len(lab) != 3:
        raise InvalidArgumentError(f"Se esperaba un triplete CIELAB, recibió {len(lab)} componentes")
    if not 0.0 <= float(lab[0]) <= 100.0:
        raise InvalidArgumentError(f"L* debe estar en [0, 100], recibió {lab[0]}")

    linear = XYZ_TO_LINEAR_RGB @ lab_to_xyz(lab=lab)
    # Tolerancia de redondeo para blanco y negro exactos
    in_gamut = bool(np.all((linear >= -1e-6) & (linear <= 1.0 + 1e-6)))
    linear = np.clip(linear, 0.0, 1.0)
    encoded = np.where(linear <= 0.0031308, 12.92 * linear, 1.055 * np.power(linear, 1.0 / 2.4) - 0.055)
    channels = np.rint(np.clip(encoded, 0.0, 1.0) * 255.0).astype(int)
    return HexColor(hex="#" + "".join(f"{c:02x}" for c in channels), in_gamut=in_gamut)
