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
Jerarquía de excepciones de semdisc.

Todas las excepciones del paquete derivan de SemDiscError. Las que representan datos o argumentos inválidos
heredan también de ValueError (o KeyError para identificadores desconocidos), de modo que el código cliente
puede capturarlas con las excepciones estándar de Python.
"""


class SemDiscError(Exception):
    """Error base de semdisc."""


class ValidationError(SemDiscError, ValueError):
    """Datos inválidos: asociación fuera de [0, 1], identificador duplicado, L* fuera de rango, etc."""


class DegenerateInputError(ValidationError):
    """Entrada degenerada: columna de suma cero, valores todos iguales, varianza nula o |r| = 1."""


class ShapeError(SemDiscError, ValueError):
    """Dimensiones incompatibles entre matrices o vectores."""


class InvalidArgumentError(SemDiscError, ValueError):
    """Argumento fuera del dominio admitido por la operación."""


class InfeasibleAssignmentError(SemDiscError):
    """El problema de asignación no tiene solución inyectiva (N < n)."""


class UnknownIdentifierError(SemDiscError, KeyError):
    """Identificador de concepto o característica desconocido."""

    def __str__(self) -> str:
        # KeyError entrecomilla el mensaje; se devuelve tal cual para los mensajes de la CLI
        return str(self.args[0]) if self.args else ""


class DataFormatError(SemDiscError):
    """Fichero sin cabecera o imposible de interpretar."""


class IntegrityError(SemDiscError):
    """El fichero de datos empaquetado está corrupto o incompleto."""


class SingularDesignError(SemDiscError):
    """Matriz de diseño de la regresión sin rango completo."""
