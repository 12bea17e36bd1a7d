"""
Input validation utilities
Validation for catalog fields and command-line arguments
"""
import re

from src.services.algebra import IntMatrix
from src.services.laurent import TorusPoint

NAME_PATTERN = re.compile(r'^[A-Za-z0-9_][A-Za-z0-9_{},()+\-.\' ]*$')


class Validator:
    """Input validation utilities"""

    @staticmethod
    def validate_name(name, max_len=80):
        """Validate a record name such as ``L8a19{0,0}`` or ``P(2,-2)``"""
        if not name or not isinstance(name, str):
            return False, "Name is required"
        if len(name) > max_len:
            return False, f"Name must not exceed {max_len} characters"
        if name != name.strip() or not NAME_PATTERN.match(name):
            return False, f"Name {name!r} contains unsupported characters"
        return True, "Valid"

    @staticmethod
    def validate_integer(value, min_val=None, max_val=None, field_name="Field"):
        """Validate integer value"""
        if isinstance(value, bool):
            return False, f"{field_name} must be a valid number"
        try:
            val = int(value)
            if isinstance(value, float) and val != value:
                return False, f"{field_name} must be a whole number"
            if min_val is not None and val < min_val:
                return False, f"{field_name} must be at least {min_val}"
            if max_val is not None and val > max_val:
                return False, f"{field_name} must not exceed {max_val}"
            return True, val
        except (ValueError, TypeError):
            return False, f"{field_name} must be a valid number"

    @staticmethod
    def validate_matrix(value, field_name="Matrix", square=False):
        """
        Validate a nested list of integers.

        Returns:
            Tuple (True, IntMatrix) or (False, error_message)
        """
        if isinstance(value, IntMatrix):
            matrix = value
        else:
            if not isinstance(value, list) or any(not isinstance(row, list) for row in value):
                return False, f"{field_name} must be a list of integer rows"
            if any(isinstance(x, bool) or not isinstance(x, int) for row in value for x in row):
                return False, f"{field_name} entries must be integers"
            try:
                matrix = IntMatrix.from_rows(value)
            except ValueError as exc:
                return False, f"{field_name}: {exc}"
        if square and not matrix.is_square:
            return False, f"{field_name} must be square, got {matrix.rows}x{matrix.cols}"
        return True, matrix

    @staticmethod
    def validate_colouring(value, components, mu):
        """A colour in 1..mu for each component, every colour used"""
        if not isinstance(value, list) or len(value) != components:
            return False, f"Colouring must list one colour for each of the {components} components"
        colours = []
        for entry in value:
            ok, colour = Validator.validate_integer(entry, 1, mu, "Colour")
            if not ok:
                return False, colour
            colours.append(colour)
        if set(colours) != set(range(1, mu + 1)):
            return False, f"Colouring must use every colour 1..{mu}"
        return True, tuple(colours)

    @staticmethod
    def validate_mu(mu, components):
        """Colour count between 1 and the number of components"""
        return Validator.validate_integer(mu, 1, components, "mu")

    @staticmethod
    def validate_grid_order(order):
        return Validator.validate_integer(order, 1, 720, "Grid order")

    @staticmethod
    def validate_point(text, mu):
        """Parse ``p1/q1,...,pmu/qmu`` into a TorusPoint with mu coordinates"""
        if not text or not isinstance(text, str):
            return False, "Point is required"
        try:
            point = TorusPoint.parse(text)
        except ValueError as exc:
            return False, str(exc)
        if point.num_vars != mu:
            return False, f"Point {text!r} has {point.num_vars} coordinates, expected {mu}"
        return True, point

    @staticmethod
    def validate_provenance(value):
        """Provenance is a flat mapping of datum name to source note"""
        if not isinstance(value, dict):
            return False, "Provenance must be an object"
        for key, note in value.items():
            if not isinstance(key, str) or not isinstance(note, str):
                return False, "Provenance keys and notes must be strings"
        return True, "Valid"
