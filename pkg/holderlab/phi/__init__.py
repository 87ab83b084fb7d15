"""The Hölder witness on the Sierpiński triangle."""

from .admissible import AdmissibleSet
from .witness import Witness

__all__ = ["AdmissibleSet", "Witness"]
