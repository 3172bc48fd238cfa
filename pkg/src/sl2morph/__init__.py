"""Morphisms from SL2 over an odd prime field into a black box group.

The package builds, over a configurable prime p >= 13:

- a black box group oracle hiding SL2(p) behind opaque handles,
- the semidirect-product model of PGL2 on top of it,
- the toolbox of involution-plane anchors,
- a black box field oracle coordinatizing the plane,
- the change of basis between the geometric and the algebraic SO3 pictures,
- and the end-to-end morphism mapping an ordinary SL2 matrix to a handle.

See the ``cli`` module for the command-line driver.
"""

__version__ = "0.1.0"

from .bbfield import KField
from .blackbox import bb_equiv, make_blackbox_sl2
from .matrices import Mat2, Mat3, parse_matrix_text
from .pipeline import PipelineContext, build_context, map_element
from .primefield import PrimeField, PrimeModulus, odd_part, sl2_exponent
from .sharpflat import sharp_vs_flat
from .toolbox import toolbox_sl2
from .verify import run_suites

__all__ = [
    "KField",
    "Mat2",
    "Mat3",
    "PipelineContext",
    "PrimeField",
    "PrimeModulus",
    "bb_equiv",
    "build_context",
    "make_blackbox_sl2",
    "map_element",
    "odd_part",
    "parse_matrix_text",
    "run_suites",
    "sharp_vs_flat",
    "sl2_exponent",
    "toolbox_sl2",
]
