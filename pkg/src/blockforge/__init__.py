"""Design and verification of Rydberg-atom complexes with prescribed ground-state languages."""

from .amalgamation import Placement, amalgamate, compose, verify_amalgamation
from .catalog import CatalogEntry, catalog
from .compiler import CircuitGraph, compile_function, constrain_output, equality_split, nor_decompose, planarize
from .core import (
    BlockadeGraph,
    Complex,
    Configuration,
    Language,
    Port,
    Structure,
    blockade_graph_of,
    format_word,
    word,
)
from .errors import (
    BlockforgeError,
    GeometryError,
    NotRealizableError,
    ResourceLimitError,
    ValidationError,
)
from .gsm import GroundManifold, enumerate_gsm, fix_port, realizes_language
from .languages import BooleanFunction, LatticeSpec, gamma_intersection, tessellated_language, truth_table_language
from .metrics import normalize, robustness, spread
from .optimizer import AnnealConfig, optimize_geometry
from .search import check_unit_disk, search_minimal
from .tessellation import Tessellation, build_fibonacci, build_surface_code

__version__ = "0.1.0"

__all__ = [
    "AnnealConfig",
    "BlockadeGraph",
    "BlockforgeError",
    "BooleanFunction",
    "CatalogEntry",
    "CircuitGraph",
    "Complex",
    "Configuration",
    "GeometryError",
    "GroundManifold",
    "Language",
    "LatticeSpec",
    "NotRealizableError",
    "Placement",
    "Port",
    "ResourceLimitError",
    "Structure",
    "Tessellation",
    "ValidationError",
    "amalgamate",
    "blockade_graph_of",
    "build_fibonacci",
    "build_surface_code",
    "catalog",
    "check_unit_disk",
    "compile_function",
    "compose",
    "constrain_output",
    "enumerate_gsm",
    "equality_split",
    "fix_port",
    "format_word",
    "gamma_intersection",
    "nor_decompose",
    "normalize",
    "optimize_geometry",
    "planarize",
    "realizes_language",
    "robustness",
    "search_minimal",
    "spread",
    "tessellated_language",
    "truth_table_language",
    "verify_amalgamation",
    "word",
]
