"""Qubit networks driven by random controlled-unitary interactions.

Simulation, numeric and closed-form attractor spaces, asymptotic states and
the diagnostics built on them.
"""

from .attractors import (
    AttractorSpace,
    asymptotic_state,
    closed_form_attractor_space,
    solve_attractors,
    space_intersection,
    space_subset,
    spaces_equal,
)
from .gates import GateSpec, build_gate, u_phi
from .netspec import NetworkSpec, parse_spec
from .ruo import RandomUnitaryOperation, apply, from_topology, mix
from .topology import DirectedGraph, F1Graph, F2Graph, is_base, star_f1, star_f2

__all__ = [
    "AttractorSpace",
    "DirectedGraph",
    "F1Graph",
    "F2Graph",
    "GateSpec",
    "NetworkSpec",
    "RandomUnitaryOperation",
    "apply",
    "asymptotic_state",
    "build_gate",
    "closed_form_attractor_space",
    "from_topology",
    "is_base",
    "mix",
    "parse_spec",
    "solve_attractors",
    "space_intersection",
    "space_subset",
    "spaces_equal",
    "star_f1",
    "star_f2",
    "u_phi",
]
__version__ = "0.1.0"
