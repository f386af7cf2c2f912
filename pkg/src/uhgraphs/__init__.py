"""Ultrahomogeneous vertex-colored oriented graphs: decision, construction, classification."""

from .autiso import (
    PartialIso,
    UhVerdict,
    automorphism_group,
    canonical_form,
    extend_partial_iso,
    is_ultrahomogeneous,
    isomorphic,
)
from .ccd import (
    Ccd,
    ColorMove,
    OrientedGraph,
    apply_move,
    apply_moves,
    color_disjoint_union,
    connectivity_type,
    induced_subgraph,
    oriented,
    wreath_product,
)
from .classifier import (
    ClassificationCertificate,
    EnumerationReport,
    ExtensionCorpusReport,
    NotUh,
    OutOfScope,
    classify,
    verify_bichromatic,
    verify_extension_equivalence,
    verify_lachlan,
)
from .equivalence import EquivalenceWitness, equivalent, equivalent_up_to_colors
from .errors import BudgetExceeded, ClassificationViolation, GroupTooLarge, InvalidPartialIso
from .families import FamilySpec, enumerate_specs, format_spec, gen, gen_figure4, parse_spec
from .perm import BlockSystem, PermGroup, all_block_systems, induced_action, wreath
from .theory import (
    BlowupSpec,
    ExtensionReport,
    blow_up,
    blowup_decompositions,
    check_general_extension,
    is_easygoing,
    is_uh_partition_system,
    minimal_extension,
    neighborhood_partition,
    partition_orbit,
)

__all__ = [name for name in dir() if not name.startswith("_")]
