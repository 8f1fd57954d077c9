"""Exact revealed-preference tests for combinatorial (package) demand.

Test whether finitely many observations of set-valued demand at positive
prices can come from a quasilinear agent, recover a monotone concave
valuation when they can, and certify every failure with exact rationals.
"""

__version__ = "0.1.0"

from combdemand.core import (  # noqa: E402
    Bundle,
    DemandDataset,
    Observation,
    Prices,
    Universe,
    Valuation,
    inner_product,
    signed_inner_product,
    validate_dataset,
)
from combdemand.oracle import (  # noqa: E402
    Grid,
    demand,
    disposal_price,
    gen_valuation,
    in_range,
    indirect_utility,
    sample_dataset,
    spade_perturbation,
    supporting_price,
)
from combdemand.axioms import (  # noqa: E402
    check_cyclic_monotonicity,
    check_law_of_demand,
    check_local_stability,
    shorten_cycle,
)
from combdemand.recovery import (  # noqa: E402
    build_constraint_graph,
    evaluate_representation,
    monotone_closure,
    recover_valuation,
    verify_rationalization,
)
from combdemand.identification import (  # noqa: E402
    canonical_valuation,
    compare_rationalizations,
    segment_envelope,
    selection_integral,
)

__all__ = [
    "__version__",
    "Bundle",
    "DemandDataset",
    "Observation",
    "Prices",
    "Universe",
    "Valuation",
    "inner_product",
    "signed_inner_product",
    "validate_dataset",
    "Grid",
    "demand",
    "disposal_price",
    "gen_valuation",
    "in_range",
    "indirect_utility",
    "sample_dataset",
    "spade_perturbation",
    "supporting_price",
    "check_cyclic_monotonicity",
    "check_law_of_demand",
    "check_local_stability",
    "shorten_cycle",
    "build_constraint_graph",
    "evaluate_representation",
    "monotone_closure",
    "recover_valuation",
    "verify_rationalization",
    "canonical_valuation",
    "compare_rationalizations",
    "segment_envelope",
    "selection_integral",
]
