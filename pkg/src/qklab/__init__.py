"""Kernels of restriction maps on spaces of holomorphic sections over products
of projective spaces, and the states built from them."""

__version__ = "0.1.0"

from .errors import QKLabError, SchemaError  # noqa: E402
from .lab import (  # noqa: E402
    Tolerances,
    UnionScenario,
    predicted_product_kernel,
    predicted_union_decomposition,
    run_covariant_recovery,
    run_lemma_probes,
    run_product_check,
    run_separability_report,
    run_union_check,
    run_zero_set_recovery,
)
from .sections import ProductSpace, SectionSpace, SectionVector, product_space, space  # noqa: E402
from .subspaces import Subspace  # noqa: E402

__all__ = [
    "__version__",
    "QKLabError",
    "SchemaError",
    "Tolerances",
    "UnionScenario",
    "predicted_product_kernel",
    "predicted_union_decomposition",
    "run_covariant_recovery",
    "run_lemma_probes",
    "run_product_check",
    "run_separability_report",
    "run_union_check",
    "run_zero_set_recovery",
    "ProductSpace",
    "SectionSpace",
    "SectionVector",
    "product_space",
    "space",
    "Subspace",
]
