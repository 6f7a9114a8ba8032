"""Numerics for omega^q-plurisubharmonic functions on flat Kaehler grids.

Thin wrapper over the C++ core; see the package README for the CLI and the
C++ API.
"""

from ._core import (  # noqa: F401
    ContractError,
    ConsistencyError,
    GridDomain,
    ScalarField,
    ddc_at,
    eigenvalues,
    heat_smooth,
    is_strongly_q_convex,
    kyfan_min_trace,
    nu_wedge_omega_k_json,
    omega_std_json,
    psh_margin,
    psh_margin_field_min,
    regularized_max,
    restrict_complex,
    run_suite,
    strong_positivity_certificate,
    weak_positivity_test,
    wedge_json,
)

__version__ = "0.1.0"
