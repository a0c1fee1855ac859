"""Desk-scale laboratory for quasidensity of monotone operators.

Thin wrapper over the C++ core; structured payloads (operators, grid
functions, reports, certificates) travel as JSON strings.
"""

from ._core import (
    bs_apply,
    conjugate_json,
    k_conjugate,
    probe_json,
    q_form,
    r_form,
    run_suite_json,
    skew_apply,
    skew_bound,
    suite_names,
    tail_apply,
)

__all__ = [
    "bs_apply",
    "conjugate_json",
    "k_conjugate",
    "probe_json",
    "q_form",
    "r_form",
    "run_suite_json",
    "skew_apply",
    "skew_bound",
    "suite_names",
    "tail_apply",
]

__version__ = "0.1.0"
