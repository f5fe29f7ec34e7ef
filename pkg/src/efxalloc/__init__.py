"""Exact-arithmetic EFX allocation for indivisible goods."""

from .allocators import (
    Solution,
    allocate_thm_n1,
    allocate_thm_n2,
    allocate_trivial,
    auto_allocate,
    best_bundle,
    greedy_fill,
)
from .errors import (
    CapacityError,
    EfxError,
    InfeasibleError,
    MalformedInputError,
    PreconditionError,
    ProofMismatchError,
)
from .model import (
    AdditiveValuation,
    Allocation,
    Branch,
    EfxReport,
    IterRecord,
    IterTrace,
    Ordering,
    Profile,
    RoleAssignment,
    StrictifiedValuation,
    TableValuation,
    Valuation,
    Violation,
    bundle,
    compare,
    members,
    value,
)
from .predicates import (
    check_efx,
    classify_profile,
    efx_relation,
    is_mms_feasible,
    is_set_monotonic,
    is_set_monotonic_range,
    is_size_monotonic_range,
    is_strict,
)
from .strictify import strictify, strictify_profile

__version__ = "0.1.0"
