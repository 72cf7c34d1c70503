"""Exact arithmetic for noncommutative rational expressions.

The package provides exact rational linear algebra, an expression language
for noncommutative rational functions, linear-pencil realizations with
minimization, commutative symbolic evaluation on generic matrices, and
decision procedures for matricial domains.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .linalg import (  # noqa: F401
    MatTuple,
    QMatrix,
    Rat,
    ampliate,
    direct_sum,
    kron,
    mat_tuple,
    mat_tuple_from_json,
    mat_tuple_to_json,
    min_poly,
    qmatrix_from_json,
    qmatrix_to_json,
    rat,
    rat_to_str,
    scalar_tuple,
    tuple_direct_sum,
)
from .expr import (  # noqa: F401
    Add,
    Const,
    EvalUndefined,
    Expr,
    Inv,
    Mul,
    Neg,
    ParseError,
    Var,
    eval_expr,
    eval_scalar,
    format_expr,
    is_defined_at,
    max_var,
    parse,
    shift_vars,
)
from .series import (  # noqa: F401
    FreeSeries,
    NotRegularAtZero,
    expand_series,
)
from .realization import (  # noqa: F401
    BasePointMismatch,
    EqualityVerdict,
    NotRegularAtPoint,
    Realization,
    SingularPencil,
    ZeroConstantTerm,
    build,
    build_raw,
    equal,
    eval_realization,
    left_shift,
    minimize,
    pencil_at,
    realization_from_json,
    realization_to_json,
    right_shift,
    series_coeff,
    similar,
)
from .symbolic import (  # noqa: F401
    DegenerateAtSizeN,
    GenericEvaluation,
    MPoly,
    MRatFn,
    NotFactored,
    SymbolicLimits,
    SymbolicSizeLimit,
    ampliation_probe,
    direct_sum_factorization,
    edom_member,
    generic_eval,
    mpoly_det,
    mpoly_gcd,
    mpoly_lcm,
)
from .domain import (  # noqa: F401
    AnnihilatingPoint,
    CounterexampleError,
    NotInDomain,
    PencilDomain,
    build_annihilating_point,
    contains,
    find_scalar_point,
    pencil_domain,
    scalar_pencil_det,
    shift_domain_inclusion_check,
    verify_annihilating_point,
    witness,
)
