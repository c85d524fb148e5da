"""Exact torus-equivariant computations for the quantum K-theory of ``CP^N``.

Everything is computed in exact arithmetic over ``Q(zeta_M)[Lambda^(+-1/M)]``:
the small J-function, its partial fractions in ``q``, the leg recursion that
reconstructs it by fixed-point localization, and the Lefschetz check in the
equivariant K-ring.
"""

from .algebra import (
    AlgebraContext,
    Cyclotomic,
    LaurentPolynomial,
    Monomial,
    TorusScalar,
    binomial_try_div,
    cyc_reduce,
    inv_one_minus,
    scalar_eq,
)
from .errors import (
    ConfigurationError,
    DomainError,
    ExprSyntaxError,
    LoweringError,
    NotAPole,
    NotInvertible,
    PoleHit,
    PowerNotInteger,
    QKLocError,
    RootOrderExceeded,
    UnknownVariable,
    UnsupportedOrder,
)
from .jfunction import JBundle, NovikovSeries, PForm, j_coeff, j_in_p_basis, j_series, required_root_order
from .kring import KClass, PPolynomial, delta_class, p_to_phi, phi_to_p, phi_value
from .localization import (
    LegSpec,
    ReferenceOracle,
    VertexOracle,
    c_coeff,
    extract_pole_part,
    lefschetz_residue_form,
    lefschetz_trace,
    reconstruct,
    tangent_eigenvalues,
    verify_degree2_example,
    verify_recursion,
)
from .parser import SessionConfig, parse_expr, parse_value
from .qfunc import (
    PartialFractionForm,
    PoleLocus,
    QFactor,
    QFunction,
    QPoint,
    qf_arith,
    qf_equal,
    qf_eval,
    qf_partial_fractions,
    qf_residue,
    qf_split_kpm,
)
from .serialize import render, to_json

__version__ = "0.1.0"
