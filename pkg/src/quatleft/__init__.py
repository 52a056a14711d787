"""Left eigenvalues of quaternion matrices through their real 4×4 block
representation: exact quaternion and polynomial arithmetic, the four-equation
characteristic system, a certified numerical solver and norm bounds."""

from .charpoly import CharSystem, build_char_system, build_pencil, full_generalized_charpoly
from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    DivisionByZero,
    IndexOutOfRange,
    ManifoldCollapse,
    NoConvergence,
    NotInRepresentation,
    QRNoConvergence,
    RankNotMultipleOfFour,
    RelationViolation,
)
from .mpoly import MultiPoly4, PolyMatrix, poly_det, poly_minor
from .quaternion import I_UNIT, J_UNIT, K_UNIT, Quaternion, QuaternionMatrix, similar
from .representation import convert_form, enumerate_forms, p_map, p_rank, q_map, q_unmap
from .solver import (
    EigenCertificate,
    SolutionSet,
    SolveConfig,
    left_spectrum_report,
    sample_manifold,
    solve_left_eigenvalues,
    verify_left_eigenvalue,
)
from .spectra import AnnulusBound, RightSpectrum, annulus, domination_check, right_eigenvalues, singular_values

import types as _types

__all__ = [n for n, v in dict(globals()).items() if not n.startswith("_") and not isinstance(v, _types.ModuleType)]
