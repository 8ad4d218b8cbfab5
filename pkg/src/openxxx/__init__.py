"""Open XXX spin chain with triangular boundaries and its Gaudin limit.

Dense-matrix constructions of the bulk and boundary algebra, Bethe vectors
and Bethe equations for the chain, and the corresponding Gaudin model
obtained as ``η -> 0``.
"""

__version__ = "0.1.0"

from .boundary import (
    BoundaryParams,
    GaudinBoundary,
    TriangularBoundary,
    check_cotriangularizable,
    sample_cotriangularizable,
    triangularize,
)
from .bethe import (
    BetheState,
    b1,
    b_coefficients,
    bethe_F,
    bethe_vector,
    lambda_M,
    off_shell_residual,
    solve_bethe,
)
from .errors import (
    BoundaryConditionError,
    ConfigError,
    DimensionError,
    DomainError,
    OpenXXXError,
)
from .gaudin import (
    GaudinConfig,
    chi0,
    chi_M,
    gaudin_bethe_vector,
    gaudin_f,
    gaudin_F_operator,
    gaudin_hamiltonians,
    gaudin_lax,
    gaudin_off_shell_residual,
    quasiclassical_check,
    solve_gaudin,
    tau,
)
from .lattice import ChainConfig, monodromy_T, monodromy_T_tilde, yang_R
from .sklyanin import (
    sklyanin_determinant,
    sklyanin_monodromy,
    transfer_matrix,
    vacuum_eigenvalues,
)
from .tensor import Operator, SpinRep, spin_matrices
