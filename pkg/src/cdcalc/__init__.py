"""cdcalc: certification and verification of generalized curvature-dimension
inequalities on sub-Riemannian model spaces.

The package has three layers: exact symbolic Gamma-calculus and CD
certification (`polynomial`, `fields`, `models`, `certify`), discrete heat
semigroups on periodic lattices (`lattice`), and numerical verification of
the quantitative consequences — Li-Yau estimates, Poincare-type and Sobolev
inequalities, Cheeger and ultracontractive bounds, and the metric-measure
geometry of the Heisenberg group (`inequalities`, `kernels`, `geometry`).
"""

from .certify import (
    CDParams,
    CertificateReport,
    cd_inequality_value,
    default_nu_grid,
    jet_form,
    maximize_rho1,
    verify_cd,
)
from .fields import ScalarField, SubRiemannianModel, VectorField
from .lattice import (
    DiscreteGenerator,
    HeatOperator,
    build_generator,
    build_su2_generator,
    heat_apply,
    heat_kernel_diag,
    load_function,
    save_function,
    spectrum,
)
from .models import (
    SU2_RHO1,
    ModelCatalogEntry,
    PeriodicLatticeSpec,
    catalog,
    get_model,
    heisenberg,
    su2,
)
from .report import InequalityReport, relative_violation

__all__ = [
    "CDParams",
    "CertificateReport",
    "DiscreteGenerator",
    "HeatOperator",
    "InequalityReport",
    "ModelCatalogEntry",
    "PeriodicLatticeSpec",
    "SU2_RHO1",
    "ScalarField",
    "SubRiemannianModel",
    "VectorField",
    "build_generator",
    "build_su2_generator",
    "catalog",
    "cd_inequality_value",
    "default_nu_grid",
    "get_model",
    "heat_apply",
    "heat_kernel_diag",
    "heisenberg",
    "jet_form",
    "load_function",
    "maximize_rho1",
    "relative_violation",
    "save_function",
    "spectrum",
    "su2",
    "verify_cd",
]

__version__ = "0.1.0"
