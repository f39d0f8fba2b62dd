"""Complete minimal surfaces of finite total curvature from Weierstrass data
on punctured spheres: exact and floating verification of the residue, period,
and symmetry conditions, curvature-line dynamics at the ends via the Hopf
differential, and rendering of surfaces and principal foliations.
"""

__version__ = "0.1.0"

from .algebra import (
    EXACT,
    FLOAT,
    INF,
    MeromorphicForm,
    Poly,
    QQi,
    QuadDifferential,
    RatFun,
    SpherePoint,
    laurent_coefficient,
    ord_at,
    poly_root_clusters,
    residue_at,
    tau_point,
    tau_pullback,
)
from .catalog import (FamilyParams, build, carlos_first_interval, catalog_entries,
                      solve_family_parameters)
from .config import DEFAULT, Config, load_config
from .hopf import (
    ClassCVerdict,
    EndReport,
    FoliationClass,
    class_c_verdict,
    classify_end_foliation,
    end_report,
    hopf_differential,
    quadratic_limit,
    space_Q_membership,
    umbilic_points,
)
from .render import (
    Mesh,
    Polyline,
    TraceControl,
    default_sampling,
    detect_closed_line,
    export,
    integrate_immersion,
    trace_principal_line,
)
from .weierstrass import (
    CheckResult,
    DocumentError,
    EndResidues,
    SurfaceReport,
    WeierstrassData,
    check_immersion_completeness,
    check_periods,
    check_tau_compatibility,
    end_residues,
    phi_components,
    surface_from_doc,
    surface_to_doc,
    topology_report,
)

__all__ = [
    "EXACT", "FLOAT", "INF", "MeromorphicForm", "Poly", "QQi",
    "QuadDifferential", "RatFun", "SpherePoint", "laurent_coefficient",
    "ord_at", "poly_root_clusters", "residue_at", "tau_point", "tau_pullback",
    "FamilyParams", "build", "carlos_first_interval", "catalog_entries",
    "solve_family_parameters",
    "DEFAULT", "Config", "load_config",
    "ClassCVerdict", "EndReport", "FoliationClass", "class_c_verdict",
    "classify_end_foliation", "end_report", "hopf_differential",
    "quadratic_limit", "space_Q_membership", "umbilic_points",
    "Mesh", "Polyline", "TraceControl", "default_sampling", "detect_closed_line", "export",
    "integrate_immersion", "trace_principal_line",
    "CheckResult", "DocumentError", "EndResidues", "SurfaceReport",
    "WeierstrassData", "check_immersion_completeness", "check_periods",
    "check_tau_compatibility", "end_residues", "phi_components",
    "surface_from_doc", "surface_to_doc", "topology_report",
    "__version__",
]
