"""Default tolerances and numerical settings shared by the package."""

SCHEMA_VERSION = 1
DEFAULT_SEED = 42

EXACT_TOL = 1e-12
COMPOSED_TOL = 1e-10
DEGENERATE_PLANE_TOL = 1e-10
UNIT_TOL = 1e-10
DISCRIMINANT_TOL = 1e-12
BLOCK_FORM_TOL = 1e-10
CONDITION_LIMIT = 1e8

SEPARATION_TOL = 1e-8
COINCIDENCE_TOL = 1e-8
ORTHOGONAL_PAIR_TOL = 1e-4
SEARCH_GRID = 48

GRAPH_TOL = 1e-8
LIPSCHITZ_SKIP = 1e-6
LIPSCHITZ_TOL = 1e-6
FIT_TOL = 1e-6
RANK_TOL = 1e-8
OPERATOR_NORM_TOL = 1e-8
FIT_RESTARTS = 5
SURFACE_SAMPLES = 500

KERNEL_TOL = 1e-8
KERNEL_GAP = 1e-4
PLANE_ANGLE_TOL = 1e-6
UNIQUENESS_GAP = 1e-8

QUADRATURE_PANELS = 64
QUADRATURE_NODES = 8
QUADRATURE_REL_TOL = 1e-10
QUADRATURE_MAX_DOUBLINGS = 4
UNIT_BUNDLE_TOL = 1e-8
BETA_AGREEMENT_TOL = 1e-8
HOLDER_TOL = 1e-6
BERGER_BOUNDARY_TOL = 1e-9

# Names accepted by ``--tol.<name>`` on the command line.
TOLERANCES = {
    "roundTrip": EXACT_TOL,
    "separation": SEPARATION_TOL,
    "coincidence": COINCIDENCE_TOL,
    "orthogonal": ORTHOGONAL_PAIR_TOL,
    "lipschitz": LIPSCHITZ_TOL,
    "fit": FIT_TOL,
    "rank": RANK_TOL,
    "sectional": COMPOSED_TOL,
    "angle": PLANE_ANGLE_TOL,
    "kernel": KERNEL_TOL,
    "recovery": COMPOSED_TOL,
    "quadrature": QUADRATURE_REL_TOL,
    "beta": BETA_AGREEMENT_TOL,
    "unitBundle": UNIT_BUNDLE_TOL,
    "holder": HOLDER_TOL,
}
