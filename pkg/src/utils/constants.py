PACKAGE_VERSION = "0.1.0"

# Tree recursion
FIXED_POINT_RESIDUAL_TOL = 1e-12
SEMI_INVARIANT_TOL = 1e-10
UNIQUENESS_CUTOFF = 1e-9
ROOT_XTOL = 1e-15
MAX_FIXED_POINT_ITERATIONS = 100_000

# Exponent surfaces and their derivatives
REGION_SLACK_TOL = 1e-12
MAXIMUM_EIGENVALUE_CUTOFF = -1e-9
STATIONARY_GRADIENT_TOL = 1e-8
NEWTON_MAX_ITERATIONS = 200
CLUSTER_RADIUS = 1e-6
DEFAULT_N_STARTS = 500
MIN_N_STARTS = 100
START_SHRINK = 0.98
PHI1_GRID_POINTS = 60

# Polynomial sign certificates
POLY_GRID_POINTS = 1_000_000
POLY_MAX_BISECTIONS = 40

# Quadrature
QUADRATURE_SIGMA_BOX = 8.0
QUADRATURE_EPSABS = 1e-11
QUADRATURE_EPSREL = 1e-10
QUADRATURE_FAIL_TOL = 1e-4

# Exact enumeration
MAX_ENUMERATION_N = 26
LOW_BLOCK_SIZE = 12
MAX_GAP_STATES = 200_000
DENSE_GAP_STATES = 2_000
MAX_BLOCK_SIZE = 20
DETAILED_BALANCE_TOL = 1e-12

# Cycle census
MAX_CYCLE_LENGTH = 12

# Dynamics
RANDOM_BATCH_SIZE = 4096
DEFAULT_SAMPLE_EVERY = 1

# Monte Carlo
DEFAULT_SEED = 20_240_101
MAX_SIZE_BIASED_N = 14

# Experiments
CONDITIONING_I_MAX = 40
TAU_AGREEMENT_TOL = 1e-6
INTERIOR_POINT_TOL = 1e-6
HESSIAN_MATCH_TOL = 1e-9
TWO_CYCLE_RECURSION_TOL = 1e-8
Z_SCORE_LIMIT = 4.0
BOTTLENECK_DELTA = 0.01
FLAT_DECAY_RATE = 0.01
DEFAULT_OUTPUT_DIR = "output"
