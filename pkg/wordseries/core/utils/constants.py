EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_HYPOTHESIS = 3
EXIT_RESONANCE = 4

QUASIPERIODIC = 'quasiperiodic'
AUTONOMOUS = 'autonomous'

LINEAR_PROJECTOR = 'linear-projector'
ANGLE_SHIFT = 'angle-shift'

GROUP = 'group'
ALGEBRA = 'algebra'

COEFFICIENT_KINDS = ('alpha', 'alphabar', 'betabar', 'kappa', 'gamma-u', 'rho')

SUITES = ('algebra', 'transport', 'grouplaw', 'normalform', 'scaling')

# Word serialization
EMPTY_WORD = 'e'
LETTER_SEPARATOR = ';'
COMPONENT_SEPARATOR = ','

# Tolerances
GROUP_TOL = 1e-10
ALGEBRA_TOL = 1e-12
GROUP_LAW_TOL = 1e-11
TRANSPORT_TOL = 1e-11
ORACLE_TOL = 1e-8
REFERENCE_FIELD_TOL = 1e-10
BRACKET_TOL = 1e-9
PULLBACK_TOL = 1e-9
EQUIVARIANCE_TOL = 1e-10
COMPOSITION_TOL = 1e-10
FLOW_TOL = 1e-9
FACTORIZATION_TOL = 1e-12
FINITE_DIFFERENCE_TOL = 1e-6
PROJECTOR_TOL = 1e-12
EIGEN_TOL = 1e-12

SLOPE_MARGIN = 0.5
