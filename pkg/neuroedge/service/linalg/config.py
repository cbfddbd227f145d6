SYMMETRY_TOLERANCE = 1e-12
LYAPUNOV_MAX_CONDITION = 1e14

CARE_MAX_ITERATIONS = 100
CARE_GAIN_TOLERANCE = 1e-12
CARE_STAGNATION_TOLERANCE = 1e-8
