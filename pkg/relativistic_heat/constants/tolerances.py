DEFAULT_C = 1.0
DEFAULT_EPS_GUARD = 1e-300
MAX_EPS_GUARD = 1e-10

HARMONIC_TOL = 1e-8

MIN_CELLS_PER_AXIS = 4

CFL_PARABOLIC = 0.25
CFL_HYPERBOLIC = 0.5
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50
STATIONARY_NEWTON_MAX_ITER = 100
MAX_HALVINGS = 30

# negatives in [-CLIP_FLOOR, 0) are roundoff and get clipped
CLIP_FLOOR = 1e-13

FRONT_THRESHOLD = 1e-8

SHOOTING_MISMATCH = 1e-12
SHOOTING_MAX_SLOPE = 1e8

CONSTANT_FIELD_TOL = 1e-12

TELEGRAPH_PULSE_HEIGHT = 0.5
TELEGRAPH_EXCESS = 0.1


def spatial_tolerance(h: float) -> float:
    return 10.0 * h * h


def temporal_tolerance(dt: float) -> float:
    return 10.0 * dt
