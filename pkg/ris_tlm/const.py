"""Constants and reference defaults for the RIS transmission-line model."""

import math

from scipy.constants import c as C0
from scipy.constants import mu_0 as MU0

# derived so that MU0 * EPS0 * C0**2 == 1 to machine precision
EPS0 = 1 / (MU0 * C0**2)

# Free-space wave impedance
ZETA0 = math.sqrt(MU0 / EPS0)

# Numeric thresholds
SINGULAR_REL_TOL = 1e-12  # |Za + Zb| < tol * max(|Za|, |Zb|)
TAN_FLAG_LIMIT = 1e12
PASSIVE_TOL = 1e-9
GEOMETRY_MIN_DISTANCE = 1e-12  # meters

# Reference unit cell (FR4 patch array, 5 mm lattice)
DEFAULT_PERIOD = 5e-3
DEFAULT_GAP = 0.5e-3
DEFAULT_THICKNESS = 1.2e-3
DEFAULT_EPS_R = complex(4.4, -0.088)
DEFAULT_SIGMA_C = 58.7e6

# Reference varactor
DEFAULT_R_VAR = 0.5
DEFAULT_L_VAR = 0.7e-9
DEFAULT_C_MIN = 0.1e-12
DEFAULT_C_MAX = 0.5e-12

# Reference link scenario
DEFAULT_FREQUENCY = 8e9
DEFAULT_TX_POS = (-0.40, 0.0, 0.10)
DEFAULT_RX_POS = (0.20, 0.0, 0.20)
DEFAULT_ROWS = 30
DEFAULT_COLUMNS = 30
DEFAULT_TX_POWER = 1.0
DEFAULT_Q = 2.0

# Phase inversion
INVERSION_SCAN_POINTS = 512
INVERSION_XTOL = 1e-10  # relative to C_max
CLAMP_PHASE_TOL = 1e-6  # radians

# Field map
DEFAULT_MAP_SAMPLES = (201, 201)
DEFAULT_PLANE_X = (-0.5, 0.5)
DEFAULT_PLANE_Z = (0.01, 0.5)

# Far-field criterion for the closed-form oracle
FAR_FIELD_DIAGONALS = 10.0

# Output formatting: 9 significant digits
FLOAT_FORMAT = "{:.8e}"

HEADER_LOOKUP = "# f_hz,pol,theta_rad,c_farad,gamma_re,gamma_im"
HEADER_FIELD_MAP = "# {u}_m,{v}_m,pr_watt,pr_db"
HEADER_CELL_RESPONSE = "# f_hz,theta_deg,pol,c_farad,gamma_db,phase_deg"
HEADER_SURFACE_IMPEDANCE = "# f_hz,theta_deg,pol,c_farad,zsurf_re,zsurf_im"
HEADER_RESONANCE = "# theta_deg,pol,c_farad,f_phase_zero_hz,f_min_amplitude_hz,min_amplitude_db"
HEADER_LINK_SUMMARY = "# gamma_source,pr_watt,pr_db"

# CLI exit codes
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERIC_ERROR = 3
EXIT_VALIDATION_FAIL = 4
