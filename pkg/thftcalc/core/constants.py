"""
Application constants
"""

# =============================================================================
# Exit Codes
# 0 covers Inconclusive verdicts: the computation itself succeeded
# =============================================================================
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3

# =============================================================================
# Exterior Algebra
# Generator kinds in canonical order: dy before dwbar
# =============================================================================
KIND_DY = "dy"
KIND_DWBAR = "dwbar"
KIND_ORDER = {KIND_DY: 0, KIND_DWBAR: 1}

# Scalar variable prefixes of the coefficient rings
VAR_Y = "y"
VAR_W = "w"
VAR_WBAR = "wbar"
VAR_INV_T = "iT"
VAR_RATIO = "r"
VAR_GENERIC = "c"

# =============================================================================
# Kernel Splits
# =============================================================================
SPLIT_E_D = "E_d"
SPLIT_E_DBAR = "E_dbar"
SPLIT_K_FULL = "K_full"
SPLIT_G = "G"

# =============================================================================
# Theory Presets
# name -> (m, n, description); None marks a free signature
# =============================================================================
PRESETS = {
    "cs4d": (2, 1, "4-dimensional Chern-Simons theory on R^2 x C"),
    "cs5d": (1, 2, "5-dimensional Chern-Simons theory on R x C^2"),
    "bf": (None, None, "Topological-holomorphic BF theory, any (m, n)"),
    "kapustin": (2, 1, "Kapustin twist of 4d N=2 gauge theory on R^2 x C"),
    "bf2d-holomorphic": (0, 1, "Holomorphic BF theory on C"),
}

# =============================================================================
# Ladder Defaults
# =============================================================================
DEFAULT_BASE_L = 1.0
CONVERGED_TAIL = 3

# Octaves below L standing in for eps = 0 in the direct oracle
DIRECT_ZERO_OCTAVES = 90

# Exponents of the epsilon expansion removed by extrapolation
RICHARDSON_POWERS = (0.5, 1.0, 1.5)
RICHARDSON_LOG_POWERS = (1.0,)

# Gauss-Kronrod (7, 15) rule on [-1, 1]
GK15_NODES = (
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
)
GK15_WEIGHTS = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
)
# Gauss 7-point weights on the odd Kronrod nodes (indices 1, 3, ..., 13)
G7_WEIGHTS = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
)
