from fractions import Fraction

# Coordinates x1..x5 on the working chart.
DIMENSION = 5
VARIABLE_NAMES = ("x1", "x2", "x3", "x4", "x5")

# Monge coordinates (x, y, p, q, z) of an ODE z' = F(x, y, y', y'', z).
ODE_VARIABLE_ALIASES = {
    "x": "x1",
    "y": "x2",
    "p": "x3",
    "q": "x4",
    "z": "x5",
}

SQRT_NAMES = ("sqrt2", "sqrt3", "sqrt6")

# Dimension of the ambient space of the 3-form, and of the tractor bundle.
SEVEN = 7

# Split signature (2, 3): number of positive and negative eigenvalues.
SIGNATURE = (2, 3)

# Origin plus four small rational points, overridable with --samples.
DEFAULT_SAMPLE_POINTS = (
    (Fraction(0), Fraction(0), Fraction(0), Fraction(0), Fraction(0)),
    (Fraction(1, 2), Fraction(-1, 3), Fraction(1, 5), Fraction(2, 7), Fraction(-1, 4)),
    (Fraction(-2, 3), Fraction(1, 4), Fraction(3, 2), Fraction(-1, 2), Fraction(1, 3)),
    (Fraction(1), Fraction(2, 5), Fraction(-3, 4), Fraction(1, 6), Fraction(2, 3)),
    (Fraction(-1, 5), Fraction(-3, 2), Fraction(2, 3), Fraction(3, 4), Fraction(-1, 7)),
)

DEFAULT_DEGREE = 2
OUTPUT_FORMATS = ("text", "structured")
DEFAULT_OUTPUT_FORMAT = "text"

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_INPUT_ERROR = 2

ENV_PREFIX = "G2CONFORMAL_"

# Slot names of a tractor section, top to bottom.
SLOT_NAMES = ("rho", "phi", "mu", "sigma")

# Keys of the frozen golden constants, in file order.
GOLDEN_KEYS = (
    "double_insertion_multiple",
    "threeform_pairing_determinant",
    "weyl_divergence_factor",
    "kostant_harmonic_dimension",
    "theorem_a_mu_factor",
    "theorem_a_rho_factor",
    "theorem_a_trace_part",
    "killing_calibration_constant",
)

# D^p C_pabc = (n - 3) A_abc in dimension 5.
WEYL_DIVERGENCE_FACTOR = 2
