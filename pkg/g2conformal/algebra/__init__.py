from .kostant import (
    Cochain,
    KostantComplex,
    ce_differential,
    kostant_codiff,
    laplacian_kernel,
    normality_containment_check,
)
from .lie_g2 import (
    LieElt,
    ThreeForm7,
    bilinear_from_threeform,
    g2_basis,
    grading_decompose,
    iphi_split,
    so34_basis,
    three_form_phi,
)
