from .curvature import Curvature, curvature_pipeline
from .metric import MetricField, conformal_rescale, cov_deriv
from .tensor import TensorField
from .tensorio import load_document, load_form, load_metric, load_samples, load_tractor, parse_document
from .tractor import (
    TractorSection,
    bgg_theta0,
    flat_parallel_solve,
    normality_residuals,
    split_L0,
    tractor_connection,
    wedge_identities,
)
