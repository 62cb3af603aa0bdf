"""Riesz multiresolution analyses and biorthogonal wavelets on local fields
of positive characteristic, built from N-valid trees and verified by exact
finite coset sums."""

from .algebra import FieldElement, GFBlock, field_dilate, field_norm, h0_enumerate
from .characters import CosetAddress, addr_dilate, addr_mul, addr_refine, char_pairing, rademacher
from .errors import (
    BasicStepError,
    CosetNonconstantError,
    LFWaveError,
    MaskError,
    ParameterError,
    SchemaError,
    TreeStructureError,
)
from .kernels import BACKEND
from .mra import (
    Mask,
    MRAFamily,
    build_family,
    build_mask,
    check_refinement,
    default_assignment,
    dual_mask,
    dual_scaling_hat,
    mask_coefficients,
    riesz_bounds,
    scaling_hat,
    scaling_hat_paths,
)
from .spectral import (
    ElementarySet,
    SpectralStepFunction,
    elementary_from_tree,
    indicator,
    periodized_eval,
    spectral_dilate,
    spectral_inner_product,
    spectral_integral,
    validate_elementary,
)
from .transform import (
    SpatialStepFunction,
    biorthogonality_report,
    forward_fourier,
    gram_matrix,
    inverse_fourier,
    periodization_diagnostic,
)
from .trees import ValidTree, basic_step, build_basic_tree, canonical_tree, chain_tree, enumerate_windows, validate_tree
from .verification import verify_family, verify_system
from .wavelets import (
    WaveletSystem,
    build_system,
    check_decay_hypotheses,
    check_mask_properties,
    check_matrix_condition,
    dual_wavelet_hat,
    wavelet_hat,
    wavelet_masks,
)

__version__ = "0.1.0"
