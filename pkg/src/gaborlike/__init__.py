"""Gabor-like and wavelet-like bases built through linear canonical transformations.

A factorized state ``Psi_n(y) = h_1(y_1) ... h_d(y_d)`` in new variables is
mapped to old variables by a quadratic-phase kernel ``K(x; y)``.  The image
of a Gabor (or dyadic wavelet) lattice is again an orthonormal basis or
frame, whose elements are in general not factorized.

Typical use::

    >>> import numpy as np
    >>> from gaborlike import catalog_kernel, FactorizedState, synthesize
    >>> psi = synthesize(catalog_kernel("landau44"), FactorizedState.of("gauss", "gauss"), np.zeros(2))
    >>> round(abs(psi), 6)
    0.56419
"""

from .analysis import (
    CoefficientTable,
    FrameBounds,
    FrameSum,
    GramResult,
    NewFunction,
    analysis_coefficient,
    analysis_coefficients,
    box_function,
    estimate_frame_bounds_1d,
    frame_sum,
    gaussian_function,
    gram_factor_1d,
    gram_gabor_direct,
    gram_gabor_factorized,
    gram_table,
    gram_wavelet,
    hermite_function,
    inner_product_direct,
    inner_product_from_gram,
    parseval_check,
    parseval_curve,
    random_gaussians,
    wavelet_gram_table,
)
from .canonical import MAP_NAMES, SymplecticMap, catalog_map, check_symplectic, symplectic_form
from .closed_forms import CLOSED_FORM_IDS, CLOSED_FORMS, ClosedForm, FactorResolution, closed_form, resolve_printed_factor
from .errors import (
    CatalogError,
    ConvergenceError,
    DimensionError,
    GaborLikeError,
    RepresentationError,
    UnsupportedWindowError,
)
from .kernel import KERNEL_NAMES, QuadraticPhaseKernel, catalog_kernel, kernel_eval, unitary_amplitude
from .quadrature import DEFAULT_SPEC, QuadSpec, integrate_1d, integrate_iterated
from .synthesis import (
    FactorizedState,
    ReductionPlan,
    SampledField,
    basis_element,
    reduction_plan,
    synthesize,
    synthesize_grid,
    wavelet_basis_element,
)
from .windows import (
    WINDOW_NAMES,
    AffineWindow,
    LatticeSpec,
    Window1D,
    gabor_element,
    load_tabulated,
    make_window,
    wavelet_element,
    window_eval,
    window_fourier,
)

__version__ = "0.1.0"
