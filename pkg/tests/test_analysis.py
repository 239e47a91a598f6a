import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaborlike import (
    FactorizedState,
    FrameBounds,
    SampledField,
    analysis_coefficient,
    analysis_coefficients,
    box_function,
    catalog_kernel,
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
    synthesize_grid,
    wavelet_gram_table,
)
from gaborlike.analysis import NewFunction, hermite_functions
from gaborlike.errors import DimensionError, RepresentationError
from gaborlike.quadrature import QuadSpec, integrate_1d
from gaborlike.windows import LatticeSpec, make_window

TWO_PI = 2 * math.pi
ROOT_PI = math.sqrt(math.pi)
ON = LatticeSpec.gabor(TWO_PI, 1.0, 2)
DENSE = LatticeSpec.gabor(ROOT_PI, ROOT_PI, 2)
BOX2, SINC2, GAUSS2 = (FactorizedState.of(n, n) for n in ("box", "sinc", "gauss"))
TIGHT = QuadSpec(abs_tol=1e-11, rel_tol=1e-11)


# -- Gram entries ---------------------------------------------------------------------


def test_box_gram_is_delta():
    res = gram_table(BOX2, ON, 2)
    assert res.max_deviation <= 1e-14


@pytest.mark.parametrize("l, k", [(0, 0), (1, 0), (0, 1), (-2, 3), (1, -1)])
def test_gaussian_gram_factor_against_quadrature(l, k):
    a = b = ROOT_PI
    w = make_window("gauss")
    expected = math.exp(-(b * k) ** 2 / 4 - (a * l) ** 2 / 4) * np.exp(0.5j * a * b * l * k)
    v, _ = integrate_1d(lambda y: np.exp(-1j * y * a * l) * w(y + b * k) * w(y), -np.inf, np.inf, TIGHT)
    assert abs(gram_factor_1d(w, a, b, l, k) - expected) <= 1e-13
    assert abs(v - expected) <= 1e-9


@pytest.mark.parametrize("name", ["box", "sinc", "gauss", "haar"])
def test_gram_at_origin_is_norm(name):
    state = FactorizedState.of(name, name)
    assert abs(gram_gabor_factorized(state, ON, (0, 0), (0, 0)) - 1) <= 1e-12


def test_box_direct_matches_factorized():
    fac = gram_table(BOX2, ON, 1)
    direct = gram_table(BOX2, ON, 1, method="direct", kernel=catalog_kernel("landau44"))
    assert np.max(np.abs(fac.values - direct.values)) <= 1e-8


def test_gaussian_direct_entry():
    v = gram_gabor_direct(catalog_kernel("hall42"), GAUSS2, DENSE, (1, -1), (2, 1))
    assert abs(v - gram_gabor_factorized(GAUSS2, DENSE, (1, -1), (2, 1))) <= 1e-9
    assert abs(gram_gabor_direct(None, GAUSS2, DENSE, (0, 0), (0, 0)) - 1) <= 1e-9


@pytest.mark.slow
def test_sinc_direct_off_diagonal_vanishes():
    assert abs(gram_gabor_direct(None, SINC2, ON, (1, 0), (0, 0))) <= 1e-7


def test_sinc_factorized_diagonal():
    res = gram_table(SINC2, ON, 2)
    assert res.max_deviation <= 1e-14


def test_gram_method_and_lattice_checked():
    with pytest.raises(ValueError):
        gram_table(BOX2, ON, 1, method="magic")
    with pytest.raises(DimensionError):
        gram_gabor_factorized(FactorizedState.of("box"), ON, (0,), (0,))
    with pytest.raises(ValueError):
        gram_gabor_factorized(BOX2, LatticeSpec.wavelet(2), (0, 0), (0, 0))


def test_gram_json():
    data = json.loads(gram_table(BOX2, ON, 1).to_json())
    assert data["kind"] == "gabor" and len(data["first"]) == 9
    assert data["max_deviation"] <= 1e-14


def _old_inner(kernel_name, state, lattice, l, k, half_width, n):
    # inner product of two basis elements sampled in the old variables
    kern = catalog_kernel(kernel_name)
    axis = np.linspace(-half_width, half_width, n)
    axes = [axis] * state.dim
    f = synthesize_grid(kern, state.gabor_atoms(lattice, l, k), axes)
    g = synthesize_grid(kern, state, axes)
    h = axis[1] - axis[0]
    return np.sum(np.conj(f.values) * g.values) * h**state.dim


@pytest.mark.parametrize("kernel", ["landau44", pytest.param("hall42", marks=pytest.mark.slow)])
def test_gram_is_kernel_independent(kernel):
    l, k = (1, 0), (0, -1)
    old = _old_inner(kernel, GAUSS2, DENSE, l, k, 14, 281)
    assert abs(old - gram_gabor_factorized(GAUSS2, DENSE, l, k)) <= 1e-6


@pytest.mark.slow
def test_gram_is_kernel_independent_in_three_dimensions():
    state = FactorizedState.of("gauss", "gauss", "gauss")
    lat = LatticeSpec.gabor(ROOT_PI, ROOT_PI, 3)
    l, k = (1, 0, 0), (0, 0, 1)
    old = _old_inner("simple46", state, lat, l, k, 11, 89)
    assert abs(old - gram_gabor_factorized(state, lat, l, k)) <= 1e-5


idx2 = st.tuples(st.integers(-2, 2), st.integers(-2, 2))


@settings(max_examples=15)
@given(idx2, idx2, idx2, idx2)
def test_inner_product_group_law(l, k, l2, k2):
    lat = LatticeSpec((ROOT_PI, 2.0), (ROOT_PI, 1.5), ("gabor", "gabor"))
    state = FactorizedState.of("gauss", "box")
    assert abs(inner_product_from_gram(state, lat, l, k, l2, k2)
               - inner_product_direct(state, lat, l, k, l2, k2, TIGHT)) <= 1e-8


# -- wavelets ---------------------------------------------------------------------------


def test_haar_wavelet_gram_exact():
    haar2 = FactorizedState.of("haar", "haar")
    assert gram_wavelet(haar2, (1, 0), (0, 2)) == 0
    assert gram_wavelet(haar2, (0, 0), (0, 0)) == 1
    res = wavelet_gram_table(haar2, 2)
    assert res.method == "exact" and res.kind == "wavelet"
    assert res.max_deviation == 0


def test_box_wavelet_overlap_is_not_delta():
    # box dilates are not orthogonal: <2^(1/2) chi(2y), chi(y)> = 2^(-1/2)
    assert gram_wavelet(FactorizedState.of("box"), (1,), (0,)) == pytest.approx(2**-0.5)


# -- analysis coefficients ---------------------------------------------------------------


def test_coefficient_of_generator_is_gram_entry():
    state = FactorizedState.of("gauss", "box")
    psi = state.gabor_atoms(ON, (1, 0), (0, 1))
    for l, k in [((1, 0), (0, 1)), ((0, 0), (0, 0)), ((2, -1), (1, 1))]:
        expected = inner_product_from_gram(state, ON, l, k, (1, 0), (0, 1))
        assert abs(analysis_coefficient(psi, state, ON, l, k) - expected) <= 1e-10


def test_box_coefficients_of_box_cell():
    f = box_function([(1.0, (0, 0), (0, 0))])
    table = analysis_coefficients(f, BOX2, ON, 1)
    # index -1 at position 0: the origin index sits at (1, 1, 1, 1)
    expect = np.zeros((3,) * 4)
    expect[1, 1, 1, 1] = 1
    assert np.max(np.abs(table.values - expect)) <= 1e-12
    assert table.norm_sq == 1


def test_three_dimensional_coefficient():
    state = FactorizedState.of("gauss", "box", "sinc")
    lat = LatticeSpec.gabor(TWO_PI, 1.0, 3)
    g = gaussian_function([0.2, 0.4, -0.1], np.diag([1.0, 2.0, 0.5]))
    table = analysis_coefficients(g, state, lat, 1)
    for l, k in [((0, 0, 0), (0, 0, 0)), ((1, 0, -1), (0, 1, 0))]:
        pos = tuple(v + 1 for v in l + k)
        assert abs(table.values[pos] - analysis_coefficient(g, state, lat, l, k)) <= 1e-10


def test_old_representation_rejected():
    f = NewFunction(lambda y: y[..., 0] * 0, ((0, 1), (0, 1)), representation="old")
    with pytest.raises(RepresentationError):
        analysis_coefficients(f, BOX2, ON, 1)
    with pytest.raises(RepresentationError):
        analysis_coefficient(f, BOX2, ON, (0, 0), (0, 0))


def test_sampled_field_input():
    g = gaussian_function([0.3, -0.2], [[1.0, 0.2], [0.2, 1.3]], [0.4, 0.0])
    axis = np.linspace(-7, 7, 561)
    mesh = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1)
    fld = SampledField((axis, axis), g(mesh))
    for l, k in [((0, 0), (0, 0)), ((0, 1), (1, 0))]:
        assert abs(analysis_coefficient(fld, GAUSS2, DENSE, l, k) - analysis_coefficient(g, GAUSS2, DENSE, l, k)) <= 1e-6


# -- Parseval and frame sums ----------------------------------------------------------------


def test_parseval_for_generator():
    assert parseval_check(BOX2, BOX2, ON, 0) == pytest.approx(1, abs=1e-12)


def test_parseval_exact_for_box_combination():
    f = box_function([(2**-0.5, (0, 0), (0, 0)), (2**-0.5, (1, 0), (0, 0))])
    assert abs(parseval_check(f, BOX2, ON, 2) - 1) <= 1e-8


def test_parseval_gaussian_in_sinc_basis():
    g = gaussian_function([0.3, -0.2], [[1, 0.3], [0.3, 1.5]], [0.5, 0])
    curve = parseval_curve(g, SINC2, ON, 6)
    assert curve[-1] >= 0.99
    assert all(b >= a - 1e-12 for a, b in zip(curve, curve[1:]))
    assert curve[-1] <= 1 + 1e-8


@pytest.mark.parametrize("seed", [0, 1])
def test_bessel_bound_for_random_gaussians(seed):
    for g in random_gaussians(np.random.default_rng(seed), 2, 3):
        assert parseval_check(g, BOX2, ON, 3) <= 1 + 1e-8


def test_hermite_function_in_box_basis():
    curve = parseval_curve(hermite_function((1, 0)), BOX2, ON, 5)
    assert 0.95 <= curve[-1] <= 1 + 1e-8


def test_frame_sum_equals_parseval():
    g = gaussian_function([0.1, 0.0], np.eye(2))
    assert frame_sum(g, GAUSS2, DENSE, 4) == pytest.approx(parseval_check(g, GAUSS2, DENSE, 4), rel=1e-14)


def test_frame_sum_report_flags_far_function():
    far = gaussian_function([40, 40], np.eye(2))
    assert frame_sum(far, BOX2, ON, 2, report=True).truncation_dominated
    near = gaussian_function([0.2, -0.3], np.eye(2))
    rep = frame_sum(near, BOX2, ON, 4, report=True)
    assert not rep.truncation_dominated and rep.truncation == 4


def test_coefficient_check_reports_small_error():
    g = gaussian_function([0.0, 0.5], np.eye(2))
    table = analysis_coefficients(g, BOX2, ON, 2, check=True)
    assert table.error <= 1e-10


# -- frame bounds ---------------------------------------------------------------------------


def test_box_frame_bounds_at_critical_density():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fb = estimate_frame_bounds_1d(make_window("box"), TWO_PI, 1.0)
    assert abs(fb.lower - 1) <= 0.02 and abs(fb.upper - 1) <= 0.02
    assert fb.converged and fb.critical


def test_gaussian_frame_bounds_at_half_density():
    fb = estimate_frame_bounds_1d(make_window("gauss"), ROOT_PI, ROOT_PI, 128, 10)
    assert fb.converged and not fb.critical
    assert 1.6 < fb.lower < fb.upper < 2.4
    assert fb.ratio == pytest.approx(fb.upper / fb.lower)


def test_tiny_estimate_is_unconverged():
    fb = estimate_frame_bounds_1d(make_window("box"), TWO_PI, 1.0, basis_size=1, truncation=0)
    assert not fb.converged and fb.reference is None


def test_overcritical_lattice_rejected():
    with pytest.raises(ValueError):
        estimate_frame_bounds_1d(make_window("gauss"), TWO_PI, 1.1)
    with pytest.raises(ValueError):
        estimate_frame_bounds_1d(make_window("gauss"), -1.0, 1.0)


def test_critical_gaussian_warns():
    with pytest.warns(RuntimeWarning):
        estimate_frame_bounds_1d(make_window("gauss"), TWO_PI, 1.0, 8, 2)


def test_frame_bounds_json_and_order():
    fb = estimate_frame_bounds_1d(make_window("sinc"), TWO_PI, 1.0, 16, 4)
    data = json.loads(fb.to_json())
    assert data["lower"] <= data["upper"] and data["meta"]["window"] == "sinc"
    with pytest.raises(ValueError):
        FrameBounds(2.0, 1.0, 1, 1, False)


# -- helpers ------------------------------------------------------------------------------------


def test_random_gaussians_have_unit_norm():
    axis = np.linspace(-12, 12, 481)
    mesh = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1)
    h = axis[1] - axis[0]
    for g in random_gaussians(np.random.default_rng(5), 2, 4):
        assert np.sum(np.abs(g(mesh)) ** 2) * h * h == pytest.approx(g.norm**2, rel=1e-9)


def test_hermite_functions_orthonormal():
    y = np.linspace(-14, 14, 2801)
    h = y[1] - y[0]
    psi = hermite_functions(9, y)
    gram = psi @ psi.T * h
    assert np.max(np.abs(gram - np.eye(9))) <= 1e-10


def test_gaussian_function_validation():
    with pytest.raises(ValueError):
        gaussian_function([0, 0], [[1, 0], [0, -1]])
    with pytest.raises(DimensionError):
        gaussian_function([0, 0], np.eye(3))
