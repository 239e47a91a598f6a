import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaborlike import (
    FactorizedState,
    ReductionPlan,
    SampledField,
    basis_element,
    catalog_kernel,
    closed_form,
    reduction_plan,
    synthesize,
    synthesize_grid,
    wavelet_basis_element,
)
from gaborlike.errors import ConvergenceError, DimensionError
from gaborlike.quadrature import QuadSpec
from gaborlike.verification import figure_field
from gaborlike.windows import LatticeSpec

TWO_PI = 2 * math.pi
HALL, LANDAU, SIMPLE = (catalog_kernel(n) for n in ("hall42", "landau44", "simple46"))


def test_hall_gaussian_at_origin():
    v = synthesize(HALL, FactorizedState.of("gauss", "gauss"), [0, 0])
    assert abs(v - 1 / math.sqrt(TWO_PI)) <= 1e-12


def test_landau_box_at_pi_pi():
    v = synthesize(LANDAU, FactorizedState.of("box", "box"), [math.pi, math.pi])
    assert abs(closed_form("landau_box_box", [math.pi, math.pi]) - (-1j / math.pi**2)) <= 1e-15
    assert abs(v - 1j / math.pi**2) <= 1e-12


def test_landau_sinc_vanishes_outside_band():
    assert abs(synthesize(LANDAU, FactorizedState.of("sinc", "sinc"), [0, 4])) <= 1e-15


def test_dimension_checked():
    with pytest.raises(DimensionError):
        synthesize(HALL, FactorizedState.of("box", "box", "box"), [0, 0, 0])
    with pytest.raises(DimensionError):
        synthesize(HALL, FactorizedState.of("box", "box"), [0, 0, 0])
    with pytest.raises(ValueError):
        synthesize(HALL, FactorizedState.of("box", "box"), [0, 0], method="magic")


def test_small_gaussian_grid():
    axis = np.linspace(-2, 2, 5)
    state = FactorizedState.of("gauss", "gauss")
    fld = synthesize_grid(LANDAU, state, [axis, axis])
    for p, v in zip(fld.points(), fld.values.ravel()):
        assert abs(v - closed_form("gauss_landau", p, corrected=True)) <= 1e-6


def test_hall_box_grid_peak():
    axis = np.linspace(-3, 3, 61)
    fld = synthesize_grid(HALL, FactorizedState.of("box", "box"), [axis, axis])
    i, j = np.unravel_index(np.argmax(np.abs(fld.values)), fld.values.shape)
    assert abs(axis[i] - 0.5) <= 0.1 and abs(axis[j] - 0.5) <= 0.1


def test_grid_matches_figure_one():
    grid = ((-4.0, 4.0, 41), (-4.0, 4.0, 41))
    fig = figure_field(1, grid)
    fld = synthesize_grid(HALL, FactorizedState.of("box", "box"), fig.axes)
    assert np.max(np.abs(fld.values - fig.values)) <= 1e-6


def test_landau_sinc_grid_zero_outside_band():
    axis = np.linspace(-6, 6, 25)
    fld = synthesize_grid(LANDAU, FactorizedState.of("sinc", "sinc"), [axis, axis])
    outside = np.abs(axis) > math.pi
    assert np.all(fld.values[outside, :] == 0)


def test_grid_matches_pointwise():
    axis = np.linspace(-2, 2, 7)
    state = FactorizedState.of("sinc", "box")
    fld = synthesize_grid(HALL, state, [axis, axis])
    for p, v in zip(fld.points()[::5], fld.values.ravel()[::5]):
        assert abs(v - synthesize(HALL, state, p)) <= 1e-8


def test_grid_failure_names_node():
    strict = QuadSpec(abs_tol=1e-300, rel_tol=1e-300)
    axis = np.linspace(-1, 1, 3)
    with pytest.raises(ConvergenceError) as info:
        synthesize_grid(HALL, FactorizedState.of("sinc", "sinc"), [axis, axis], strict)
    assert "at grid node" in str(info.value)


def test_grid_is_deterministic():
    axis = np.linspace(-2, 2, 9)
    state = FactorizedState.of("box", "sinc")
    a = synthesize_grid(HALL, state, [axis, axis])
    b = synthesize_grid(HALL, state, [axis, axis])
    assert a.to_csv() == b.to_csv()


@pytest.mark.parametrize("x", [(0.0, 0.0), (0.8, -1.3), (-2.0, 1.1)])
def test_auto_matches_brute_force_oracle(x):
    state = FactorizedState.of("gauss", "gauss")
    auto = synthesize(HALL, state, x)
    brute = synthesize(HALL, state, x, method="quadrature")
    assert abs(auto - brute) <= 1e-8


def test_box_auto_matches_oracle_on_landau():
    state = FactorizedState.of("box", "box")
    for x in [(0.3, 0.2), (2.5, -1.0)]:
        assert abs(synthesize(LANDAU, state, x) - synthesize(LANDAU, state, x, method="quadrature")) <= 1e-8


def test_simple3d_box_is_analytic():
    state = FactorizedState.of("box", "box", "box")
    x = np.array([0.4, -0.2, 0.9])
    assert abs(synthesize(SIMPLE, state, x) - synthesize(SIMPLE, state, x, method="quadrature")) <= 1e-8


# -- lattice elements ---------------------------------------------------------------

LAT = LatticeSpec((TWO_PI, 1.0), (1.0, 2.0), ("gabor", "gabor"))


def test_basis_element_zero_index_is_synthesis():
    state = FactorizedState.of("box", "gauss")
    x = np.array([0.7, -0.4])
    assert basis_element(HALL, state, LAT, (0, 0), (0, 0), x) == synthesize(HALL, state, x)


@pytest.mark.parametrize("name", ["box", "gauss"])
def test_landau_lattice_element_is_shifted_generator(name):
    # landau44 has no quadratic terms: substituting y -> y - b k turns the atom
    # into a phase times the generator at the old point with c = x A + a l
    state = FactorizedState.of(name, name)
    cross = LANDAU.cross
    a, b = np.array(LAT.a), np.array(LAT.b)
    x = np.array([0.3, -0.7])
    for l, k in [((1, 0), (0, 1)), ((-1, 2), (1, -1)), ((0, 3), (2, 0))]:
        l, k = np.array(l), np.array(k)
        c = x @ cross + a * l
        x_shift = np.linalg.solve(cross.T, c)
        expected = np.exp(-1j * c @ (b * k)) * synthesize(LANDAU, state, x_shift)
        assert abs(basis_element(LANDAU, state, LAT, l, k, x) - expected) <= 1e-12


def test_gaussian_elements_decay_with_shift():
    state = FactorizedState.of("gauss", "gauss")
    near = abs(basis_element(HALL, state, LAT, (0, 0), (0, 0), [0, 0]))
    far = abs(basis_element(HALL, state, LAT, (0, 0), (6, 6), [0, 0]))
    assert far < 1e-6 * near


def test_wavelet_zero_index_is_synthesis():
    state = FactorizedState.of("haar", "haar")
    x = np.array([1.1, -0.6])
    assert wavelet_basis_element(LANDAU, state, (0, 0), (0, 0), x) == synthesize(LANDAU, state, x)


def _haar_factor(om, j, k):
    # int 2^(j/2) haar(2^j y - k) e^{i om y} dy from the three breakpoints
    s = 2.0 ** -j
    p0, p1, p2 = k * s, (k + 0.5) * s, (k + 1) * s

    def seg(lo, hi):
        if om == 0:
            return hi - lo
        return (np.exp(1j * om * hi) - np.exp(1j * om * lo)) / (1j * om)

    return 2.0 ** (j / 2) * (seg(p0, p1) - seg(p1, p2))


@pytest.mark.parametrize("x", [(0.5, 1.5), (-3.0, 2.0), (7.0, 7.0), (0.0, 0.0)])
def test_haar_landau_wavelet_against_piecewise_oracle(x):
    state = FactorizedState.of("haar", "haar")
    j, k = (1, 1), (0, -1)
    om = (x[0], x[1] - x[0])
    expected = LANDAU.amplitude * _haar_factor(om[0], j[0], k[0]) * _haar_factor(om[1], j[1], k[1])
    assert abs(wavelet_basis_element(LANDAU, state, j, k, x) - expected) <= 1e-12


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-4, 4), st.integers(-4, 4),
       st.floats(-20, 20), st.floats(-20, 20))
def test_haar_wavelet_modulus_bound(j1, j2, k1, k2, x1, x2):
    # |int K g| <= |C| * ||g||_1 and ||2^(j/2) haar(2^j . - k)||_1 = 2^(-j/2)
    v = wavelet_basis_element(LANDAU, FactorizedState.of("haar", "haar"), (j1, j2), (k1, k2), (x1, x2))
    assert abs(v) <= abs(LANDAU.amplitude) * 2.0 ** (-(j1 + j2) / 2) * (1 + 1e-12)


# -- sampled fields and plans -------------------------------------------------------


def _field():
    axes = (np.array([-1.0, 0.0, 2.0]), np.array([0.5, 1.5]))
    vals = np.arange(6) * (1 + 0.5j) - 1j
    return SampledField(axes, vals, {"kernel": "test"})


def test_field_csv_round_trip():
    fld = _field()
    text = fld.to_csv()
    assert text.splitlines()[0] == "x1,x2,re,im,abs"
    assert len(text.splitlines()) == 7
    back = SampledField.from_csv(text)
    np.testing.assert_array_equal(back.values, fld.values)
    for a, b in zip(back.axes, fld.axes):
        np.testing.assert_array_equal(a, b)


def test_field_json_round_trip(tmp_path):
    fld = _field()
    fld.to_json(tmp_path / "f.json")
    back = SampledField.from_json((tmp_path / "f.json").read_text())
    np.testing.assert_array_equal(back.values, fld.values)
    assert back.meta == {"kernel": "test"}


def test_field_validation():
    with pytest.raises(ValueError):
        SampledField((np.array([1.0, 0.0]),), np.zeros(2))
    with pytest.raises(DimensionError):
        SampledField((np.array([0.0, 1.0]),), np.zeros(3))


def test_field_norm_of_constant():
    axis = np.linspace(0, 2, 11)
    fld = SampledField((axis, axis), np.ones(121))
    assert fld.norm() == pytest.approx(2.0)


@pytest.mark.parametrize(
    "kernel, windows, numeric",
    [
        (LANDAU, ("box", "box"), ()),
        (SIMPLE, ("box", "box", "box"), ()),
        (HALL, ("box", "box"), (0,)),
        (HALL, ("sinc", "box"), (1,)),
        (HALL, ("box", "sinc"), (0,)),
    ],
)
def test_reduction_plans(kernel, windows, numeric):
    plan = reduction_plan(kernel, FactorizedState.of(*windows))
    assert plan.numeric == numeric
    assert set(plan.numeric) | set(plan.analytic) == set(range(len(windows)))


def test_plan_is_dataclass():
    assert ReductionPlan((0,), (1,)).numeric == (0,)


def test_empty_state_rejected():
    with pytest.raises(DimensionError):
        FactorizedState(())
