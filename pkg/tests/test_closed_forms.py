import math

import numpy as np
import pytest

from gaborlike import CLOSED_FORM_IDS, CLOSED_FORMS, catalog_kernel, closed_form, resolve_printed_factor, synthesize
from gaborlike.errors import CatalogError, DimensionError

TWO_PI = 2 * math.pi


def test_known_values():
    assert closed_form("landau_box_box", [0, 0]) == pytest.approx(-1 / TWO_PI, abs=1e-15)
    assert closed_form("gauss_landau", [1, 1]) == pytest.approx(math.exp(-0.5) / math.sqrt(TWO_PI), abs=1e-15)
    assert closed_form("haar_landau", [TWO_PI, 0]) == pytest.approx(2 / math.pi**3, abs=1e-15)


def test_vectorised_evaluation():
    pts = np.array([[0.1, 0.2], [1.5, -0.4], [-2.0, 3.0]])
    out = closed_form("landau_sinc_box", pts)
    assert out.shape == (3,)
    for p, v in zip(pts, out):
        assert v == closed_form("landau_sinc_box", p)


_PTS = [(0.37, -0.81, 0.55), (1.9, 0.45, -1.2), (-0.7, 2.35, 0.8), (3.1, -2.2, 1.7)]


@pytest.mark.parametrize("cid", CLOSED_FORM_IDS)
def test_corrected_forms_match_synthesis(cid):
    cf = CLOSED_FORMS[cid]
    kern, state = catalog_kernel(cf.kernel), cf.state()
    for p in _PTS:
        x = np.array(p[: cf.dim])
        assert abs(closed_form(cid, x, corrected=True) - synthesize(kern, state, x)) <= 1e-7, x


@pytest.mark.parametrize("cid", ["hall_box_box", "hall_sinc_sinc", "landau_sinc_sinc", "gauss_hall", "haar_landau"])
def test_uncorrected_forms_already_agree(cid):
    cf = CLOSED_FORMS[cid]
    assert cf.correction == 1
    kern, state = catalog_kernel(cf.kernel), cf.state()
    x = np.array(_PTS[1][: cf.dim])
    assert abs(closed_form(cid, x) - synthesize(kern, state, x)) <= 1e-7


def test_alias_and_errors():
    x = [0.2, 0.3, -0.4]
    assert closed_form("simple3d_box³", x) == closed_form("simple3d_box3", x)
    with pytest.raises(CatalogError):
        closed_form("hall_gauss_box", [0, 0])
    with pytest.raises(DimensionError):
        closed_form("hall_box_box", [0, 0, 0])


@pytest.mark.slow
@pytest.mark.parametrize(
    "cid, factor",
    [("landau_box_box", -1), ("landau_sinc_box", -1j), ("simple3d_box3", -1), ("hall_box_box", 1),
     ("hall_sinc_sinc", 1), ("haar_landau", 1)],
)
def test_resolved_unimodular_factors(cid, factor):
    res = resolve_printed_factor(cid)
    assert res.unimodular
    assert res.factor == factor


@pytest.mark.slow
def test_gauss_landau_factor_is_root_two():
    res = resolve_printed_factor("gauss_landau")
    assert not res.unimodular
    assert abs(res.factor - math.sqrt(2)) <= 1e-8


@pytest.mark.slow
def test_haar_hall_has_no_constant_factor():
    res = resolve_printed_factor("haar_hall")
    assert not res.unimodular
    assert res.spread > 0.25
