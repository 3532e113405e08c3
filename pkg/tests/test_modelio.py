import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conespec.errors import ModelError
from conespec.modelio import dump, dumps, load, loads, write_eigen_table
from conespec.models import CATALOG_NAMES, ConeCap, ConicalManifoldModel, Spindle, catalog_model, sphere_section


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_catalog_round_trip(name):
    m = catalog_model(name, n=5 if name == "cone-S2xS2" else 3).model
    text = dumps(m)
    back = loads(text)
    assert back == m
    assert dumps(back) == text


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(3, 7),
    K=st.floats(-5, 5, allow_nan=False),
    rhos=st.lists(st.floats(0.01, 1.5), min_size=0, max_size=3),
    R=st.floats(0.2, 5.0),
)
def test_round_trip_property(n, K, rhos, R):
    caps = tuple(ConeCap(r, 1.0, sphere_section(n, R)) for r in rhos)
    m = ConicalManifoldModel(n, K, caps, None, "prop")
    assert loads(dumps(m)) == m


def test_custom_table_file(tmp_path):
    write_eigen_table(tmp_path / "mu.txt", [0.0, 2.0, 6.0, 12.0])
    (tmp_path / "m.model").write_text(
        "name = rp\nn = 3\nK = 0\ncap.0.rho = 1\ncap.0.ell = 0\ncap.0.section = custom kappa=1 file=mu.txt\n"
    )
    m = load(tmp_path / "m.model")
    assert m.caps[0].section.table == (0.0, 2.0, 6.0, 12.0)
    dump(m, tmp_path / "again.model")
    assert load(tmp_path / "again.model") == m


def test_spindle_block():
    sp = Spindle.closed(sphere_section(4, 1.3), 2.0)
    m = ConicalManifoldModel.from_spindle(sp, "s")
    back = loads(dumps(m))
    assert back.spindle == sp and back.spindle.is_closed


@pytest.mark.parametrize(
    "text,match",
    [
        ("n = 3\nbogus = 1\n", "unknown key"),
        ("K = 1\n", "missing key 'n'"),
        ("n = 3\nn = 4\n", "duplicate"),
        ("n = 3\ncap.1.rho = 1\ncap.1.ell = 0\ncap.1.section = sphere R=1\n", "numbered"),
        ("n = 3\ncap.0.rho = 1\ncap.0.section = sphere R=1\n", "missing ell"),
        ("n = 3\ncap.0.rho = x\ncap.0.ell = 0\ncap.0.section = sphere R=1\n", "expected a number"),
        ("n = 3\ncap.0.rho = 1\ncap.0.ell = 0\ncap.0.section = torus R=1\n", "unknown section"),
        ("n = 3\njunk line\n", "expected 'key = value'"),
    ],
)
def test_rejects_bad_files(text, match):
    with pytest.raises(ModelError, match=match):
        loads(text)


def test_comments_and_infinity():
    m = loads("# a model\nn = 3  # dimension\nK = inf\n")
    assert m.bulkK == math.inf and m.caps == ()
    assert "K = inf" in dumps(m)
