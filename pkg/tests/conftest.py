import importlib

import numpy as np
import pytest

from conespec import _sturm_py


def _backends():
    out = [("python", _sturm_py)]
    try:
        out.append(("cython", importlib.import_module("conespec._sturm")))
    except ImportError:
        pass
    return out


BACKENDS = _backends()


@pytest.fixture(params=[name for name, _ in BACKENDS])
def backend(request, monkeypatch):
    """Route the eigensolver through one Sturm kernel implementation."""
    from conespec import kernels

    mod = dict(BACKENDS)[request.param]
    monkeypatch.setattr(kernels, "sturm_count", mod.sturm_count)
    monkeypatch.setattr(kernels, "bisect_lowest", mod.bisect_lowest)
    monkeypatch.setattr(kernels, "BACKEND", request.param)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
