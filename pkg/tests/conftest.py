import json
import sys
from pathlib import Path

import pytest
from hypothesis import settings

from posgeom import kernels, _kernels_py
from posgeom.polytope import Polytope
from posgeom.polypol import Polypol

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def load_json(name):
    return json.loads((FIXTURES / f"{name}.json").read_text())


def polytope(name, variables=None):
    data = load_json(name)
    if variables is not None:
        data["vars"] = list(variables)
    return Polytope.from_json(data)


def polypol(name):
    return Polypol.from_json(load_json(name))


BACKENDS = [pytest.param(_kernels_py, id="python")]
if kernels.compiled is not None:
    BACKENDS.append(pytest.param(kernels.compiled, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
