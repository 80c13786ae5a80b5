import pytest

from ppeval.cli import bundled
from ppeval.dsl import load_domain, load_plan

FIGURES = ("fig2a", "fig2b", "fig2c", "fig2d")


@pytest.fixture(scope="session")
def sandcastle():
    return load_domain(bundled("sandcastle.ppd"))


@pytest.fixture(scope="session")
def sandcastle_circuit():
    return load_domain(bundled("sandcastle-circuit.ppd"))


@pytest.fixture(scope="session")
def figures():
    return {name: load_plan(bundled(f"{name}.ppl")) for name in FIGURES}
