from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from critmaps.exactpoly import Poly

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def polys(draw, nvars=None, max_deg=6, max_terms=6):
    k = nvars if nvars is not None else draw(st.integers(1, 5))
    n_terms = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n_terms):
        deg = draw(st.integers(0, max_deg))
        exps = [0] * k
        for _ in range(deg):
            exps[draw(st.integers(0, k - 1))] += 1
        terms[tuple(exps)] = draw(rationals)
    return Poly(k, terms)


@st.composite
def poly_triples(draw):
    k = draw(st.integers(1, 5))
    return tuple(draw(polys(nvars=k)) for _ in range(3))


@st.composite
def int_matrices(draw, k):
    return [[draw(st.integers(-3, 3)) for _ in range(k)] for _ in range(k)]


@pytest.fixture
def half():
    return Fraction(1, 2)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def record(k: int, ok: bool, summary: str) -> None:
    ACCEPTANCE[k] = f"criterion {k}: {'PASS' if ok else 'FAIL'}  {summary}"
    print(ACCEPTANCE[k])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
