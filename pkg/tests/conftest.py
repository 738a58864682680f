"""Shared fixtures.  The expensive certified solves are cached per session
because several test modules compare against the same instances."""
from __future__ import annotations

import pytest

from growthbound import lpmodel, lpsolve


@pytest.fixture(scope="session")
def solved_cache():
    cache = {}

    def get(n: int, selector: str = "band", band_width: int = 4):
        key = (n, selector, band_width)
        if key not in cache:
            lp = lpmodel.build_improved_lp(n, selector, band_width)
            work = lpmodel.cumulative_transform(lp)
            sol = lpsolve.solve_float(work)
            cert = lpsolve.certify(work, sol)
            cache[key] = (work, sol, cert)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def closed_form_cache():
    cache = {}

    def get(n: int):
        if n not in cache:
            cache[n] = lpsolve.wilkinson_closed_form_dual(n)
        return cache[n]

    return get
