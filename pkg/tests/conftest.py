"""Shared expensive fixtures: evolved wave pairs are memoized per
(fixture kind, depth, degree, slot set) so the acceptance gate and the
module suites reuse one computation."""

import pytest

from todatau.eth_core import (LaxOperator, dress_left, dress_right_paired,
                              evolve_waves)
from todatau.time_series import TimeVars, eth_slots
from todatau.weyl import XPoly

EPS_HI = 8

_LAX = {
    "vacuum": lambda: LaxOperator(u=XPoly.zero(), v=XPoly.zero()),
    "constant-u": lambda: LaxOperator(u=XPoly.of(2), v=XPoly.zero()),
}

_memo = {}


def evolved_pair(kind, depth, degree, slots=None, y_degree=2):
    slots = tuple(slots or eth_slots(2))
    key = (kind, depth, degree, slots, y_degree)
    if key not in _memo:
        lax = _LAX[kind]()
        pl0 = dress_left(lax, depth, EPS_HI)
        pr0 = dress_right_paired(pl0, lax, depth, EPS_HI)
        vars = TimeVars(slots, degree=degree, y_degree=y_degree)
        _memo[key] = evolve_waves(pl0, pr0, vars, degree, depth, EPS_HI)
    return _memo[key]


@pytest.fixture(scope="session")
def pair_factory():
    return evolved_pair
