import itertools

import numpy as np
import pytest

from flatdisc.errors import ArgumentError, DomainError
from flatdisc.paper_example import quad_dynamics
from flatdisc.systems import (
    ControlSystem,
    LinearSystem,
    brunovsky,
    controllability_rank,
    eval_dynamics,
)


def compositions(n):
    """All ordered lists of positive integers summing to n."""
    for cuts in itertools.product([0, 1], repeat=n - 1):
        parts, run = [], 1
        for c in cuts:
            if c:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        yield parts


def test_brunovsky_3_2():
    sys = brunovsky([3, 2])
    expected_a = np.array(
        [
            [0, 1, 0, 0, 0],
            [0, 0, 1, 0, 0],
            [0, 0, 0, 0, 0],
            [0, 0, 0, 0, 1],
            [0, 0, 0, 0, 0],
        ],
        dtype=float,
    )
    expected_b = np.zeros((5, 2))
    expected_b[2, 0] = expected_b[4, 1] = 1.0
    np.testing.assert_array_equal(sys.a_matrix, expected_a)
    np.testing.assert_array_equal(sys.b_matrix, expected_b)


def test_brunovsky_single_integrator():
    sys = brunovsky([1])
    np.testing.assert_array_equal(sys.a_matrix, [[0.0]])
    np.testing.assert_array_equal(sys.b_matrix, [[1.0]])


def test_brunovsky_double_integrator_rank():
    assert controllability_rank(brunovsky([2])) == 2


def test_brunovsky_empty():
    with pytest.raises(ArgumentError):
        brunovsky([])


@pytest.mark.parametrize(
    "a, b, rank",
    [
        (np.zeros((2, 2)), np.zeros((2, 1)), 0),
        (np.zeros((2, 2)), np.array([[1.0], [0.0]]), 1),
    ],
)
def test_controllability_rank_small(a, b, rank):
    assert controllability_rank(LinearSystem(a, b)) == rank


def test_controllability_rank_paper():
    assert controllability_rank(brunovsky([3, 2])) == 5


def test_brunovsky_always_controllable():
    for n in range(1, 11):
        for chains in compositions(n):
            assert controllability_rank(brunovsky(chains)) == n, chains


@pytest.fixture
def plant():
    return ControlSystem(4, 2, quad_dynamics)


@pytest.mark.parametrize(
    "x, u, expected",
    [
        ((0, 0, 0, 0), (0, 0), (0, 0, 0, 0)),
        ((0, 1, 0, 0), (0, 0), (1, 0, 0, 0)),
        ((0, 0, 0, 1), (0, 1), (0, 1, 0, 1)),
    ],
)
def test_eval_dynamics_examples(plant, x, u, expected):
    np.testing.assert_array_equal(eval_dynamics(plant, x, u), expected)


def test_eval_dynamics_deterministic(plant, rng):
    x, u = rng.normal(size=4), rng.normal(size=2)
    a, b = eval_dynamics(plant, x, u), eval_dynamics(plant, x, u)
    assert a.tobytes() == b.tobytes()


def test_eval_dynamics_guard():
    sys = ControlSystem(1, 1, lambda x, u: -x, domain_guard=lambda x, u: x[0] > 0)
    with pytest.raises(DomainError) as info:
        eval_dynamics(sys, [-1.0], [0.0])
    np.testing.assert_array_equal(info.value.point[0], [-1.0])
