import itertools

import pytest
from hypothesis import given, settings

from conftest import tiny_instances
from oracles import brute_force_opt, day_night_instance
from rightsize.model import InfeasibleTaskError, Instance, NodeType, Task, verify_solution
from rightsize.oracle import BudgetExceeded, OracleLimits, exact_opt


def test_single_task_cheapest_fitting_type():
    types = (NodeType("a", (0.3,), 1.0), NodeType("b", (0.6,), 3.0), NodeType("c", (1.0,), 2.5))
    inst = Instance((Task("u", (0.5,), 1, 1),), types, 1, 1)
    sol, cost = exact_opt(inst)
    assert cost == 2.5 and sol.node_counts() == {"c": 1}


def test_day_night():
    sol, cost = exact_opt(day_night_instance())
    assert cost == 10
    assert verify_solution(day_night_instance(), sol).feasible


@pytest.mark.parametrize("k", [1, 2, 4])
def test_overlapping_full_copies(k):
    inst = Instance(tuple(Task(i, (1.0,), 1, 2) for i in range(k)), (NodeType("b", (1.0,), 3.0),), 2, 1)
    assert exact_opt(inst)[1] == 3.0 * k


def test_empty():
    sol, cost = exact_opt(Instance((), (NodeType("b", (1.0,), 1.0),), 1, 1))
    assert cost == 0 and sol.nodes == ()


def test_budget_limits():
    inst = Instance(tuple(Task(i, (0.1,), 1, 1) for i in range(9)), (NodeType("b", (1.0,), 1.0),), 1, 1)
    with pytest.raises(BudgetExceeded):
        exact_opt(inst)
    _, cost = exact_opt(inst, OracleLimits(max_tasks=9))
    assert cost == 1.0
    with pytest.raises(ValueError):
        OracleLimits(time_budget=0)


def test_time_budget():
    # many mutually compatible tasks of varied size; without the LP bound the search must run
    tasks = tuple(Task(i, (0.13 + 0.01 * i, 0.31 - 0.01 * i), 1 + i % 3, 3 + i % 2) for i in range(12))
    types = (NodeType("a", (1.0, 0.7), 3.1), NodeType("b", (0.7, 1.0), 2.9), NodeType("c", (0.5, 0.5), 1.6))
    inst = Instance(tasks, types, 4, 2)
    with pytest.raises(BudgetExceeded):
        exact_opt(inst, OracleLimits(max_tasks=12, time_budget=1e-4), symmetry=False, use_lp_bound=False)


def test_infeasible():
    inst = Instance((Task("u", (2.0,), 1, 1),), (NodeType("b", (1.0,), 1.0),), 1, 1)
    with pytest.raises(InfeasibleTaskError):
        exact_opt(inst)


@settings(max_examples=60, deadline=None)
@given(tiny_instances(max_n=6, max_m=3, max_T=4))
def test_matches_exhaustive_partitions(inst):
    sol, cost = exact_opt(inst)
    assert cost == pytest.approx(brute_force_opt(inst), abs=1e-9)
    assert sol.cost == pytest.approx(cost)
    assert verify_solution(inst, sol).feasible


@settings(max_examples=50, deadline=None)
@given(tiny_instances(max_n=5, max_m=2, max_T=4))
def test_symmetry_breaking_is_exact(inst):
    fast = exact_opt(inst)[1]
    slow = exact_opt(inst, symmetry=False, use_lp_bound=False)[1]
    assert fast == pytest.approx(slow, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(tiny_instances(max_n=5, max_m=2, max_T=4))
def test_permutation_invariant(inst):
    base = exact_opt(inst)[1]
    for perm in itertools.islice(itertools.permutations(inst.tasks), 1, 4):
        assert exact_opt(Instance(perm, inst.node_types, inst.horizon, inst.dims))[1] == pytest.approx(base)
    flipped = Instance(inst.tasks, inst.node_types[::-1], inst.horizon, inst.dims)
    assert exact_opt(flipped)[1] == pytest.approx(base)


@settings(max_examples=40, deadline=None)
@given(tiny_instances(max_n=6, max_m=3, max_T=4))
def test_bound_toggle_is_exact(inst):
    assert exact_opt(inst)[1] == pytest.approx(exact_opt(inst, use_lp_bound=False)[1], abs=1e-9)
