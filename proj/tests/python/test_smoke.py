import math

import numpy as np
import pytest

import qalloc


def closed_form(edge_size, d):
    r = d ** (edge_size / 2)
    return (r - 1) / (r + 1)


def test_theorem1_allocation_h2():
    alloc = qalloc.theorem1_allocation(qalloc.hypergraph("H2"), 3)
    assert [sorted(e) for e, _ in alloc] == [["a", "b"], ["a"], ["b"]]
    for edge, value in alloc:
        assert value == pytest.approx(closed_form(len(edge), 3), abs=1e-15)


def test_performances():
    h1 = qalloc.theorem1_allocation(qalloc.hypergraph("H1"), 2)
    assert qalloc.performance_fairness(h1) == pytest.approx(math.log(0.6) + math.log(closed_form(3, 2)), abs=1e-12)
    h2 = qalloc.theorem1_allocation(qalloc.hypergraph("H2"), 2)
    assert qalloc.performance_reliability(h2, {"a": 0.9, "b": 0.9}) == pytest.approx(0.30088, abs=1e-5)
    assert qalloc.edge_prior({"a": 0.9, "b": 0.9}, ["a"], ["a", "b"]) == pytest.approx(0.09)


def test_robustness_qubit_pair():
    r = qalloc.generalized_robustness(qalloc.mub_pair_assembly(2))
    assert r.value == pytest.approx(qalloc.closed_form_mub_robustness(2), abs=1e-3)
    assert r.lo <= r.value <= r.hi


def test_explicit_assembly_roundtrip():
    z = [np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)]
    a = qalloc.Assembly([z, z])
    assert a.dim == 2 and a.settings == 2
    assert qalloc.joint_measurability_feasible(a)
    assert qalloc.generalized_robustness(a).value == 0.0


def test_threshold():
    m = qalloc.mub_pair_assembly(2)
    assert qalloc.joint_measurability_feasible(qalloc.depolarize(m, 0.70))
    assert not qalloc.joint_measurability_feasible(qalloc.depolarize(m, 0.72))


def test_equitable():
    (sol,) = qalloc.lexicographic_maxmin(qalloc.monogamy_problem(2.5))
    assert sol.values == pytest.approx({"N_AB": 0.5, "N_5": 0.5}, abs=1e-12)
    tied = qalloc.lexicographic_maxmin(qalloc.exclusivity_problem(0.5, 0.5))
    assert len(tied) == 2
    p = qalloc.KnapsackProblem([("x", 0.0, 1.0), ("y", 0.0, 2.0)])
    (box,) = qalloc.lexicographic_maxmin(p)
    assert box.values == {"x": 1.0, "y": 2.0}


def test_identity_and_errors():
    rep = qalloc.verify_operator_identity(42, 100)
    assert rep["max_residual"] <= 1e-10
    assert len(rep["residuals"]) == 100
    with pytest.raises(qalloc.QallocError):
        qalloc.mub_pair_assembly(1)
    with pytest.raises(qalloc.QallocError):
        qalloc.monogamy_problem(4.0)
