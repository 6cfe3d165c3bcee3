import math

import numpy as np
import pytest

import paddle_fewshot as pf


def test_solve_on_separated_clusters():
    bank = pf.synth_gaussian_bank(k=5, dim=8, per_class=200, separation=20.0, seed=1)
    task = pf.generate_task(bank, k_total=5, k_effective=2, shots=5, query_size=30, seed=3)
    state = pf.solve(task, trace=True)
    assert state["converged"]
    assert state["u"].shape == (30 + 25, 5)
    np.testing.assert_allclose(state["u"].sum(axis=1), 1.0, atol=1e-12)
    acc = np.mean(np.array(state["labels"]) == np.array(task.query_truth))
    assert acc == 1.0
    objectives = [row[2] for row in state["trace"]]
    assert all(b <= a + 1e-9 for a, b in zip(objectives, objectives[1:]))
    props = pf.class_proportions(state["u"], task.n_query)
    assert pf.label_cost(props, 1.0 / 60) == 2


def test_baselines_run():
    bank = pf.synth_gaussian_bank(k=4, dim=4, per_class=100, separation=8.0, seed=2)
    task = pf.generate_task(bank, k_total=4, k_effective=3, shots=3, query_size=20, seed=5)
    km = pf.kmeans_partial(task)
    pgd = pf.pgd_solve(task, max_iters=500)
    assert km["u"].shape == pgd["u"].shape
    assert len(pf.inductive_baseline(task)) == 20
    with pytest.raises(pf.DivergenceError):
        pf.pgd_solve(task, step_size=1e7)


def test_model_functions():
    u = np.array([[0.5, 0.5], [1.0, 0.0]])
    w = np.zeros((2, 1))
    z = np.zeros((2, 1))
    assert pf.objective(u, 1, w, z, 1.0) == pytest.approx(math.log(2.0))
    np.testing.assert_allclose(pf.simplex_project(np.array([2.0, 0.0])), [1.0, 0.0])
    curve = pf.relaxation_curve(3)
    assert curve[1][1] == pytest.approx(math.log(2.0), abs=1e-12)
    assert pf.predict_labels(np.array([[0.1, 0.7, 0.2], [0.3, 0.3, 0.4]]), 2) == [1, 2]


def test_bank_round_trip(tmp_path):
    bank = pf.synth_gaussian_bank(k=3, dim=2, per_class=10, separation=3.0, seed=4)
    pf.save_feature_bank(bank, tmp_path / "b.csv", format="csv")
    assert pf.load_feature_bank(tmp_path / "b.csv") == bank
    (tmp_path / "bad.csv").write_text("class_id,f0\n1,2,3\n")
    with pytest.raises(pf.ParseError):
        pf.load_feature_bank(tmp_path / "bad.csv")
    with pytest.raises(pf.ConfigError):
        pf.generate_task(bank, k_total=3, k_effective=2, shots=20, query_size=5, seed=0)


def test_explicit_task():
    support = np.array([[0.0, 0.0], [10.0, 0.0]])
    query = np.array([[0.5, 0.0], [9.5, 0.0]])
    task = pf.Task.from_blocks(support, [0, 1], query, [0, 1], 2)
    assert pf.solve(task, lam=0.0)["labels"] == [0, 1]
