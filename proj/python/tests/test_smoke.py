import math

import pytest

import curirl

LN8 = math.log(8.0)


@pytest.fixture(scope="module")
def demos():
    return curirl.synth_demos(curirl.EnvironmentConfig(seed=1), n=4, traj_len=20, seed=3)


def test_synthetic_demos_shape(demos):
    assert len(demos) == 4
    assert [t.trial_index for t in demos.trajectories] == [1, 2, 3, 4]
    for t in demos.trajectories:
        assert 1 <= len(t) <= 20
        assert len(t.states) == len(t) + 1
        assert 0.0 <= t.score <= 1.0


def test_softmax_and_entropy():
    p = curirl.softmax([700.0, -700.0, 0.0, 700.0])
    assert all(math.isfinite(v) for v in p)
    assert abs(sum(p) - 1.0) <= 1e-12
    assert curirl.entropy([0.125] * 8) == pytest.approx(LN8, abs=1e-15)
    with pytest.raises(curirl.CurirlError):
        curirl.entropy([0.5, 0.6])


def test_uniform_initial_loss(demos):
    r = curirl.train(demos, epochs=1, init="zeros_output", hidden=16)
    assert abs(r.curve[0].meo - 2 * LN8) <= 1e-9


def test_training_lowers_loss_and_is_deterministic(demos):
    seen = []
    a = curirl.train(demos, epochs=20, hidden=32, seed=5, on_epoch=lambda e, row: seen.append(e))
    b = curirl.train(demos, epochs=20, hidden=32, seed=5)
    assert seen == list(range(1, 21))
    assert a.curve[-1].meo < a.curve[0].meo
    assert [r.meo for r in a.curve] == [r.meo for r in b.curve]
    assert a.model == b.model
    for row in a.curve:
        assert 0.0 <= row.mel <= LN8 + 1e-12
        assert row.meo == row.mel + row.al


def test_gradient_check(demos):
    model = curirl.init_model(hidden=32, seed=2)
    r = curirl.gradient_check(model, demos, samples=50)
    assert r["samples"] == 50
    assert r["max_relative_error"] <= 1e-5


def test_visitation_frequencies_sum_to_one(demos):
    f = curirl.visitation_frequencies(demos, bins=10)
    assert len(f) == 10 and len(f[0]) == 10
    assert abs(sum(map(sum, f)) - 1.0) <= 1e-12


def test_checkpoint_and_rollout(tmp_path, demos):
    model = curirl.train(demos, epochs=3, hidden=16).model
    path = tmp_path / "model.ckpt"
    curirl.save_checkpoint(path, model, seed=0)
    assert curirl.load_checkpoint(path) == model
    env = curirl.EnvironmentConfig()
    s = curirl.evaluate_policy(env, model, episodes=5, mode="sample", seed=1)
    assert 0.0 <= s.reach_rate <= 1.0
    assert len(s.paths) == 5
    assert s.paths == curirl.evaluate_policy(env, model, episodes=5, mode="sample", seed=1).paths


def test_csv_loading_and_curriculum(tmp_path):
    for trial in (1, 2, 10):
        (tmp_path / f"ann_{trial}.csv").write_text("pos_x,pos_z\n1,1\n2,2\n3,2\n")
    demos = curirl.load_demo_set(tmp_path)
    ordered = curirl.order_demonstrations(demos, "trial_desc")
    assert [t.trial_index for t in ordered] == [10, 2, 1]
    assert list(ordered[0].states[0]) == [1.0, 1.0]
    with pytest.raises(ValueError):
        curirl.order_demonstrations(demos, "sideways")
    with pytest.raises(curirl.CurirlError):
        curirl.load_demo_set(tmp_path / "missing")
