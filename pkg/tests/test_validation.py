import numpy as np
import pytest

from mzopinion.abm import DEFAULT_ALPHA
from mzopinion.macrodynamics import complete_trajectory, reduce_m3, two_cluster_trajectory
from mzopinion.sinar import NarModel, build_hankel, fit, opinion_dictionary, rollout
from mzopinion.validation import (block_errors, block_partition, memory_sweep,
                                  one_step_error, relative_error, simplex_violations,
                                  split_realisations)


def analytic_model():
    return NarModel(opinion_dictionary(1), reduce_m3(DEFAULT_ALPHA).opinion_matrix(), 0.0)


def analytic_data(x0=(0.45, 0.1, 0.45), T=200):
    return complete_trajectory(np.array(x0), DEFAULT_ALPHA, T)[:, :2]


def test_exact_model_block_errors_vanish():
    errs = block_errors(analytic_model(), analytic_data(), 40)
    assert errs.size == 4
    assert np.all(errs <= 1e-10)


def test_zero_model_scores_one():
    model = NarModel(opinion_dictionary(2), np.zeros((2, 10)), 0.0)
    errs = block_errors(model, analytic_data(), 20)
    assert np.allclose(errs, 1.0)


def test_block_shorter_than_depth_rejected():
    model = NarModel(opinion_dictionary(3), np.zeros((2, 15)), 0.0)
    with pytest.raises(ValueError):
        block_errors(model, analytic_data(), 2)


def test_single_scored_block_equals_long_rollout_error():
    # trajectory of two blocks: the second is one long rollout from the first's tail
    x = two_cluster_trajectory((0.8, 0.1), (0.1, 0.8), DEFAULT_ALPHA, 99)[2]
    model = fit(build_hankel([x[:50]], 1), opinion_dictionary(1), 0.0)
    errs = block_errors(model, x, 50)
    assert errs.size == 1
    pred = rollout(model, x[49:50], 50)
    direct = np.linalg.norm(x[50:] - pred) / np.linalg.norm(x[50:])
    assert errs[0] == direct


def test_partition_covers_each_index_once():
    starts = block_partition(103, 20)
    assert starts == [0, 20, 40, 60, 80]
    covered = np.concatenate([np.arange(s, s + 20) for s in starts])
    assert np.array_equal(covered, np.arange(100))


def test_reconstruction_only_reads_previous_block():
    x = analytic_data(T=119)
    model = analytic_model()
    base = block_errors(model, x, 40)
    # scrambling block 1 except its last state (the seed of block 2) leaves block 2 alone
    y = x.copy()
    y[40:79] = 0.3
    changed = block_errors(model, y, 40)
    assert changed[1] == base[1]
    assert changed[0] != base[0]


def test_all_zero_block_has_no_relative_error():
    x = np.zeros((60, 2))
    x[:20] = 0.1
    model = NarModel(opinion_dictionary(1), np.zeros((2, 5)), 0.0)
    errs = block_errors(model, x, 20)
    assert np.isnan(errs).all()


def test_one_step_errors():
    x = analytic_data()
    assert one_step_error(analytic_model(), x) <= 1e-12
    assert one_step_error(NarModel(opinion_dictionary(1), np.zeros((2, 5)), 0.0), x) == 1.0
    with pytest.raises(ValueError):
        one_step_error(analytic_model(), x[:1])


def test_relative_error():
    assert relative_error([3.0, 4.0], [0.0, 0.0]) == 1.0


def test_simplex_violations():
    assert simplex_violations([[0.5, 0.4], [0.7, 0.4], [-0.1, 0.2]]) == 2


def test_split_by_realisation_index():
    train, valid = split_realisations(list(range(20)), 12)
    assert train == list(range(12)) and valid == list(range(12, 20))
    with pytest.raises(ValueError):
        split_realisations([1, 2], 2)


def _ensemble():
    inits = [(0.45, 0.1, 0.45), (0.3, 0.3, 0.4), (0.2, 0.5, 0.3), (0.6, 0.2, 0.2)]
    return [analytic_data(x0, 120) for x0 in inits]


def test_sweep_single_cell_equals_direct_evaluation():
    data = _ensemble()
    res = memory_sweep(data[:2], data[2:], opinion_dictionary, [1], [0.0], 40)
    assert len(res.cells) == 1
    cell = res.cells[0]
    model = fit(build_hankel(data[:2], 1), opinion_dictionary(1), 0.0)
    direct = np.concatenate([block_errors(model, v, 40) for v in data[2:]])
    assert cell.mean_block_error == np.mean(direct)
    assert cell.n_blocks == direct.size
    assert cell.mean_one_step_error == np.mean([one_step_error(model, v) for v in data[2:]])


def test_sweep_is_deterministic_and_nonnegative(tmp_path):
    data = _ensemble()
    a = memory_sweep(data[:2], data[2:], opinion_dictionary, [1, 2, 3], [0.0, 0.05], 20)
    b = memory_sweep(data[:2], data[2:], opinion_dictionary, [1, 2, 3], [0.0, 0.05], 20)
    assert [c.mean_block_error for c in a.cells] == [c.mean_block_error for c in b.cells]
    assert all(c.mean_block_error >= 0 and c.mean_one_step_error >= 0 for c in a.cells)
    path = tmp_path / "sweep.csv"
    a.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "p,lambda,mean_block_error,mean_one_step_error,n_blocks,n_diverged"
    assert len(lines) == 7
    ps, errs = a.curve(0.0)
    assert ps.tolist() == [1, 2, 3]


def test_sweep_requires_increasing_depths():
    data = _ensemble()
    with pytest.raises(ValueError):
        memory_sweep(data[:2], data[2:], opinion_dictionary, [2, 1], [0.0], 20)
    with pytest.raises(ValueError):
        memory_sweep(data[:2], data[2:], opinion_dictionary, [], [0.0], 20)


def test_divergent_blocks_score_infinity():
    x = analytic_data()
    xi = np.zeros((2, 5))
    xi[0, 2] = 1e200
    errs = block_errors(NarModel(opinion_dictionary(1), xi, 0.0), x, 40)
    assert np.all(np.isinf(errs))
