import pytest

from nfold.generate import random_instance
from nfold.model import apply_matrix
from nfold.oracle import enumerate_best_step
from nfold.splitter import Partition, build_fks_family
from nfold.step_graph import StepConfig, StepGraph, best_step, build, update_brick


def random_bounds(rng, inst, width=2):
    lbar = tuple(rng.randint(-width, 0) for _ in range(inst.num_vars))
    ubar = tuple(rng.randint(0, width) for _ in range(inst.num_vars))
    return lbar, ubar


def random_partition(rng, n, k):
    return Partition(tuple(rng.randrange(k * k) for _ in range(n)), k)


def check_step(inst, cfg, step):
    y = step.y
    assert apply_matrix(inst, y) == (0,) * inst.num_rows
    assert all(lo <= v <= up for v, lo, up in zip(y, cfg.lbar, cfg.ubar))
    assert sum(c * v for c, v in zip(inst.c, y)) == step.gain >= 0
    t = inst.t
    used = [i for i in range(inst.n) if any(y[i * t:(i + 1) * t])]
    classes = [cfg.partition.class_of[i] for i in used]
    assert len(classes) == len(set(classes))
    for i in used:
        assert sum(abs(v) for v in y[i * t:(i + 1) * t]) <= cfg.k


def test_zero_bounds_give_zero_step(rng):
    inst = random_instance(rng, 4, 1, 1, 2)
    zero = (0,) * inst.num_vars
    cfg = StepConfig(build_fks_family(4, 2).partitions[0], 2, zero, zero)
    graph = build(inst, cfg)
    assert all(t.entries == {(0,): (0, (0, 0))} for t in graph.tables)
    step = best_step(graph)
    assert step.gain == 0 and not any(step.y)
    assert all(set(layer) == {(0,)} for layer in graph.layers)


def test_zero_objective_gives_zero_gain(rng):
    inst = random_instance(rng, 5, 2, 1, 2)
    inst = inst.replace(c=(0,) * inst.num_vars)
    lbar, ubar = random_bounds(rng, inst)
    graph = StepGraph(inst, StepConfig(random_partition(rng, 5, 2), 2, lbar, ubar))
    assert graph.best_step().gain == 0


def test_single_brick_matches_table(rng):
    for _ in range(20):
        inst = random_instance(rng, 1, 1, 1, 3)
        lbar, ubar = random_bounds(rng, inst)
        cfg = StepConfig(Partition((0,), 1), 1, lbar, ubar)
        graph = StepGraph(inst, cfg)
        assert graph.best_step().gain == max(0, graph.tables[0].gain((0,)) or 0)


def test_layer_count_and_endpoints(rng):
    inst = random_instance(rng, 6, 1, 1, 2)
    lbar, ubar = random_bounds(rng, inst)
    graph = StepGraph(inst, StepConfig(random_partition(rng, 6, 2), 2, lbar, ubar))
    graph.best_step()
    assert len(graph.layers) == 2 * 2 + 2
    assert list(graph.layers[0]) == [(0,)] and list(graph.layers[-1]) == [(0,)]


def test_partial_sums_stay_small(rng):
    for _ in range(30):
        k = rng.randint(1, 2)
        inst = random_instance(rng, rng.randint(2, 6), rng.randint(1, 2), 1, 2)
        lbar, ubar = random_bounds(rng, inst)
        graph = StepGraph(inst, StepConfig(random_partition(rng, inst.n, k), k, lbar, ubar))
        graph.best_step()
        limit = k**3 * inst.delta()
        assert all(max(map(abs, v), default=0) <= limit for layer in graph.layers for v in layer)


def test_matches_enumeration(rng):
    for _ in range(120):
        k = rng.randint(1, 2)
        inst = random_instance(rng, rng.randint(1, 5), rng.randint(1, 2), rng.randint(1, 2), rng.randint(1, 3))
        lbar, ubar = random_bounds(rng, inst)
        cfg = StepConfig(random_partition(rng, inst.n, k), k, lbar, ubar)
        step = StepGraph(inst, cfg).best_step()
        assert step.gain == enumerate_best_step(inst, cfg.partition, k, lbar, ubar)
        check_step(inst, cfg, step)


def test_update_with_same_bounds_is_noop(rng):
    inst = random_instance(rng, 5, 1, 2, 2)
    lbar, ubar = random_bounds(rng, inst)
    graph = StepGraph(inst, StepConfig(random_partition(rng, 5, 2), 2, lbar, ubar))
    before = graph.snapshot()
    update_brick(graph, 3, lbar[6:8], ubar[6:8])
    assert graph.snapshot() == before


def test_shrinking_a_brick_removes_its_edges(rng):
    inst = random_instance(rng, 4, 1, 1, 2)
    lbar, ubar = random_bounds(rng, inst)
    graph = StepGraph(inst, StepConfig(random_partition(rng, 4, 2), 2, lbar, ubar))
    graph.update_brick(1, (0, 0), (0, 0))
    cls = graph.partition.class_of[1]
    for d, idx in graph.index[cls].items():
        pairs = [p for p in idx if p[1] == 1]
        assert pairs == ([(0, 1)] if d == (0,) else [])


def test_incremental_equals_rebuild(rng):
    for _ in range(15):
        k = rng.randint(1, 2)
        inst = random_instance(rng, rng.randint(2, 7), rng.randint(1, 2), rng.randint(1, 2), rng.randint(1, 3))
        lbar, ubar = random_bounds(rng, inst)
        part = random_partition(rng, inst.n, k)
        graph = StepGraph(inst, StepConfig(part, k, lbar, ubar))
        lbar, ubar = list(lbar), list(ubar)
        t = inst.t
        for _ in range(10):
            i = rng.randrange(inst.n)
            lbar[i * t:(i + 1) * t] = [rng.randint(-3, 0) for _ in range(t)]
            ubar[i * t:(i + 1) * t] = [rng.randint(0, 3) for _ in range(t)]
            graph.update_brick(i, lbar[i * t:(i + 1) * t], ubar[i * t:(i + 1) * t])
            fresh = StepGraph(inst, StepConfig(part, k, tuple(lbar), tuple(ubar)))
            assert graph.snapshot() == fresh.snapshot()
            assert graph.best_step() == fresh.best_step()


def test_config_rejects_bad_bounds():
    with pytest.raises(ValueError):
        StepConfig(Partition((0,), 1), 1, (1,), (2,))
