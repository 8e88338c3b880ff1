import math
import sys
import threading

import numpy as np
import pytest

from hardsmith.graph import Graph, sample_er
from hardsmith.hardness import (
    ConfigurationError,
    CounterEvaluator,
    EvaluationCounter,
    EvaluationError,
    ExternalBadOutput,
    ExternalEvaluator,
    ExternalNonZeroExit,
    ExternalTimeout,
    FunctionEvaluator,
    RatioConfig,
    RatioEvaluator,
    RewardTransform,
    TimeEvaluator,
    UndefinedRatioError,
    edge_count,
    evaluate_counter,
)
from hardsmith.solvers import dsatur_3color, vc_branch_bound

from conftest import petersen


def test_counter_matches_solver(rng):
    ev = CounterEvaluator("dsatur3")
    for _ in range(20):
        g = sample_er(18, 0.2, rng)
        rep = ev(g)
        assert rep.kind == "counter"
        assert rep.value == dsatur_3color(g).work_counter
    assert ev.counter.count == 20


def test_counter_vc_empty_graph_is_root_call_only():
    assert evaluate_counter("vc_bb", Graph.empty(6)).value == 1


def test_counter_max_calls_reports_cap():
    rep = evaluate_counter("dsatur3", Graph.complete(6), max_calls=4)
    assert rep.value == 4 and rep.raw.truncated


def test_unknown_solver():
    with pytest.raises(ConfigurationError):
        CounterEvaluator("simplex")


class FakeClock:
    def __init__(self, deltas):
        self.deltas = list(deltas)
        self.now = 0.0
        self.starting = True

    def __call__(self):
        if not self.starting:
            self.now += self.deltas.pop(0)
        self.starting = not self.starting
        return self.now


def test_time_units_and_median():
    ev = TimeEvaluator("dsatur3", unit_exponent=-3, repeats=3,
                       clock=FakeClock([0.004, 0.002, 0.003]))
    rep = ev(petersen())
    assert rep.kind == "seconds"
    assert rep.value == pytest.approx(3.0)
    assert rep.raw["median_seconds"] == pytest.approx(0.003)
    assert rep.raw["seconds"] == pytest.approx([0.004, 0.002, 0.003])


def test_time_microseconds_default():
    ev = TimeEvaluator("vc_bb", repeats=1, clock=FakeClock([2.5e-6]))
    assert ev(petersen()).value == pytest.approx(2.5)


def test_time_clock_failure():
    def broken():
        raise OSError("no clock")
    ev = TimeEvaluator("vc_bb", repeats=1, clock=broken)
    with pytest.raises(EvaluationError):
        ev(petersen())


def test_time_real_clock_positive():
    assert TimeEvaluator("bk_clique", repeats=2)(petersen()).value >= 0


def py(code):
    return [sys.executable, "-c", code]


def test_external_echo():
    rep = ExternalEvaluator("echo 42")(Graph.complete(3))
    assert rep.value == 42.0 and rep.kind == "external"


def test_external_receives_graph6_and_n():
    code = "import os,sys; line=sys.stdin.readline().strip(); print(len(line) + int(os.environ['HARDSMITH_N']))"
    assert ExternalEvaluator(py(code))(Graph.complete(5)).value == len("D~{") + 5


def test_external_nonzero_exit():
    with pytest.raises(ExternalNonZeroExit) as info:
        ExternalEvaluator(py("import sys; sys.stderr.write('boom'); sys.exit(3)"))(Graph.complete(3))
    assert info.value.returncode == 3


@pytest.mark.parametrize("out", ["", "hard", "1 2", "-1", "nan"])
def test_external_bad_output(out):
    with pytest.raises(ExternalBadOutput):
        ExternalEvaluator(py(f"print({out!r})"))(Graph.complete(3))


def test_external_timeout_and_ceiling():
    slow = py("import time; time.sleep(5)")
    with pytest.raises(ExternalTimeout):
        ExternalEvaluator(slow, timeout=0.3)(Graph.complete(3))
    rep = ExternalEvaluator(slow, timeout=0.3, timeout_ceiling=1e6)(Graph.complete(3))
    assert rep.value == 1e6 and rep.raw["timed_out"]


def test_external_wrapper_of_builtin_counter(rng):
    cmd = [sys.executable, "-m", "hardsmith", "evaluate", "--input", "-", "--value-only",
           "--solver", "dsatur3"]
    ext = ExternalEvaluator(cmd, timeout=60)
    for _ in range(3):
        g = sample_er(16, 0.25, rng)
        assert ext(g).value == evaluate_counter("dsatur3", g).value


def test_ratio_single_edge():
    rep = RatioEvaluator()(Graph.complete(2))
    assert rep.raw["ratio"] == 2.0
    assert rep.value == pytest.approx(math.exp(20))


def test_ratio_star():
    star = Graph.from_edge_list(6, [(0, i) for i in range(1, 6)])
    rep = RatioEvaluator()(star)
    assert (rep.raw["approx"], rep.raw["opt"]) == (2, 1)
    assert rep.value == pytest.approx(math.exp(20))


def test_ratio_scale():
    rep = RatioEvaluator(RatioConfig(scale=1.5))(Graph.complete(2))
    assert rep.value == pytest.approx(math.exp(3))


def test_ratio_undefined_on_edgeless():
    with pytest.raises(UndefinedRatioError):
        RatioEvaluator()(Graph.empty(4))
    assert RatioEvaluator(undefined_value=0.0)(Graph.empty(4)).value == 0.0


def test_ratio_bounded_by_two(rng):
    ev = RatioEvaluator(undefined_value=0.0)
    for _ in range(500):
        g = sample_er(int(rng.integers(2, 16)), float(rng.uniform(0.05, 0.6)), rng)
        rep = ev(g)
        if rep.raw["ratio"] is not None:
            assert 1.0 <= rep.raw["ratio"] <= 2.0
            assert rep.raw["opt"] == vc_branch_bound(g).answer


def test_ratio_config_validation():
    with pytest.raises(ConfigurationError):
        RatioConfig(scale=0)
    with pytest.raises(ConfigurationError):
        RatioConfig(direction="sideways")


def test_function_evaluator_and_shared_counter():
    shared = EvaluationCounter()
    a = FunctionEvaluator(edge_count, counter=shared)
    b = CounterEvaluator("vc_bb", counter=shared)
    assert a(Graph.complete(4)).value == 6.0
    b(Graph.complete(4))
    assert shared.count == 2


def test_counter_thread_safe():
    c = EvaluationCounter()
    threads = [threading.Thread(target=lambda: [c.tick() for _ in range(1000)]) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert c.count == 8000


def test_reward_transforms():
    assert RewardTransform("identity")(7.0) == 7.0
    assert RewardTransform("log1p")(math.e - 1) == pytest.approx(1.0)
    norm = RewardTransform("normalize")
    assert norm(5.0) == 0.0
    for r in (2.0, 4.0):
        norm.observe(r)
    assert norm(6.0) == pytest.approx(2.0)
    with pytest.raises(ConfigurationError):
        RewardTransform("square")
