"""Hardness evaluators: turn a graph into a scalar reward.

Every evaluator is a callable ``evaluator(g) -> HardnessReport`` and ticks
its :class:`EvaluationCounter` exactly once per call, whether the call
succeeds or fails. Several evaluators may share one counter so that a whole
experiment is held to a single budget.
"""

from __future__ import annotations

import math
import os
import shlex
import statistics
import subprocess
import threading
import time
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .graph import Graph, to_graph6
from .solvers import EXACT_SOLVERS, SolveOutcome, greedy_vertex_cover, vc_branch_bound


class EvaluationError(RuntimeError):
    pass


class ConfigurationError(ValueError):
    pass


class ExternalCommandError(EvaluationError):
    pass


class ExternalNonZeroExit(ExternalCommandError):
    def __init__(self, returncode: int, stderr: str):
        super().__init__(f"command exited with status {returncode}: {stderr.strip()[:200]}")
        self.returncode = returncode


class ExternalBadOutput(ExternalCommandError):
    def __init__(self, output: str):
        super().__init__(f"command output is not a decimal number: {output.strip()[:200]!r}")
        self.output = output


class ExternalTimeout(ExternalCommandError):
    def __init__(self, timeout: float):
        super().__init__(f"command did not finish within {timeout} s")
        self.timeout = timeout


class UndefinedRatioError(EvaluationError):
    pass


class EvaluationCounter:
    """Thread-safe tally of evaluator invocations."""

    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    def tick(self) -> int:
        with self._lock:
            self._count += 1
            return self._count

    @property
    def count(self) -> int:
        with self._lock:
            return self._count


@dataclass(frozen=True)
class HardnessReport:
    value: float
    kind: str  # counter | seconds | external | ratio | function
    raw: Any = None


@dataclass(frozen=True)
class RatioConfig:
    """Reward shaping for approximation ratios: ``exp(scale * ratio)``."""

    scale: float = 10.0
    direction: str = "minimization"

    def __post_init__(self):
        if not self.scale > 0:
            raise ConfigurationError(f"ratio scale must be positive, got {self.scale}")
        if self.direction not in ("minimization", "maximization"):
            raise ConfigurationError(f"unknown ratio direction {self.direction!r}")


def _report(value: float, kind: str, raw: Any = None) -> HardnessReport:
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise EvaluationError(f"hardness must be finite and nonnegative, got {value}")
    return HardnessReport(value, kind, raw)


class Evaluator:
    """Base class; subclasses implement :meth:`_evaluate`."""

    ident = "evaluator"

    def __init__(self, counter: EvaluationCounter | None = None):
        self.counter = counter if counter is not None else EvaluationCounter()

    def __call__(self, g: Graph) -> HardnessReport:
        self.counter.tick()
        return self._evaluate(g)

    def _evaluate(self, g: Graph) -> HardnessReport:
        raise NotImplementedError


def _solver(solver: str) -> Callable[..., SolveOutcome]:
    try:
        return EXACT_SOLVERS[solver]
    except KeyError:
        raise ConfigurationError(
            f"unknown solver {solver!r}; expected one of {sorted(EXACT_SOLVERS)}") from None


class CounterEvaluator(Evaluator):
    """Hardness = number of recursive calls an exact solver makes.

    With ``max_calls`` set, the solver is stopped at that many calls and the
    cap itself is reported as the value, so a runaway instance cannot stall
    a training run.
    """

    def __init__(self, solver: str, max_calls: int | None = None,
                 counter: EvaluationCounter | None = None):
        super().__init__(counter)
        self.solve = _solver(solver)
        self.solver = solver
        self.max_calls = max_calls
        self.ident = f"counter:{solver}"

    def _evaluate(self, g):
        outcome = self.solve(g, max_calls=self.max_calls)
        return _report(outcome.work_counter, "counter", outcome)


def evaluate_counter(solver: str, g: Graph, max_calls: int | None = None) -> HardnessReport:
    return CounterEvaluator(solver, max_calls)(g)


class TimeEvaluator(Evaluator):
    """Hardness = median wall-clock time over ``repeats`` runs.

    The value is expressed in units of ``10**unit_exponent`` seconds, e.g.
    ``unit_exponent=-6`` reports microseconds. ``raw`` keeps every sample so
    the spread can be inspected.
    """

    def __init__(self, solver: str, unit_exponent: int = -6, repeats: int = 3,
                 counter: EvaluationCounter | None = None,
                 clock: Callable[[], float] = time.perf_counter):
        super().__init__(counter)
        self.solve = _solver(solver)
        self.solver = solver
        self.unit_exponent = unit_exponent
        self.repeats = max(1, repeats)
        self.clock = clock
        self.ident = f"time:{solver}"
        # first call pays for JIT compilation
        self.solve(Graph.complete(3))

    def _evaluate(self, g):
        samples = []
        for _ in range(self.repeats):
            try:
                t0 = self.clock()
                self.solve(g)
                dt = self.clock() - t0
            except OSError as exc:
                raise EvaluationError(f"clock failure: {exc}") from exc
            samples.append(max(dt, 0.0))
        scale = 10.0 ** (-self.unit_exponent)
        med = statistics.median(samples)
        return _report(med * scale, "seconds", {
            "seconds": samples,
            "median_seconds": med,
            "stdev_seconds": statistics.pstdev(samples),
        })


def evaluate_time(solver: str, g: Graph, unit_exponent: int = -6,
                  repeats: int = 3) -> HardnessReport:
    return TimeEvaluator(solver, unit_exponent, repeats)(g)


class ExternalEvaluator(Evaluator):
    """Hardness from an external program.

    The program receives one graph6 line on stdin (and ``HARDSMITH_N`` in
    its environment) and must print a single decimal number. With
    ``timeout_ceiling`` set, a timed-out run scores that value instead of
    raising :class:`ExternalTimeout`.
    """

    def __init__(self, command: str | Sequence[str], timeout: float = 60.0,
                 timeout_ceiling: float | None = None,
                 counter: EvaluationCounter | None = None):
        super().__init__(counter)
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.argv:
            raise ConfigurationError("empty external command")
        self.timeout = timeout
        self.timeout_ceiling = timeout_ceiling
        self.ident = f"external:{' '.join(self.argv)}"

    def _evaluate(self, g):
        env = dict(os.environ, HARDSMITH_N=str(g.n))
        try:
            proc = subprocess.run(self.argv, input=to_graph6(g) + "\n", capture_output=True,
                                  text=True, timeout=self.timeout, env=env)
        except subprocess.TimeoutExpired:
            if self.timeout_ceiling is not None:
                return _report(self.timeout_ceiling, "external", {"timed_out": True})
            raise ExternalTimeout(self.timeout) from None
        except OSError as exc:
            raise ExternalCommandError(f"cannot run {self.argv[0]!r}: {exc}") from exc
        if proc.returncode != 0:
            raise ExternalNonZeroExit(proc.returncode, proc.stderr)
        try:
            value = float(proc.stdout.strip())
        except ValueError:
            raise ExternalBadOutput(proc.stdout) from None
        if not math.isfinite(value) or value < 0:
            raise ExternalBadOutput(proc.stdout)
        return _report(value, "external", {"stdout": proc.stdout, "stderr": proc.stderr})


def evaluate_external(command, g: Graph, timeout: float = 60.0,
                      timeout_ceiling: float | None = None) -> HardnessReport:
    return ExternalEvaluator(command, timeout, timeout_ceiling)(g)


class RatioEvaluator(Evaluator):
    """Hardness = ``exp(scale * ratio)`` for an approximation algorithm.

    ``ratio`` is approx/exact for minimisation problems and exact/approx for
    maximisation. Graphs without edges have no defined ratio; they raise
    :class:`UndefinedRatioError` unless ``undefined_value`` is given.
    """

    def __init__(self, cfg: RatioConfig | None = None,
                 approx: Callable[[Graph], float] = greedy_vertex_cover,
                 exact: Callable[[Graph], float] | None = None,
                 undefined_value: float | None = None,
                 counter: EvaluationCounter | None = None):
        super().__init__(counter)
        self.cfg = cfg or RatioConfig()
        self.approx = approx
        self.exact = exact or (lambda g: vc_branch_bound(g).answer)
        self.undefined_value = undefined_value
        self.ident = "ratio:greedy_vc"

    def _evaluate(self, g):
        approx = self.approx(g)
        opt = self.exact(g)
        if opt == 0 or approx == 0:
            if self.undefined_value is not None:
                return _report(self.undefined_value, "ratio",
                               {"ratio": None, "approx": approx, "opt": opt})
            raise UndefinedRatioError("approximation ratio undefined for an optimum of 0")
        ratio = approx / opt if self.cfg.direction == "minimization" else opt / approx
        return _report(math.exp(self.cfg.scale * ratio), "ratio",
                       {"ratio": ratio, "approx": approx, "opt": opt})


def evaluate_ratio(g: Graph, cfg: RatioConfig | None = None) -> HardnessReport:
    return RatioEvaluator(cfg)(g)


class FunctionEvaluator(Evaluator):
    """Wrap a plain ``Graph -> float`` function."""

    def __init__(self, fn: Callable[[Graph], float], ident: str = "function",
                 counter: EvaluationCounter | None = None):
        super().__init__(counter)
        self.fn = fn
        self.ident = ident

    def _evaluate(self, g):
        return HardnessReport(float(self.fn(g)), "function")


def edge_count(g: Graph) -> float:
    return float(g.num_edges)


# -- reward transforms --------------------------------------------------------

class RewardTransform:
    """Maps raw rewards to the values fed into the policy gradient.

    ``identity`` leaves them alone, ``log1p`` compresses their range, and
    ``normalize`` divides by the running mean of every raw reward seen so far.
    """

    KINDS = ("identity", "log1p", "normalize")

    def __init__(self, kind: str = "identity"):
        if kind not in self.KINDS:
            raise ConfigurationError(f"unknown reward transform {kind!r}")
        self.kind = kind
        self._total = 0.0
        self._seen = 0

    def observe(self, reward: float) -> None:
        self._total += reward
        self._seen += 1

    def __call__(self, reward: float) -> float:
        if self.kind == "identity":
            return reward
        if self.kind == "log1p":
            return math.log1p(reward)
        mean = self._total / self._seen if self._seen else 0.0
        return reward / mean if mean > 0 else 0.0
