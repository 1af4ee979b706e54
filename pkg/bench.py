#!/usr/bin/env python
# Copyright (c) 2026-present, the qlio authors
# All rights reserved.
#
# This software may be modified and distributed under the terms
# of the BSD license. See the LICENSE file for details.

"""Very hacky script for timing the qlio hot paths.

Like most benchmarks, results should be treated with skepticism.
"""

import os
import time

import numpy as np

import qlio
from qlio.optimizers import init_swarm


def timer(fn, miniter=3, minwall=3.0):
    """Runs fn() multiple times and returns the results.

    Runs for at least ``miniter`` iterations and ``minwall`` wall time.
    """

    results = []
    count = 0

    wall_begin = time.perf_counter()

    while True:
        wstart = time.perf_counter()
        start = os.times()
        fn()
        end = os.times()
        wend = time.perf_counter()
        count += 1

        user = end[0] - start[0]
        system = end[1] - start[1]
        cpu = user + system
        wall = wend - wstart

        results.append((cpu, user, system, wall))

        # Ensure we run at least ``miniter`` times.
        if count < miniter:
            continue

        # And for ``minwall`` seconds.
        elapsed = wend - wall_begin

        if elapsed < minwall:
            continue

        break

    return results


BENCHES = []


def bench(title, simple=False):
    def wrapper(fn):
        if not fn.__name__.startswith("bench_"):
            raise ValueError("benchmark function must begin with bench_")

        fn.title = title
        fn.simple = simple

        BENCHES.append(fn)

        return fn

    return wrapper


class Workload:
    """Inputs shared by every benchmark, sized from the command line."""

    def __init__(self, function, agents, dims, seed=42):
        self.f = qlio.make_function(function, dims)
        self.generator = np.random.default_rng(seed)
        self.pso = qlio.PsoConfig(num_agents=agents, max_iterations=1)
        self.lio = qlio.LioConfig()
        self.positions = self.generator.random((agents, dims, 4))
        self.xs = qlio.map_vector(self.positions, self.f.bounds, 2.0)
        self.swarm = init_swarm(self.f, self.pso, self.generator)
        self.phase1 = qlio.qpso_run(self.f, self.pso, qlio.RandomSource(seed))
        self.batch = qlio.projection_objective_batch(
            self.f, self.phase1.best_position
        )
        self.exponents = self.generator.uniform(1.0, 5.0, 20)

    @property
    def evaluations(self):
        return self.positions.shape[0]


@bench("pnorm() p=2", simple=True)
def bench_pnorm_euclidean(w):
    qlio.pnorm(w.positions, 2.0)


@bench("pnorm() p=2.5")
def bench_pnorm_fractional(w):
    qlio.pnorm(w.positions, 2.5)


@bench("map_vector() whole swarm", simple=True)
def bench_map_vector(w):
    qlio.map_vector(w.positions, w.f.bounds, 2.0)


@bench("evaluate_batch() whole swarm", simple=True)
def bench_evaluate_batch(w):
    w.f.evaluate_batch(w.xs)


@bench("evaluate() per agent")
def bench_evaluate_loop(w):
    for x in w.xs:
        w.f.evaluate(x)


@bench("qpso_step()", simple=True)
def bench_qpso_step(w):
    qlio.qpso_step(w.swarm, w.f, w.pso, w.generator)


@bench("projection_objective_batch() 20 exponents")
def bench_projection_batch(w):
    w.batch(w.exponents)


@bench("refine() default LIO", simple=True)
def bench_refine(w):
    qlio.refine(w.f, w.phase1, w.lio, qlio.RandomSource(1))


def format_results(results, title, evaluations):
    best = min(results)
    rate = float(evaluations) / max(best[3], 1e-9)

    print(title)
    print(
        "%.6f wall; %.6f CPU; %.6f user; %.6f sys %.0f agents/s (best of %d)"
        % (best[3], best[0], best[1], best[2], rate, len(results))
    )


def run_benches(workload, minwall=3.0):
    for fn in BENCHES:
        results = timer(lambda: fn(workload), minwall=minwall)
        format_results(results, fn.title, workload.evaluations)


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser()

    group = parser.add_argument_group("Workload")
    group.add_argument(
        "--agents", type=int, default=100, help="Number of swarm agents"
    )
    group.add_argument(
        "--dims", type=int, default=10, help="Number of decision variables"
    )
    group.add_argument(
        "--function",
        choices=qlio.function_names(),
        default="rastrigin",
        help="Benchmark function to evaluate",
    )

    group = parser.add_argument_group("Benchmark Selection")
    group.add_argument(
        "--only-simple", action="store_true", help="Only run the core paths"
    )
    group.add_argument(
        "--minwall",
        type=float,
        default=3.0,
        help="Minimum wall time per benchmark in seconds",
    )

    args = parser.parse_args()

    # It is easier to filter here than to pass arguments to multiple
    # functions.
    if args.only_simple:
        BENCHES[:] = [fn for fn in BENCHES if fn.simple]

    workload = Workload(args.function, args.agents, args.dims)
    print(
        "%s; %d agents; %d variables"
        % (workload.f.info.title, args.agents, args.dims)
    )

    run_benches(workload, minwall=args.minwall)
