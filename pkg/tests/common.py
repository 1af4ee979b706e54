import itertools
import os

import numpy as np
from scipy import stats as scipy_stats

from qlio.harness import ExperimentConfig, RunRecord
from qlio.lio import LioConfig
from qlio.optimizers import PsoConfig


def random_quaternions(generator, count, low=0.0, high=1.0):
    """Quaternion array of shape ``(count, 4)``."""
    return generator.uniform(low, high, (count, 4))


def brute_force_wilcoxon(diffs):
    """Two-sided exact p-value by enumerating every sign assignment."""
    diffs = np.asarray(diffs, dtype=np.float64)
    diffs = diffs[diffs != 0.0]
    n = len(diffs)

    doubled = np.rint(
        2.0 * scipy_stats.rankdata(np.abs(diffs), method="average")
    ).astype(np.int64)
    w_plus = int(doubled[diffs > 0].sum())
    t = min(w_plus, int(doubled.sum()) - w_plus)

    count = 0
    for signs in itertools.product((False, True), repeat=n):
        if int(doubled[list(signs)].sum()) <= t:
            count += 1

    return min(1.0, 2 * count / 2**n)


def make_record(
    function="sphere",
    n=2,
    seed=1,
    run_index=0,
    mu=1.0,
    mu_star=0.5,
    p_star=1.5,
    qpso_time=1.0,
    lio_time=0.1,
    q_star=None,
):
    if q_star is None:
        q_star = tuple((0.25, 0.5, 0.75, 1.0) for _ in range(n))

    return RunRecord(
        function=function,
        n=n,
        run_index=run_index,
        seed=seed,
        mu=mu,
        mu_star=mu_star,
        p_star=p_star,
        qpso_time=qpso_time,
        lio_time=lio_time,
        iterations_used=10,
        stopped_early=False,
        lio_evaluations=20 * 51,
        p_max=5.0,
        seed_p2=True,
        timestamp="2026-01-01T00:00:00+00:00",
        config_hash="0123456789abcdef",
        q_star=q_star,
    )


def synthetic_records(functions, dimensions, runs, generator):
    """Records of a full matrix with random but valid fitness values."""
    records = []
    for function in functions:
        for n in dimensions:
            for run in range(runs):
                mu = float(generator.uniform(0.5, 2.0))
                records.append(
                    make_record(
                        function=function,
                        n=n,
                        seed=int(generator.integers(0, 2**63)),
                        run_index=run,
                        mu=mu,
                        mu_star=mu * float(generator.uniform(0.1, 1.0)),
                        p_star=float(generator.uniform(1.0, 5.0)),
                        qpso_time=float(generator.uniform(1.0, 2.0)),
                        lio_time=float(generator.uniform(0.01, 0.2)),
                        q_star=tuple(
                            tuple(row)
                            for row in generator.random((n, 4)).tolist()
                        ),
                    )
                )
    return records


def tiny_config(tmpdir, **kwargs):
    """Small matrix that runs in well under a second per run."""
    settings = dict(
        functions=("sphere", "brown"),
        dimensions=(2,),
        runs_per_cell=2,
        base_seed=7,
        pso=PsoConfig(num_agents=8, max_iterations=15),
        lio=LioConfig(bh_agents=5, bh_iterations=4),
        output_path=os.path.join(tmpdir, "results.ndjson"),
    )
    settings.update(kwargs)
    return ExperimentConfig(**settings)
