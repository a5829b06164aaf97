"""Timing comparison of the compiled and pure-NumPy trajectory kernels.

Run from the repository root after an editable install:

    python benchmarks/bench_backends.py [--mc-n 2000] [--nodes 16]

Forces each backend through PMDSIM_MC_BACKEND in a subprocess so both
are measured against the same build, and checks that they agree to
floating-point roundoff.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import textwrap

_WORKER = textwrap.dedent(
    """
    import json, sys, time
    import numpy as np
    import pmdsim

    mc_n, nodes = json.loads(sys.argv[1])
    params = pmdsim.FiberParameters.dimensionless()
    env = pmdsim.PulseEnvelope.single(kappa=params.omega0 / 20.0, omega0=params.omega0)
    grid = pmdsim.make_grid(env, n_nodes=nodes, half_width=4.0)
    cfg = pmdsim.TrajectoryConfig(n_trajectories=mc_n, seed=7, dz=1.0 / 128.0)

    t0 = time.perf_counter()
    density = pmdsim.ensemble_single(env, params, 0.5, cfg, grid)
    elapsed = time.perf_counter() - t0
    digest = [
        float(np.real(density.kernel[0, 0, nodes // 2, nodes // 2])),
        float(np.real(density.kernel[1, 1, nodes // 2, nodes // 2])),
        float(np.sum(np.abs(density.kernel))),
    ]
    print(json.dumps({"backend": pmdsim.backend_name(), "seconds": elapsed, "digest": digest}))
    """
)


def run_backend(name: str, mc_n: int, nodes: int) -> dict:
    env = dict(os.environ, PMDSIM_MC_BACKEND=name)
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, json.dumps([mc_n, nodes])],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mc-n", type=int, default=2000)
    parser.add_argument("--nodes", type=int, default=16)
    args = parser.parse_args()

    results = {}
    for name in ("python", "cython"):
        try:
            results[name] = run_backend(name, args.mc_n, args.nodes)
        except subprocess.CalledProcessError as exc:
            print(f"{name}: unavailable ({exc.stderr.strip().splitlines()[-1]})")
    for name, res in results.items():
        print(f"{res['backend']:>7}: {res['seconds']:8.3f} s")
    if len(results) == 2:
        a, b = results["python"]["digest"], results["cython"]["digest"]
        drift = max(abs(x - y) for x, y in zip(a, b))
        ratio = results["python"]["seconds"] / results["cython"]["seconds"]
        print(f"speedup: {ratio:.1f}x, digest drift {drift:.3e}")
        if drift > 1e-9:
            print("backends disagree beyond roundoff", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
