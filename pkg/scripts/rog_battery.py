#!/usr/bin/env python3
"""Random-pair battery: decide rank-one generation for seeded random pairs,
re-verify every certificate, and cross-check against sampled evidence.

Usage:
    python3 scripts/rog_battery.py                     # 200 pairs, seed 3
    python3 scripts/rog_battery.py --pairs 50 --seed 1 --dims 3
    python3 scripts/rog_battery.py --probe-trials 4 --json battery.json
"""

from __future__ import annotations

import argparse
import collections
import dataclasses
import json
import sys
import time

import numpy as np

from sdpexact import rog


@dataclasses.dataclass
class BatteryConfig:
    pairs: int = 200
    seed: int = 3
    dims: tuple = (3, 3, 3, 4, 4)  # cycled per pair index
    solver_eps: float = 1e-5
    probe_trials: int = 2
    probe_samples: int = 2048
    probe_gap_tol: float = 1e-3
    probe_max_iter: int = 5000
    build_witnesses: bool = True
    json_path: str | None = None


def run(cfg: BatteryConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    counts = collections.Counter()
    inconsistencies = []
    verify_failures = []
    t0 = time.perf_counter()
    rows = []
    for k in range(cfg.pairs):
        d = cfg.dims[k % len(cfg.dims)]
        G1 = rng.standard_normal((d, d))
        G2 = rng.standard_normal((d, d))
        M1 = 0.5 * (G1 + G1.T)
        M2 = 0.5 * (G2 + G2.T)
        verdict = rog.check_pair(M1, M2, seed=k, eps=cfg.solver_eps)
        counts[verdict.status] += 1
        verified = rog.verify_certificate(verdict, M1, M2)
        if not verified:
            verify_failures.append(k)

        mset = rog.LmiSet((M1, M2), ("LE", "LE"))
        probe = rog.probe_random_objectives(
            mset, trials=cfg.probe_trials, seed=k, samples=cfg.probe_samples,
            gap_tol=cfg.probe_gap_tol, eps=cfg.solver_eps,
            max_iter=cfg.probe_max_iter)
        if verdict.status == "ROG_CERTIFIED":
            for rec in probe["records"]:
                if np.isfinite(rec["v_rank1"]) and rec["gap"] > cfg.probe_gap_tol:
                    inconsistencies.append(
                        {"pair": k, "trial": rec["trial"], "gap": rec["gap"]})

        witness_ok = None
        if (cfg.build_witnesses and d == 3
                and verdict.status == "NOT_ROG_CERTIFIED"):
            try:
                built = rog.construct_rank2_witness_3d(M1, M2, seed=k)
                witness_ok, _ = rog.verify_extreme_rank2(built["Z"], M1, M2)
            except rog.ConstructionFailed:
                witness_ok = False
            if not witness_ok:
                inconsistencies.append({"pair": k, "stage": "witness"})

        rows.append({"pair": k, "dim": d, "status": verdict.status,
                     "verified": verified, "max_gap": probe["max_gap"],
                     "witness_ok": witness_ok})
    elapsed = time.perf_counter() - t0
    return {"config": dataclasses.asdict(cfg), "counts": dict(counts),
            "verify_failures": verify_failures,
            "inconsistencies": inconsistencies, "elapsed_s": elapsed,
            "rows": rows}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--dims", type=int, nargs="+", default=[3, 3, 3, 4, 4],
                    help="dimension cycle across pair indices")
    ap.add_argument("--solver-eps", type=float, default=1e-5)
    ap.add_argument("--probe-trials", type=int, default=2)
    ap.add_argument("--probe-samples", type=int, default=2048)
    ap.add_argument("--probe-gap-tol", type=float, default=1e-3)
    ap.add_argument("--no-witnesses", action="store_true",
                    help="skip rank-two witness construction for 3x3 refutations")
    ap.add_argument("--json", dest="json_path", default=None)
    args = ap.parse_args(argv)
    if any(d < 2 or d > 4 for d in args.dims):
        ap.error("dims must lie in [2, 4] (probe oracle limit)")
    cfg = BatteryConfig(pairs=args.pairs, seed=args.seed,
                        dims=tuple(args.dims), solver_eps=args.solver_eps,
                        probe_trials=args.probe_trials,
                        probe_samples=args.probe_samples,
                        probe_gap_tol=args.probe_gap_tol,
                        probe_max_iter=5000,
                        build_witnesses=not args.no_witnesses,
                        json_path=args.json_path)
    out = run(cfg)
    print(f"pairs: {cfg.pairs}  elapsed: {out['elapsed_s']:.1f}s")
    for status, c in sorted(out["counts"].items()):
        print(f"  {status}: {c}")
    print(f"certificate verification failures: {len(out['verify_failures'])}")
    print(f"inconsistencies: {len(out['inconsistencies'])}")
    if cfg.json_path:
        with open(cfg.json_path, "w") as fh:
            json.dump(out, fh, indent=2, default=float)
        print(f"wrote {cfg.json_path}")
    return 1 if (out["verify_failures"] or out["inconsistencies"]) else 0


if __name__ == "__main__":
    sys.exit(main())
