"""Randomized certificate checks on the four reference domains.

Writes one JSON report per domain to --out and prints a summary line each.

    python3 scripts/run_verification.py --trials 25 --workers 4
"""

import argparse
import json
import math
from pathlib import Path

from spectrabound.geometry import Disk, Ellipse, Polygon, Sector
from spectrabound.harness import TrialConfig, power_inequality_trials, run_trials

DOMAINS = {
    "disk": Disk(0.0, 1.0),
    "ellipse": Ellipse(0.0, 2.0, 1.0),
    "square": Polygon((1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j)),
    "sector": Sector(0.0, 0.0, math.pi / 4),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=25, help="trials per dimension")
    ap.add_argument("--max-dim", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, domain in DOMAINS.items():
        cfg = TrialConfig(domain, dims=tuple(range(1, args.max_dim + 1)), trials=args.trials,
                          degrees=(0, 1, 2, 3), seed=args.seed)
        rep = run_trials(cfg, workers=args.workers)
        (out / f"verify_{name}.json").write_text(rep.to_json(include_records=True))
        print(f"{name:8s} trials={len(rep.records):4d} max_ratio={rep.max_ratio:.6f} "
              f"certificate={rep.certificate.value:.6f} ({rep.certificate.inputs['attained_by']}) "
              f"violations={len(rep.violations)} time={rep.runtime_s:.1f}s")

    pw = power_inequality_trials(dims=tuple(range(1, args.max_dim + 1)), seed=args.seed)
    (out / "power_inequality.json").write_text(json.dumps(pw.as_dict(), indent=2))
    print(f"powers   trials={pw.trials} max w(A^k)={pw.max_numerical_radius:.6f} "
          f"max ||A^k||={pw.max_norm:.6f} violations={len(pw.violations)}")


if __name__ == "__main__":
    main()
