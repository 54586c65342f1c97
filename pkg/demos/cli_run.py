"""Drive the command line from Python: solve a telegraph problem by two
deterministic routes, simulate it with a fixed seed, and compare."""

import json
import tempfile
from pathlib import Path

from fractel.cli import main

config = {
    "equation": "telegraph",
    "alpha": 0.4,
    "lambda": 1.0,
    "symbol": {"kind": "fractional_laplacian", "beta": 1.5},
    "initial": {"kind": "gaussian", "center": 0.0, "width": 1.0},
    "grid": {"min": -3.0, "max": 3.0, "points": 13},
    "times": [1.0],
    "routes": ["analytic", "laplace-check"],
    "mc": {"n": 50000, "seed": 2024},
}

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    cfg = tmp / "run.json"
    cfg.write_text(json.dumps(config, indent=2))
    print("solve ->", main(["solve", "--config", str(cfg), "--out", str(tmp / "det")]))
    print("simulate ->", main(["simulate", "--config", str(cfg), "--out", str(tmp / "mc")]))
    a = str(tmp / "det" / "analytic_t0.csv")
    main(["compare", a, str(tmp / "det" / "laplace-check_t0.csv"), "--mode", "abs", "--threshold", "1e-7"])
    main(["compare", a, str(tmp / "mc" / "monte-carlo_t0.csv"), "--mode", "sigma", "--threshold", "4"])
    manifest = json.loads((tmp / "mc" / "manifest.json").read_text())
    print("manifest status:", manifest["status"], "| seed:", manifest["seed"],
          "| jobs:", [j["stream_id"] for j in manifest["stream_layout"]["jobs"]])
