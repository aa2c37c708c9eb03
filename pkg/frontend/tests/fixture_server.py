"""Fixture server for the dashboard contract tests.

Runs the real labassess service with a tiny trained model and seeded
users, so every number the UI displays comes from the production API.
"""

import argparse

import numpy as np
import uvicorn

from labassess.core import Role
from labassess.evaluator import GbtConfig, train_gbt
from labassess.evaluator.features import FEATURE_NAMES, FeatureVector
from labassess.labsvc import LabService, create_app


def tiny_model():
    rng = np.random.default_rng(42)
    rows = []
    for _ in range(60):
        values = [float(v) for v in rng.uniform(0, 1, 10)]
        rows.append((FeatureVector(**dict(zip(FEATURE_NAMES, values))), float(40 + 50 * values[8])))
    return train_gbt(rows, GbtConfig(n_trees=25, max_depth=3), seed=42)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--port", type=int, required=True)
    args = parser.parse_args()

    service = LabService(model=tiny_model(), seed=42)
    service.add_user("prof", "prof-pass", Role.FACULTY, "Professor")
    for sid in ("s1", "s2", "s3", "s4"):
        service.add_user(sid, f"{sid}-pass", Role.STUDENT, sid.upper())
    uvicorn.run(create_app(service), host="127.0.0.1", port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
