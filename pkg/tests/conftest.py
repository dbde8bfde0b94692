import hashlib
import math
import os

import pytest

from modvar.params import BathParams, PhysicalConstants, make_superposition

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

# the working parameter point used throughout the suite
BASE = {"m": 1.0, "hbar": 1.0, "kB": 1.0, "g": -3.0, "L": 50.0, "sigma0": 1.0, "k": 0.1}


def param_hash(params):
    # keep in sync with scripts/generate_goldens.py
    blob = ";".join(
        "%s=%s" % (key, "%.17g" % params[key] if isinstance(params[key], float) else params[key])
        for key in sorted(params)
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def base_constants():
    return PhysicalConstants(m=BASE["m"], hbar=BASE["hbar"], kB=BASE["kB"], g=BASE["g"])


def base_spec(alpha=0.0):
    return make_superposition(
        L=BASE["L"], sigma0=BASE["sigma0"], k=BASE["k"], alpha=alpha, hbar=BASE["hbar"]
    )


def make_bath(gamma, T):
    return BathParams(gamma=gamma, T=T, constants=base_constants())


@pytest.fixture(scope="session")
def goldens():
    records = {}
    with open(os.path.join(DATA_DIR, "golden_values.txt"), encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            quantity, phash, values, oracle, tol = (p.strip() for p in line.split(", "))
            records[(quantity, phash)] = ([float(v) for v in values.split()], oracle, float(tol))
    return records


def golden_record(goldens, quantity, params):
    key = (quantity, param_hash(params))
    assert key in goldens, "missing golden record %s / %s" % key
    return goldens[key]
