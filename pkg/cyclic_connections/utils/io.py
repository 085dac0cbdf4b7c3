import json
import os
from fractions import Fraction

from cyclic_connections.algebra.scalars import LaurentSeries, fraction_str


def read_json(filepath):
    with open(filepath, "r") as f:
        return json.load(f)


def _canonical(obj):
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, LaurentSeries):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    return obj


def dumps_report(report) -> str:
    """Deterministic JSON: sorted keys, rationals as "p/q" strings."""
    return json.dumps(_canonical(report), ensure_ascii=False, sort_keys=True, indent=2)


def write_report(report, filepath):
    dirname = os.path.dirname(filepath)
    if dirname:
        os.makedirs(dirname, exist_ok=True)
    with open(filepath, "w") as f:
        f.write(dumps_report(report) + "\n")
