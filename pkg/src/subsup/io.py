"""JSON formats for models, set-function oracles, modular weights and trees.

Output is canonical: sorted keys, two-space indent, floats in shortest
round-trip repr, trailing newline. ``save -> load -> save`` is byte-identical.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .infomodel import DiscreteClassModel, GaussianClassModel, entropy_oracle
from .polymatroid import ModularWeights
from .setcore import MAX_CHECK_N, SetFunctionOracle, TableOracle
from .structlearn import TreeStructure

FIXTURES = ("table1_corrected.json", "table1_printed.json")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ValidationError("no such file", str(path)) from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}", str(path)) from None


def _require(doc, key, path):
    if key not in doc:
        raise ValidationError(f"missing key {key!r}", path)
    return doc[key]


def model_from_json(doc, path="<model>"):
    if not isinstance(doc, dict):
        raise ValidationError("model document must be an object", path)
    kind = _require(doc, "type", path)
    n = _require(doc, "n", path)
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}", f"{path}.n")
    priors = _require(doc, "class_priors", path)
    labels = doc.get("labels")
    try:
        if kind == "discrete":
            tables = _require(doc, "tables", path)
            for c, t in enumerate(tables):
                if len(t) != 1 << n:
                    raise ValidationError(f"expected {1 << n} entries, got {len(t)}", f"tables[{c}]")
            return DiscreteClassModel(tables, priors, labels)
        if kind == "gaussian":
            covs = _require(doc, "covariances", path)
            arr = np.array(covs, dtype=np.float64)
            if arr.ndim != 3 or arr.shape[1:] != (n, n):
                raise ValidationError(f"covariances must be a list of {n}x{n} matrices", "covariances")
            return GaussianClassModel(covs, priors, labels)
    except ValidationError as exc:
        raise ValidationError(str(exc).split(": ", 1)[-1] if exc.path else str(exc),
                              f"{path}.{exc.path}" if exc.path else path) from None
    raise ValidationError(f"unknown model type {kind!r}", f"{path}.type")


def model_to_json(model) -> dict:
    doc = {"type": model.kind, "n": model.n, "class_priors": [float(p) for p in model.priors]}
    if model.ground.labels:
        doc["labels"] = list(model.ground.labels)
    if isinstance(model, DiscreteClassModel):
        doc["tables"] = [[float(x) for x in t] for t in model.tables]
    else:
        doc["covariances"] = [[[float(x) for x in row] for row in c] for c in model.covariances]
    return doc


def load_model(path):
    return model_from_json(read_json(path), str(path))


def save_model(model, path):
    write_json(path, model_to_json(model))


def load_fixture(name="table1_corrected.json"):
    """Load a model shipped in ``subsup/data``."""
    text = resources.files("subsup").joinpath("data", name).read_text()
    return model_from_json(json.loads(text), name)


def oracle_from_json(doc, path="<oracle>") -> SetFunctionOracle:
    """Accepts an explicit table ``{"n", "values"}``, a weight array, or a model (mixture entropy)."""
    if isinstance(doc, list):
        return ModularWeights.from_json(doc)
    if not isinstance(doc, dict):
        raise ValidationError("oracle document must be an object or an array", path)
    if "values" in doc:
        n = _require(doc, "n", path)
        if not isinstance(n, int) or not 1 <= n <= MAX_CHECK_N:
            raise ValidationError(f"explicit tables need 1 <= n <= {MAX_CHECK_N}", f"{path}.n")
        vals = doc["values"]
        if len(vals) != 1 << n:
            raise ValidationError(f"expected {1 << n} values, got {len(vals)}", f"{path}.values")
        return TableOracle(vals, labels=doc.get("labels"))
    if "type" in doc:
        model = model_from_json(doc, path)
        return entropy_oracle(model, with_class=bool(doc.get("condition_on_class", False)))
    raise ValidationError("unrecognized oracle document", path)


def load_oracle(path) -> SetFunctionOracle:
    return oracle_from_json(read_json(path), str(path))


def oracle_to_json(oracle: SetFunctionOracle) -> dict:
    doc = {"n": oracle.n, "values": [float(v) for v in oracle.table()]}
    if oracle.ground.labels:
        doc["labels"] = list(oracle.ground.labels)
    return doc


def load_tree(path) -> TreeStructure:
    return TreeStructure.from_json(read_json(path))


def save_tree(tree: TreeStructure, path):
    write_json(path, tree.to_json())
