"""JSON and CSV plumbing for the command line interface."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .anosov import LimitSetSample, RepSpec, word_from_str, word_to_str
from .forms import FormSpec, GLSpec, parse_form
from .scalars import MatK, ScalarTag
from .subspaces import Subspace, decode_matrix, encode_matrix, subspace_from_json


class InputError(ValueError):
    """Malformed or inconsistent user input."""


def load_json(source: str):
    """Parse a JSON literal or the contents of a file path."""
    text = source
    p = Path(source)
    if not source.lstrip().startswith(("{", "[")):
        if not p.exists():
            raise InputError(f"file not found: {source}")
        text = p.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {source[:60]!r}: {exc}") from exc


def load_form(source: str) -> "FormSpec | GLSpec":
    try:
        return parse_form(load_json(source))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad form description: {exc}") from exc


def load_matrix(source: str, tag: ScalarTag) -> np.ndarray:
    data = load_json(source)
    if isinstance(data, dict):
        if "scalar" in data and ScalarTag.parse(data["scalar"]) is not tag:
            raise InputError("matrix field does not match the form")
        data = data.get("matrix")
    if data is None:
        raise InputError("matrix JSON needs a 'matrix' entry")
    try:
        return decode_matrix(tag, data)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def load_rep(source: str) -> RepSpec:
    data = load_json(source)
    if not isinstance(data, dict) or "form" not in data or "generators" not in data:
        raise InputError("representation JSON needs 'form' and 'generators'")
    try:
        form = parse_form(data["form"])
        gens = [decode_matrix(form.tag, g) for g in data["generators"]]
        return RepSpec(form, gens)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad representation: {exc}") from exc


def rep_to_json(rep: RepSpec) -> dict:
    return {"form": rep.form.to_json(), "generators": [encode_matrix(rep.tag, g) for g in rep.generators]}


def load_subspace(source: str) -> Subspace:
    try:
        return subspace_from_json(load_json(source))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad subspace: {exc}") from exc


def _components(tag: ScalarTag, basis: np.ndarray) -> np.ndarray:
    K = MatK.from_numeric(tag, basis).entries
    if tag is ScalarTag.C:
        K = np.stack([K.real, K.imag], axis=-1)
    return np.asarray(K, dtype=float).ravel()


def write_limit_set_csv(sample: LimitSetSample, path, tag: ScalarTag) -> None:
    """One row per point: word, gap, scalar, rows, cols, then real components row-major."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if not sample.points:
            w.writerow(["word", "gap", "scalar", "rows", "cols"])
            return
        p0 = sample.points[0]
        ncomp = _components(tag, p0.basis).size
        w.writerow(["word", "gap", "scalar", "rows", "cols"] + [f"v{i}" for i in range(ncomp)])
        for pt, gap, word in zip(sample.points, sample.gaps, sample.source_words):
            w.writerow([word_to_str(word) if word is not None else "", repr(float(gap)), tag.value,
                        pt.ambient_dim, pt.k] + [repr(float(x)) for x in _components(tag, pt.basis)])


def read_limit_set_csv(path, form: "FormSpec | None" = None) -> LimitSetSample:
    p = Path(path)
    if not p.exists():
        raise InputError(f"file not found: {path}")
    points, gaps, words = [], [], []
    d = 1
    with open(p, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[:5] != ["word", "gap", "scalar", "rows", "cols"]:
            raise InputError("limit-set CSV header must start with word,gap,scalar,rows,cols")
        for row in reader:
            try:
                tag = ScalarTag.parse(row[2])
                rows, cols = int(row[3]), int(row[4])
                vals = np.array([float(x) for x in row[5:]])
                shape = (rows, cols) + ({"R": (), "C": (2,), "H": (4,)}[tag.value])
                arr = vals.reshape(shape)
            except (IndexError, ValueError) as exc:
                raise InputError(f"bad limit-set row: {exc}") from exc
            B = decode_matrix(tag, arr.tolist())
            points.append(Subspace.span(B, tag, form))
            gaps.append(float(row[1]))
            words.append(word_from_str(row[0]) if row[0] else None)
            d = cols
    return LimitSetSample(points, gaps, words, d)


def dumps(report: dict) -> str:
    return json.dumps(_plain(report), indent=2, sort_keys=True) + "\n"


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
        if np.isnan(x):
            return "nan"
        return x
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    return x
