"""Config loading and deterministic report rendering.

Everything here is plain JSON / whitespace-separated numbers, so runs
are reproducible and reports can be compared byte for byte: no
timestamps, keys sorted, floats rendered with repr.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .algebra import AlgebraElement, TracialAlgebra
from .errors import StructureError
from .hermitian import SuperOperator
from .norms import SymmetricNorm, norm_from_config


def load_config(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise StructureError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise StructureError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise StructureError("config must be a JSON object")
    return cfg


def load_algebra(cfg: dict) -> TracialAlgebra:
    """{"blocks": [{"dim": d, "weight": w}, ...]}"""
    try:
        blocks = tuple((int(b["dim"]), float(b["weight"]))
                       for b in cfg["blocks"])
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"bad algebra config: {exc}") from exc
    return TracialAlgebra(blocks)


def load_norm(cfg: dict) -> SymmetricNorm:
    return norm_from_config(cfg)


def _numbers_from_file(path: str | Path) -> list[float]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise StructureError(f"cannot read element file: {exc}") from exc
    try:
        return [float(tok) for tok in text.split()]
    except ValueError as exc:
        raise StructureError(f"non-numeric data in {path}: {exc}") from exc


def _interleaved_to_matrix(values: list[float], d: int,
                           what: str) -> np.ndarray:
    if len(values) != 2 * d * d:
        raise StructureError(
            f"{what}: expected {2 * d * d} numbers for a {d}x{d} block, "
            f"got {len(values)}")
    arr = np.asarray(values, dtype=float).reshape(d * d, 2)
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(d, d)


def load_element(cfg: dict, algebra: TracialAlgebra,
                 base_dir: str | Path = ".") -> AlgebraElement:
    """Inline {"blocks": [[re, im, ...] row-major per block]} or
    {"path": file} with: block count, then per block its dim followed by
    the interleaved entries.
    """
    if "path" in cfg:
        nums = _numbers_from_file(Path(base_dir) / cfg["path"])
        pos = 0

        def take(k: int) -> list[float]:
            nonlocal pos
            if pos + k > len(nums):
                raise StructureError("element file ended early")
            chunk = nums[pos:pos + k]
            pos += k
            return chunk

        count = int(take(1)[0])
        if count != algebra.num_blocks:
            raise StructureError(
                f"element file has {count} blocks, algebra has "
                f"{algebra.num_blocks}")
        blocks = []
        for i, d in enumerate(algebra.dims):
            fd = int(take(1)[0])
            if fd != d:
                raise StructureError(
                    f"block {i}: file says dim {fd}, algebra says {d}")
            blocks.append(_interleaved_to_matrix(take(2 * d * d), d,
                                                 f"block {i}"))
        if pos != len(nums):
            raise StructureError("trailing data in element file")
        return algebra.element(blocks)

    if "blocks" not in cfg:
        raise StructureError('element config needs "blocks" or "path"')
    raw = cfg["blocks"]
    if len(raw) != algebra.num_blocks:
        raise StructureError(
            f"element config has {len(raw)} blocks, algebra has "
            f"{algebra.num_blocks}")
    blocks = [_interleaved_to_matrix(list(map(float, vals)), d, f"block {i}")
              for i, (vals, d) in enumerate(zip(raw, algebra.dims))]
    return algebra.element(blocks)


def load_operator(cfg: dict, algebra: TracialAlgebra,
                  base_dir: str | Path = ".") -> SuperOperator:
    """Kinds: structured {a, b}, dense {matrix | path}, transpose, identity."""
    kind = cfg.get("kind")
    if kind == "structured":
        a = load_element(cfg["a"], algebra, base_dir)
        b = load_element(cfg["b"], algebra, base_dir)
        return SuperOperator.structured(a, b)
    if kind == "dense":
        D = algebra.coord_dim
        if "path" in cfg:
            nums = _numbers_from_file(Path(base_dir) / cfg["path"])
            if not nums or int(nums[0]) != D:
                raise StructureError(
                    f"dense operator file must start with {D}")
            nums = nums[1:]
        else:
            nums = [float(v) for v in cfg["matrix"]]
        mat = _interleaved_to_matrix(nums, D, "dense operator")
        return SuperOperator.from_dense(algebra, mat)
    if kind == "transpose":
        return SuperOperator.transpose_map(algebra)
    if kind == "identity":
        return SuperOperator.identity(algebra)
    raise StructureError(f"unknown operator kind: {kind!r}")


def dump_element(x: AlgebraElement) -> dict:
    """Inverse of the inline form accepted by :func:`load_element`."""
    blocks = []
    for blk in x.blocks:
        flat = blk.reshape(-1)
        pairs = np.column_stack([flat.real, flat.imag]).reshape(-1)
        blocks.append([float(v) for v in pairs])
    return {"blocks": blocks}


# -- report rendering --------------------------------------------------------


def _render_value(v) -> str:
    if isinstance(v, (np.floating, np.integer, np.complexfloating)):
        v = v.item()
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return repr(v)
    if isinstance(v, complex):
        return f"{_render_value(v.real)}{v.imag:+}j"
    if v is None:
        return "none"
    return str(v)


def _flatten(obj, prefix: str = "") -> list[tuple[str, str]]:
    rows = []
    if isinstance(obj, dict):
        for key in obj:
            rows.extend(_flatten(obj[key], f"{prefix}{key}."))
    elif isinstance(obj, (list, tuple)):
        for i, item in enumerate(obj):
            rows.extend(_flatten(item, f"{prefix}{i}."))
    else:
        rows.append((prefix[:-1], _render_value(obj)))
    return rows


def render_text(report: dict) -> str:
    """Stable key: value lines, insertion order preserved."""
    width = max((len(k) for k, _ in _flatten(report)), default=0)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in _flatten(report)) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def render_json_lines(reports: list[dict]) -> str:
    return "\n".join(json.dumps(_jsonable(r), sort_keys=True)
                     for r in reports) + "\n"


def write_report(reports: list[dict], fmt: str,
                 out_path: str | Path | None = None) -> str:
    if fmt == "json-lines":
        text = render_json_lines(reports)
    elif fmt == "text":
        text = "\n".join(render_text(r) for r in reports)
    else:
        raise StructureError(f"unknown format {fmt!r}")
    if out_path is not None:
        Path(out_path).write_text(text)
    return text
