# Copyright 2024 The polycorr Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Canonical JSON encoding of results and JSON file I/O."""

from __future__ import annotations

import fractions
import json
from typing import Any

from etils import epath
from polycorr._src.core import exceptions
import sympy


def to_jsonable(obj: Any) -> Any:
  """Converts results to plain JSON values.

  Objects with a `to_json` method use it. Fractions become integers or
  "p/q" strings and sets become sorted lists.

  Args:
    obj: The value to convert.

  Returns:
    A value `json.dumps` accepts.
  """
  if obj is None or isinstance(obj, (bool, int, str)):
    return obj
  if hasattr(obj, "to_json"):
    return to_jsonable(obj.to_json())
  if isinstance(obj, fractions.Fraction):
    if obj.denominator == 1:
      return obj.numerator
    return f"{obj.numerator}/{obj.denominator}"
  if isinstance(obj, dict):
    return {str(k): to_jsonable(v) for k, v in obj.items()}
  if isinstance(obj, (list, tuple)):
    return [to_jsonable(v) for v in obj]
  if isinstance(obj, (set, frozenset)):
    return sorted(
        (to_jsonable(v) for v in obj),
        key=lambda v: json.dumps(v, sort_keys=True),
    )
  if isinstance(obj, sympy.Basic):
    return str(obj)
  raise TypeError(f"Cannot encode {type(obj).__name__} as JSON: {obj!r}")


def dumps(obj: Any, pretty: bool = False) -> str:
  """Byte-stable JSON text: sorted keys and fixed separators."""
  if pretty:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)
  return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))


def read_json(path: epath.PathLike) -> Any:
  """Parses a JSON file; a missing or malformed file is a schema error."""
  path = epath.Path(path)
  if not path.exists():
    raise exceptions.SchemaError(f"File {path} does not exist.")
  try:
    return json.loads(path.read_text())
  except json.JSONDecodeError as e:
    raise exceptions.SchemaError(f"{path} is not valid JSON: {e}") from e


def write_text(path: epath.PathLike, text: str) -> None:
  path = epath.Path(path)
  path.parent.mkdir(parents=True, exist_ok=True)
  path.write_text(text)
