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
"""In-process metrics.

Counters and gauges record into a process-wide registry keyed by metric name
and field values. Nothing is exported; `snapshot` reads the values back.
"""

from __future__ import annotations

import collections
import threading
from typing import Any, Optional, Sequence

_lock = threading.Lock()
_values: dict[str, dict[tuple[Any, ...], Any]] = collections.defaultdict(dict)


class Metadata:
  """Description attached to a metric."""

  def __init__(self, description: str = "", **kwargs):
    del kwargs
    self.description = description


class Metric:
  """A named metric with optional string-valued fields.

  `Set` stores the latest value per field tuple; `IncrementBy` adds to it.
  """

  def __init__(
      self,
      name: str,
      *,
      value_type: type[Any] = int,
      metadata: Optional[Metadata] = None,
      root: Optional[Any] = None,
      fields: Sequence[tuple[str, type[Any]]] = (),
  ):
    del root
    self.name = name
    self.metadata = metadata or Metadata()
    self._value_type = value_type
    self._num_fields = len(fields)

  def _key(self, field_values: Sequence[Any]) -> tuple[Any, ...]:
    if len(field_values) != self._num_fields:
      raise ValueError(
          f"Metric {self.name} takes {self._num_fields} field values, got"
          f" {len(field_values)}."
      )
    return tuple(field_values)

  def IncrementBy(self, amount: int, *field_values: Any) -> None:
    key = self._key(field_values)
    with _lock:
      series = _values[self.name]
      series[key] = series.get(key, 0) + amount

  def Increment(self, *field_values: Any) -> None:
    self.IncrementBy(1, *field_values)

  def Set(self, value: Any, *field_values: Any) -> None:
    key = self._key(field_values)
    with _lock:
      _values[self.name][key] = self._value_type(value)

  def Get(self, *field_values: Any) -> Any:
    key = self._key(field_values)
    with _lock:
      return _values.get(self.name, {}).get(key, self._value_type())


Counter = Metric


def get_monitoring_root() -> None:
  return None


def snapshot() -> dict[str, dict[tuple[Any, ...], Any]]:
  """Copy of every recorded series."""
  with _lock:
    return {name: dict(series) for name, series in _values.items()}


def reset() -> None:
  with _lock:
    _values.clear()
