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
"""Content-addressed result cache of the command line front-end.

Each entry is one file holding a single JSON line `{"key": ..., "output":
...}`, named by the SHA-256 of its key. Writers write a private temporary file
and rename it into place, so readers see either nothing or a whole entry and
the last writer of a key wins.
"""

from __future__ import annotations

import hashlib
import json
import os
from typing import Any, Mapping, Optional
import uuid

from absl import logging
from etils import epath
from polycorr._src.core import config as polycorr_config
from polycorr._src.core import monitoring as polycorr_monitoring

from polycorr._src.core import monitoring

_cache_counter = monitoring.Counter(
    "/polycorr/python/cache/lookups",
    metadata=monitoring.Metadata(description="Result cache lookups."),
    root=polycorr_monitoring.get_monitoring_root(),
    fields=[("outcome", str)],
)


def make_key(
    command: str, canonical_input: str, caps: Mapping[str, Any]
) -> str:
  """Cache key of one job: the command, its canonical input and its caps."""
  return json.dumps(
      {"command": command, "input": canonical_input, "caps": dict(caps)},
      sort_keys=True,
      separators=(",", ":"),
  )


class ResultCache:
  """A directory of cached command outputs."""

  def __init__(self, directory: Optional[epath.PathLike] = None):
    if directory is None:
      directory = polycorr_config.resolve_cache_dir()
    self._directory = epath.Path(directory)

  @property
  def directory(self) -> epath.Path:
    return self._directory

  def _path(self, key: str) -> epath.Path:
    digest = hashlib.sha256(key.encode("utf-8")).hexdigest()
    return self._directory / f"{digest}.jsonl"

  def lookup(self, key: str) -> Optional[str]:
    """The stored output of `key`, or None on a miss or a corrupt entry."""
    path = self._path(key)
    if not path.exists():
      _cache_counter.Increment("miss")
      return None
    try:
      entry = json.loads(path.read_text())
      if entry["key"] != key or not isinstance(entry["output"], str):
        raise ValueError("key mismatch")
    except (ValueError, KeyError, TypeError) as e:
      logging.warning("Ignoring corrupt cache entry %s: %s", path, e)
      _cache_counter.Increment("corrupt")
      return None
    _cache_counter.Increment("hit")
    return entry["output"]

  def store(self, key: str, output: str) -> None:
    self._directory.mkdir(parents=True, exist_ok=True)
    path = self._path(key)
    tmp = self._directory / f".{path.name}.{os.getpid()}.{uuid.uuid4().hex}"
    tmp.write_text(
        json.dumps({"key": key, "output": output}, sort_keys=True) + "\n"
    )
    tmp.rename(path)
    logging.vlog(1, "Stored cache entry %s", path)
