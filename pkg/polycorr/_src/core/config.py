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
"""Handle polycorr config options.

Config options can be set via flags starting with '--polycorr_' or by calling
`polycorr.config.update(name, value)`.
"""
import os
from typing import Any

from absl import flags
from polycorr._src.core import monitoring as polycorr_monitoring

from polycorr._src.core import monitoring

CACHE_ENV_VAR = "POLYCORR_CACHE"
THREADS_ENV_VAR = "POLYCORR_THREADS"

_MAX_CANDIDATE_POINTS = flags.DEFINE_integer(
    "polycorr_max_candidate_points",
    64,
    (
        "Maximum number of candidate vertices (boundary sequence plus interior"
        " lattice points) a polygon may offer to the triangulation and"
        " subdivision enumerators."
    ),
)
_WICK_MAX_LENGTH = flags.DEFINE_integer(
    "polycorr_wick_max_length",
    16,
    "Longest monomial accepted by the naive perfect-pairing sum.",
)
_WICK_MAX_ORDER = flags.DEFINE_integer(
    "polycorr_wick_max_order",
    6,
    "Largest interaction order (number of vertices) the Wick oracle expands.",
)
_HMM_MAX_K = flags.DEFINE_integer(
    "polycorr_hmm_max_k",
    12,
    "Largest power k accepted by hmm_trace_moment.",
)
_TREE_BOUND = flags.DEFINE_integer(
    "polycorr_tree_bound",
    6,
    "Largest number of tree vertices in tensor-model searches.",
)
_CACHE_DIR = flags.DEFINE_string(
    "polycorr_cache_dir",
    None,
    (
        "Directory of the CLI result cache. The POLYCORR_CACHE environment"
        " variable takes precedence. Defaults to ~/.cache/polycorr."
    ),
)
_NUM_THREADS = flags.DEFINE_integer(
    "polycorr_num_threads",
    1,
    (
        "Worker threads for independent checks. The POLYCORR_THREADS"
        " environment variable takes precedence."
    ),
)
_STRICT_COLLINEAR = flags.DEFINE_bool(
    "polycorr_strict_collinear",
    False,
    "If True, polygons with collinear consecutive boundary corners are"
    " rejected.",
)
_SECONDARY_FULL_POOL = flags.DEFINE_bool(
    "polycorr_secondary_full_pool",
    False,
    (
        "If True, regularity and secondary-polytope computations use every"
        " lattice point of the polygon as a height variable, including"
        " boundary lattice points that are not listed in the boundary"
        " sequence."
    ),
)
_DEBUG_MODE = flags.DEFINE_bool(
    "polycorr_debug_mode",
    False,
    "If True, enumerators re-check every invariant of every result.",
)

_POLYCORR_FLAGS = (
    _MAX_CANDIDATE_POINTS,
    _WICK_MAX_LENGTH,
    _WICK_MAX_ORDER,
    _HMM_MAX_K,
    _TREE_BOUND,
    _CACHE_DIR,
    _NUM_THREADS,
    _STRICT_COLLINEAR,
    _SECONDARY_FULL_POOL,
    _DEBUG_MODE,
)

_polycorr_config_metric = monitoring.Metric(
    "/polycorr/config",
    value_type=int,
    metadata=monitoring.Metadata(description="polycorr config read metric."),
    root=polycorr_monitoring.get_monitoring_root(),
    fields=[("name", str)],
)


class Config:
  """Class for holding current polycorr configuration."""

  # Loosen the static type checking requirements.
  _HAS_DYNAMIC_ATTRIBUTES = True

  def __getattr__(self, name: str) -> Any:
    flag_name = f"polycorr_{name}"
    if any(f.name == flag_name for f in _POLYCORR_FLAGS):
      # Unparsed flags still carry their default value.
      value = flags.FLAGS[flag_name].value
      _polycorr_config_metric.Set(int(value is not None), flag_name)
      return value
    raise ValueError(f"Unrecognized config option: {name}")

  def __setattr__(self, name: str, value: Any):
    raise ValueError("Please use update().")

  def update(self, name: str, value: Any):
    flag_name = f"polycorr_{name}"
    if any(f.name == flag_name for f in _POLYCORR_FLAGS):
      flags.FLAGS[flag_name].value = value
      return
    raise ValueError(f"Unrecognized config option: {name}")


config = Config()


def resolve_cache_dir() -> str:
  """Returns the cache directory: $POLYCORR_CACHE, the flag, or the default."""
  from_env = os.environ.get(CACHE_ENV_VAR)
  if from_env:
    return from_env
  if config.cache_dir:
    return config.cache_dir
  return os.path.join(os.path.expanduser("~"), ".cache", "polycorr")


def resolve_num_threads() -> int:
  """Returns the worker count: $POLYCORR_THREADS or the flag."""
  from_env = os.environ.get(THREADS_ENV_VAR)
  if from_env:
    try:
      num_threads = int(from_env)
    except ValueError as e:
      raise ValueError(
          f"Invalid {THREADS_ENV_VAR}. Got {from_env!r}, but it must be a"
          " positive integer."
      ) from e
  else:
    num_threads = config.num_threads
  if num_threads < 1:
    raise ValueError(
        f"Invalid number of threads. Got {num_threads}, but it must be greater"
        " than 0."
    )
  return num_threads
