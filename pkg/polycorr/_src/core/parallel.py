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
"""Fan-out helper for independent exact computations."""

from concurrent import futures
from typing import Any, Callable, Mapping, Optional, Sequence, TypeVar

from polycorr._src.core import config as polycorr_config

T = TypeVar("T")


def run_in_parallel(
    function: Callable[..., T],
    list_of_kwargs_to_function: Sequence[Mapping[str, Any]],
    num_workers: Optional[int] = None,
    thread_name_prefix: str = "polycorr_",
) -> list[T]:
  """Runs a function on a list of kwargs with a ThreadPoolExecutor.

  Results come back in the order of `list_of_kwargs_to_function`, so callers
  get identical output for every worker count. The first exception raised by
  any call is propagated to the calling thread and the remaining calls are
  cancelled where possible.

  Args:
    function: a function.
    list_of_kwargs_to_function: A list of dicts mapping from string to argument
      value. These will be passed into `function` as kwargs.
    num_workers: Number of threads. Defaults to
      `config.resolve_num_threads()`.
    thread_name_prefix: The thread name prefix string.

  Returns:
    list of return values from function, in the same order as the arguments in
    list_of_kwargs_to_function.
  """
  if num_workers is None:
    num_workers = polycorr_config.resolve_num_threads()
  if num_workers < 1:
    raise ValueError(
        "Number of workers must be greater than 0. Was {}".format(num_workers)
    )
  if num_workers == 1:
    return [function(**kwargs) for kwargs in list_of_kwargs_to_function]

  thread_name = thread_name_prefix + getattr(function, "__name__", "unknown")
  with futures.ThreadPoolExecutor(
      num_workers, thread_name_prefix=thread_name
  ) as executor:
    fs = [
        executor.submit(function, **kwargs)
        for kwargs in list_of_kwargs_to_function
    ]
    for completed in futures.as_completed(fs):
      if completed.exception():
        for remaining_future in fs:
          remaining_future.cancel()
        raise completed.exception()

  return [f.result() for f in fs]
