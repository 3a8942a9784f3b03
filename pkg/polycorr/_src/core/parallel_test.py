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
"""Tests for parallel.py."""

import os
import threading
from unittest import mock

from absl.testing import absltest
from absl.testing import flagsaver
from absl.testing import parameterized
from polycorr._src.core import config
from polycorr._src.core import lattice
from polycorr._src.core import parallel


def _square_points(side):
  polygon = lattice.LatticePolygon(
      ((0, 0), (0, side), (side, side), (side, 0))
  )
  return len(lattice.lattice_points(polygon))


def _fails_on_odd_side(side):
  if side % 2:
    raise ValueError(f"Odd side {side}")
  return side


class ParallelTest(parameterized.TestCase):

  @parameterized.parameters(1, 2, 8, 32)
  def test_results_keep_input_order(self, num_workers):
    sides = list(range(1, 12))
    self.assertEqual(
        parallel.run_in_parallel(
            _square_points, [dict(side=s) for s in sides], num_workers
        ),
        [(s + 1) ** 2 for s in sides],
    )

  def test_empty_input(self):
    self.assertEqual(parallel.run_in_parallel(_square_points, [], 4), [])

  def test_single_worker_runs_inline(self):
    names = parallel.run_in_parallel(
        lambda: threading.current_thread().name, [{}, {}], 1
    )
    self.assertEqual(names, [threading.current_thread().name] * 2)

  @parameterized.parameters(1, 4)
  def test_failure_propagates(self, num_workers):
    with self.assertRaisesRegex(ValueError, "Odd side 3"):
      parallel.run_in_parallel(
          _fails_on_odd_side, [dict(side=2), dict(side=3)], num_workers
      )

  def test_invalid_worker_count(self):
    with self.assertRaisesRegex(ValueError, "greater than 0"):
      parallel.run_in_parallel(_square_points, [dict(side=1)], 0)

  @flagsaver.flagsaver(polycorr_num_threads=3)
  def test_default_workers_come_from_config(self):
    with mock.patch.dict(os.environ, {config.THREADS_ENV_VAR: ""}):
      names = parallel.run_in_parallel(
          lambda: threading.current_thread().name, [{}] * 6
      )
    self.assertTrue(all(name.startswith("polycorr_") for name in names))


if __name__ == "__main__":
  absltest.main()
