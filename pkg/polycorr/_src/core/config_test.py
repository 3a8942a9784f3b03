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
"""Tests for config.py."""
import os
from unittest import mock

from absl.testing import absltest
from absl.testing import flagsaver
from polycorr._src.core import config


class ConfigTest(absltest.TestCase):

  def test_read_default(self):
    self.assertEqual(config.config.wick_max_length, 16)

  @flagsaver.flagsaver
  def test_update(self):
    config.config.update("tree_bound", 3)
    self.assertEqual(config.config.tree_bound, 3)

  def test_unknown_option(self):
    with self.assertRaisesRegex(ValueError, "Unrecognized config option"):
      _ = config.config.does_not_exist
    with self.assertRaisesRegex(ValueError, "Unrecognized config option"):
      config.config.update("does_not_exist", 1)

  def test_setattr_rejected(self):
    with self.assertRaisesRegex(ValueError, "Please use update"):
      config.config.tree_bound = 2

  def test_threads_from_env(self):
    with mock.patch.dict(os.environ, {config.THREADS_ENV_VAR: "4"}):
      self.assertEqual(config.resolve_num_threads(), 4)
    with mock.patch.dict(os.environ, {config.THREADS_ENV_VAR: "zero"}):
      with self.assertRaisesRegex(ValueError, "POLYCORR_THREADS"):
        config.resolve_num_threads()

  def test_cache_dir_from_env(self):
    with mock.patch.dict(os.environ, {config.CACHE_ENV_VAR: "/tmp/pc"}):
      self.assertEqual(config.resolve_cache_dir(), "/tmp/pc")


if __name__ == "__main__":
  absltest.main()
