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
"""Tests for cache.py."""
import os
from unittest import mock

from absl.testing import absltest
from etils import epath
from polycorr._src.core import monitoring
from polycorr._src.python import cache


class ResultCacheTest(absltest.TestCase):

  def setUp(self):
    super().setUp()
    self.cache = cache.ResultCache(self.create_tempdir().full_path)
    self.key = cache.make_key("count", "polygon:[[0,0]]", {"beta_order": 2})

  def test_miss_then_hit(self):
    self.assertIsNone(self.cache.lookup(self.key))
    self.cache.store(self.key, '{"l":4}')
    self.assertEqual(self.cache.lookup(self.key), '{"l":4}')

  def test_last_writer_wins(self):
    self.cache.store(self.key, "first")
    self.cache.store(self.key, "second")
    self.assertEqual(self.cache.lookup(self.key), "second")
    self.assertLen(list(self.cache.directory.iterdir()), 1)

  def test_caps_change_key(self):
    other = cache.make_key("count", "polygon:[[0,0]]", {"beta_order": 3})
    self.cache.store(self.key, "x")
    self.assertIsNone(self.cache.lookup(other))

  def test_key_is_order_independent(self):
    self.assertEqual(
        cache.make_key("wick", "k", {"a": 1, "b": 2}),
        cache.make_key("wick", "k", {"b": 2, "a": 1}),
    )

  def test_corrupt_entry_is_a_miss(self):
    self.cache.store(self.key, "x")
    (entry,) = list(self.cache.directory.iterdir())
    entry.write_text("{not json")
    with self.assertLogs(level="WARNING"):
      self.assertIsNone(self.cache.lookup(self.key))

  def test_lookups_are_counted(self):
    monitoring.reset()
    self.cache.lookup(self.key)
    self.cache.store(self.key, "x")
    self.cache.lookup(self.key)
    self.cache.lookup(self.key)
    self.assertEqual(
        monitoring.snapshot()["/polycorr/python/cache/lookups"],
        {("miss",): 1, ("hit",): 2},
    )

  def test_directory_from_environment(self):
    directory = self.create_tempdir().full_path
    with mock.patch.dict(os.environ, {"POLYCORR_CACHE": directory}):
      result_cache = cache.ResultCache()
    self.assertEqual(result_cache.directory, epath.Path(directory))


if __name__ == "__main__":
  absltest.main()
