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
"""Tests for cli.py."""
import io
import json
import sys
from unittest import mock

from absl.testing import absltest
from absl.testing import flagsaver
from polycorr._src.core import exceptions
from polycorr._src.python import cache
from polycorr._src.python import cli
from polycorr._src.python import polycorr_logging
from polycorr._src.python import trees

SQUARE = {"dim": 2, "boundary": [[0, 0], [0, 1], [1, 1], [1, 0]]}
SHIFTED_SQUARE = {"dim": 2, "boundary": [[5, 3], [5, 4], [6, 4], [6, 3]]}
DIAMOND = {"dim": 2, "vertices": [[1, 0], [0, 1], [-1, 0], [0, -1]]}
TETRAHEDRON = {
    "dim": 3,
    "vertices": [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
}


class CliTest(absltest.TestCase):

  def setUp(self):
    super().setUp()
    self.cache = cache.ResultCache(self.create_tempdir().full_path)
    self.stderr = io.StringIO()
    self.enter_context(mock.patch.object(sys, "stderr", self.stderr))

  def tearDown(self):
    polycorr_logging.clear_process_identifier_prefix()
    super().tearDown()

  def _file(self, obj):
    return self.create_tempfile(content=json.dumps(obj)).full_path

  def _run(self, command, obj=None, **kwargs):
    path = None if obj is None else self._file(obj)
    job = cli.JobSpec(command=command, input_path=path, **kwargs)
    return cli.run(job, self.cache)

  def test_count(self):
    self.assertEqual(self._run("count", SQUARE), (0, '{"l":4,"l_star":0}'))

  def test_correlate_without_deformation(self):
    status, output = self._run("correlate", SQUARE, set_x="0")
    self.assertEqual(status, 0)
    self.assertEqual(
        json.loads(output),
        {"terms": [{"beta": 2, "coeff": 2, "mu": 0, "t": {}, "x": {}}]},
    )

  def test_triangulate(self):
    status, output = self._run("triangulate", SQUARE)
    self.assertEqual(status, 0)
    self.assertEqual(json.loads(output)["count"], 2)

  def test_ward(self):
    status, output = self._run("ward", SQUARE, n=1, t_order=2)
    self.assertEqual(status, 0)
    result = json.loads(output)
    self.assertEqual(result["residual"], "0")
    self.assertTrue(result["pass"])

  def test_wick_matches_direct(self):
    status, output = self._run("wick", SQUARE, beta_order=2)
    self.assertEqual(status, 0)
    self.assertTrue(json.loads(output)["matches_direct"])

  def test_secondary(self):
    status, output = self._run("secondary", SQUARE)
    self.assertEqual(status, 0)
    self.assertLen(json.loads(output)["vertices"], 2)

  def test_virasoro_check_pair(self):
    status, output = self._run(
        "virasoro-check", n=1, m=-1, window_k=8, window_d=2
    )
    self.assertEqual(status, 0)
    self.assertEqual(
        json.loads(output)["pairs"], [{"m": -1, "n": 1, "pass": True}]
    )

  def test_toric_dual(self):
    status, output = self._run("toric-dual", DIAMOND)
    self.assertEqual(status, 0)
    result = json.loads(output)
    self.assertTrue(result["reflexive"])
    self.assertTrue(result["double_dual"])
    self.assertLen(result["dual"]["vertices"], 4)

  def test_toric_census(self):
    status, output = self._run("toric-dual", k=4)
    self.assertEqual(status, 0)
    self.assertEqual(json.loads(output)["reflexive_polygons"], 16)

  def test_tensor_correlate(self):
    status, output = self._run("tensor-correlate", TETRAHEDRON, t_order=1)
    self.assertEqual(status, 0)
    result = json.loads(output)
    self.assertEqual(result["tilings"], 1)
    self.assertTrue(result["matches_direct"])

  def test_tensor_virasoro_pairs(self):
    leaf = {"d": 3, "vertices": 1}
    pair = {"d": 3, "vertices": 2, "edges": [[0, 1, 1, 2]]}
    status, output = self._run(
        "tensor-virasoro",
        {
            "pairs": [
                {"t1": leaf, "v1": [0, 0], "t2": leaf, "v2": [0, 1]},
                {"t1": leaf, "v1": [0, 2], "t2": pair, "v2": [1, 0]},
            ]
        },
    )
    self.assertEqual(status, 0)
    result = json.loads(output)
    self.assertLen(result["pairs"], 2)
    self.assertTrue(result["pass"])

  def test_default_tree_pairs_cover_small_trees(self):
    pairs = cli._tree_pairs(None)
    num_marked = sum(
        len(t.open_edges()) for t in trees.enumerate_trees(3, 2)
    )
    self.assertLen(pairs, num_marked**2)
    self.assertEqual(max(p[2].num_vertices for p in pairs), 2)

  def test_cache_hit_is_byte_identical(self):
    first = self._run("correlate", SQUARE)
    self.assertNotIn("cached", self.stderr.getvalue())
    second = self._run("correlate", SQUARE)
    self.assertEqual(first, second)
    self.assertIn('{"cached":true}', self.stderr.getvalue())

  def test_translated_polygon_hits_cache(self):
    self._run("count", SQUARE)
    job = cli.JobSpec(command="count", input_path=self._file(SHIFTED_SQUARE))
    self.assertEqual(cli.execute(job, self.cache), ('{"l":4,"l_star":0}', True))

  def test_translated_polygon_misses_cache_with_coordinates(self):
    self._run("triangulate", SQUARE)
    job = cli.JobSpec(
        command="triangulate", input_path=self._file(SHIFTED_SQUARE)
    )
    _, cached = cli.execute(job, self.cache)
    self.assertFalse(cached)

  def test_changed_caps_miss_cache(self):
    self._run("correlate", SQUARE, beta_order=2)
    job = cli.JobSpec(
        command="correlate", input_path=self._file(SQUARE), beta_order=1
    )
    _, cached = cli.execute(job, self.cache)
    self.assertFalse(cached)

  def test_no_cache(self):
    self._run("count", SQUARE, use_cache=False)
    self.assertEqual(list(self.cache.directory.iterdir()), [])

  def test_schema_error_exit_code(self):
    path = self.create_tempfile(content="{not json").full_path
    status, output = cli.run(
        cli.JobSpec(command="count", input_path=path), self.cache
    )
    self.assertEqual((status, output), (cli.EXIT_SCHEMA, ""))
    self.assertIn("Invalid input", self.stderr.getvalue())

  def test_missing_input(self):
    self.assertEqual(self._run("count")[0], cli.EXIT_SCHEMA)

  def test_counter_clockwise_polygon_is_rejected(self):
    ccw = {"dim": 2, "boundary": [[0, 0], [1, 0], [1, 1], [0, 1]]}
    self.assertEqual(self._run("count", ccw)[0], cli.EXIT_SCHEMA)

  def test_cap_exit_code(self):
    status, _ = self._run("wick", SQUARE, beta_order=7)
    self.assertEqual(status, cli.EXIT_CAP)

  @flagsaver.flagsaver(polycorr_tree_bound=2)
  def test_tree_bound_cap(self):
    status, _ = self._run("tensor-correlate", TETRAHEDRON, tree_bound=3)
    self.assertEqual(status, cli.EXIT_CAP)

  def test_internal_error_exit_code(self):
    def broken(job, obj):
      raise exceptions.PolycorrInternalError("broken invariant")

    with mock.patch.dict(cli.VERBS, {"count": cli._Verb(broken)}):
      status, _ = self._run("count", SQUARE, use_cache=False)
    self.assertEqual(status, cli.EXIT_INTERNAL)

  def test_ward_mode_zero_is_rejected(self):
    self.assertEqual(self._run("ward", SQUARE, n=0)[0], cli.EXIT_SCHEMA)


class JobSpecTest(absltest.TestCase):

  def test_unknown_command(self):
    with self.assertRaises(exceptions.SchemaError):
      cli.JobSpec(command="explode")

  def test_negative_caps(self):
    with self.assertRaises(exceptions.SchemaError):
      cli.JobSpec(command="count", beta_order=-1)
    with self.assertRaises(exceptions.SchemaError):
      cli.JobSpec(command="count", tree_bound=0)

  def test_only_x_zero(self):
    with self.assertRaises(exceptions.SchemaError):
      cli.JobSpec(command="correlate", set_x="1")

  def test_caps_exclude_plumbing(self):
    caps = cli.JobSpec(command="count", pretty=True).caps()
    self.assertNotIn("pretty", caps)
    self.assertIn("beta_order", caps)

  def test_normalize_argv(self):
    self.assertEqual(
        cli.normalize_argv(
            ["polycorr", "ward", "--t-order=2", "--n", "-1", "--set-x", "0"]
        ),
        ["polycorr", "ward", "--t_order=2", "--n", "-1", "--set_x", "0"],
    )


if __name__ == "__main__":
  absltest.main()
