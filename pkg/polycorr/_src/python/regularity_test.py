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
"""Tests for regularity.py."""
from absl.testing import absltest
from absl.testing import flagsaver
from polycorr._src.core import lattice
from polycorr._src.python import regularity
from polycorr._src.python import triangulations

UNIT_TRIANGLE = lattice.LatticePolygon(((0, 0), (0, 1), (1, 0)))
UNIT_SQUARE = lattice.LatticePolygon(((0, 0), (0, 1), (1, 1), (1, 0)))
SQUARE_2 = lattice.LatticePolygon(((0, 0), (0, 2), (2, 2), (2, 0)))


def _cell(*points):
  if lattice.orient2(*points[:3]) < 0:
    points = tuple(reversed(points))
  return lattice.rotate_to_min(points)


class RegularityTest(absltest.TestCase):

  def test_unit_triangle(self):
    (t,) = triangulations.enumerate_triangulations(UNIT_TRIANGLE)
    heights = regularity.regularity_witness(t, UNIT_TRIANGLE)
    self.assertIsNotNone(heights)
    self.assertSameElements(heights, UNIT_TRIANGLE.boundary)

  def test_unit_square_diagonals(self):
    for t in triangulations.enumerate_triangulations(UNIT_SQUARE):
      h = regularity.regularity_witness(t, UNIT_SQUARE)
      self.assertIsNotNone(h)
      main = h[(0, 0)] + h[(1, 1)]
      anti = h[(1, 0)] + h[(0, 1)]
      if frozenset({(0, 0), (1, 1)}) in t.as_subdivision().undirected_edges():
        self.assertLess(main, anti)
      else:
        self.assertGreater(main, anti)

  def test_one_cell_is_coplanar(self):
    (s,) = triangulations.enumerate_subdivisions(UNIT_SQUARE, max_cells=1)
    h = regularity.regularity_witness(s, UNIT_SQUARE)
    self.assertIsNotNone(h)
    self.assertEqual(h[(0, 0)] + h[(1, 1)], h[(1, 0)] + h[(0, 1)])

  def test_unused_interior_point_is_lifted(self):
    (s,) = triangulations.enumerate_subdivisions(SQUARE_2, max_cells=1)
    h = regularity.regularity_witness(s, SQUARE_2)
    self.assertIsNotNone(h)
    self.assertGreater(4 * h[(1, 1)], sum(h[p] for p in SQUARE_2.boundary))

  def test_twisted_triangulation_is_not_regular(self):
    polygon = lattice.LatticePolygon(((0, 0), (0, 6), (6, 0)))
    a, b, c = (0, 0), (6, 0), (0, 6)
    a2, b2, c2 = (1, 1), (4, 1), (1, 4)
    twisted = triangulations.Triangulation(frozenset({
        _cell(a, b, a2),
        _cell(b, b2, a2),
        _cell(b, c, b2),
        _cell(c, c2, b2),
        _cell(c, a, c2),
        _cell(a, a2, c2),
        _cell(a2, b2, c2),
    }))
    self.assertFalse(regularity.is_regular(twisted, polygon))

  def test_height_pool(self):
    polygon = lattice.LatticePolygon(((0, 0), (0, 1), (2, 0)))
    self.assertNotIn((1, 0), regularity.height_pool(polygon))
    (t,) = triangulations.enumerate_triangulations(polygon)
    with flagsaver.flagsaver(polycorr_secondary_full_pool=True):
      self.assertIn((1, 0), regularity.height_pool(polygon))
      h = regularity.regularity_witness(t, polygon)
    self.assertIsNotNone(h)
    self.assertGreater(2 * h[(1, 0)], h[(0, 0)] + h[(2, 0)])


class SecondaryPolytopeTest(absltest.TestCase):

  def test_unit_triangle(self):
    self.assertLen(regularity.secondary_polytope_vertices(UNIT_TRIANGLE), 1)

  def test_unit_square(self):
    self.assertLen(regularity.secondary_polytope_vertices(UNIT_SQUARE), 2)

  @flagsaver.flagsaver(polycorr_num_threads=2)
  def test_square_2(self):
    secondary = regularity.secondary_polytope(SQUARE_2)
    self.assertEqual(secondary.num_triangulations, 3)
    self.assertEqual(secondary.num_regular, 3)
    self.assertEqual(secondary.collisions, 0)
    self.assertIn(
        triangulations.CharFunction.from_dict(
            {(1, 1): 8, (0, 0): 4, (0, 2): 4, (2, 2): 4, (2, 0): 4}
        ),
        secondary.vertices,
    )


if __name__ == "__main__":
  absltest.main()
