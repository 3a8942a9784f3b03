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
"""Tests for lattice.py."""

from absl.testing import absltest
from absl.testing import parameterized
from polycorr._src.core import exceptions
from polycorr._src.core import lattice

UNIT_SQUARE = ((0, 0), (0, 1), (1, 1), (1, 0))
SQUARE_2 = ((0, 0), (0, 2), (2, 2), (2, 0))
L_HEXAGON = ((0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2))


class OrientationTest(parameterized.TestCase):

  @parameterized.named_parameters(
      dict(testcase_name="admissible", points=((1, 0), (0, 0), (0, 1)), want=1),
      dict(testcase_name="collinear", points=((0, 0), (1, 0), (2, 0)), want=0),
      dict(testcase_name="swapped", points=((0, 1), (0, 0), (1, 0)), want=-1),
  )
  def test_orient2(self, points, want):
    self.assertEqual(lattice.orient2(*points), want)

  def test_orient2_antisymmetry_and_translation(self):
    i, j, k = (3, -1), (0, 4), (2, 2)
    self.assertEqual(lattice.orient2(i, j, k), -lattice.orient2(k, j, i))
    shift = lambda p: (p[0] + 7, p[1] - 5)
    self.assertEqual(
        lattice.orient2(i, j, k), lattice.orient2(shift(i), shift(j), shift(k))
    )

  def test_orient2_dimension_mismatch(self):
    with self.assertRaises(ValueError):
      lattice.orient2((0, 0, 0), (1, 0), (0, 1))

  def test_orient_d(self):
    tet = ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))
    self.assertEqual(lattice.orient_d(*tet), 1)
    self.assertEqual(lattice.orient_d(tet[0], tet[2], tet[1], tet[3]), -1)
    self.assertEqual(
        lattice.orient_d((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)), 0
    )

  def test_orient_d_scales_with_determinant(self):
    tet = ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))
    shear = ((1, 2, 0), (0, 1, 0), (0, 0, -1))
    image = lattice.unimodular_transform(tet, shear)
    self.assertEqual(lattice.orient_d(*image), -lattice.orient_d(*tet))

  def test_orient_d_four_dimensions(self):
    simplex = [(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0),
               (0, 0, 0, 2)]
    self.assertEqual(lattice.orient_d(*simplex), 2)

  def test_orient_d_is_exact_beyond_float_precision(self):
    a, b, c, e = 10**6 + 1, 10**6 + 3, 10**6 + 7, 10**6 + 9
    simplex = [(0, 0, 0, 0), (a, 1, 0, 0), (0, b, 1, 0), (0, 0, c, 1),
               (0, 0, 0, e)]
    volume = lattice.orient_d(*simplex)
    self.assertIsInstance(volume, int)
    self.assertEqual(volume, a * b * c * e)


class PolygonTest(parameterized.TestCase):

  @parameterized.named_parameters(
      dict(testcase_name="unit_square", boundary=UNIT_SQUARE, l=4, l_star=0),
      dict(testcase_name="square_2", boundary=SQUARE_2, l=9, l_star=1),
      dict(
          testcase_name="triangle_2",
          boundary=((0, 0), (0, 2), (2, 0)),
          l=6,
          l_star=0,
      ),
      dict(
          testcase_name="triangle_3",
          boundary=((0, 0), (0, 3), (3, 0)),
          l=10,
          l_star=1,
      ),
  )
  def test_point_counts(self, boundary, l, l_star):
    polygon = lattice.LatticePolygon(boundary)
    self.assertLen(lattice.lattice_points(polygon), l)
    self.assertLen(lattice.interior_points(polygon), l_star)
    self.assertTrue(lattice.pick_holds(polygon))
    self.assertEqual(
        lattice.lattice_points(polygon),
        lattice.interior_points(polygon) | lattice.boundary_points(polygon),
    )

  def test_rejects_counterclockwise(self):
    with self.assertRaisesRegex(exceptions.SchemaError, "clockwise"):
      lattice.LatticePolygon(tuple(reversed(UNIT_SQUARE)))

  def test_rejects_self_intersection(self):
    with self.assertRaisesRegex(exceptions.SchemaError, "simple"):
      lattice.LatticePolygon(((0, 0), (1, 1), (0, 1), (1, 0)))

  def test_collinear_corners(self):
    boundary = ((0, 0), (0, 1), (0, 2), (2, 0))
    self.assertEqual(lattice.LatticePolygon(boundary).n, 4)
    with self.assertRaisesRegex(exceptions.SchemaError, "collinear"):
      lattice.LatticePolygon(boundary, strict_collinear=True)

  def test_nonconvex_polygon_points(self):
    polygon = lattice.LatticePolygon(tuple(reversed(L_HEXAGON)))
    self.assertLen(lattice.lattice_points(polygon), 8)
    self.assertEqual(polygon.locate((2, 2)), -1)
    self.assertEqual(polygon.locate((1, 1)), 0)

  def test_is_convex_cell(self):
    self.assertTrue(lattice.is_convex_cell(UNIT_SQUARE))
    self.assertFalse(lattice.is_convex_cell(L_HEXAGON))
    self.assertTrue(
        lattice.is_convex_cell(((0, 0), (1, 0), (2, 0), (0, 2)))
    )
    self.assertFalse(
        lattice.is_strictly_convex_cell(((0, 0), (0, 2), (2, 0), (1, 0)))
    )

  def test_canonical_key(self):
    square = lattice.LatticePolygon(UNIT_SQUARE)
    moved = lattice.LatticePolygon(
        tuple((x + 5, y - 3) for x, y in UNIT_SQUARE)
    )
    rotated = lattice.LatticePolygon(UNIT_SQUARE[2:] + UNIT_SQUARE[:2])
    triangle = lattice.LatticePolygon(((0, 0), (0, 1), (1, 0)))
    self.assertEqual(
        lattice.canonical_key(square), lattice.canonical_key(moved)
    )
    self.assertEqual(
        lattice.canonical_key(square), lattice.canonical_key(rotated)
    )
    self.assertNotEqual(
        lattice.canonical_key(square), lattice.canonical_key(triangle)
    )

  def test_json(self):
    polygon = lattice.polytope_from_json(
        {"dim": 2, "boundary": [[0, 0], [0, 1], [1, 1], [1, 0]]}
    )
    self.assertEqual(polygon.boundary, UNIT_SQUARE)
    self.assertEqual(lattice.polytope_from_json(polygon.to_json()), polygon)
    with self.assertRaises(exceptions.SchemaError):
      lattice.polytope_from_json({"boundary": []})
    with self.assertRaises(exceptions.SchemaError):
      lattice.polytope_from_json(
          {"dim": 2, "boundary": [[0, 0.5], [0, 1], [1, 0]]}
      )


class SimplicialPolytopeTest(absltest.TestCase):

  def test_tetrahedron(self):
    tet = lattice.SimplicialPolytope.from_vertices(
        [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    )
    self.assertLen(tet.facets, 4)
    self.assertEqual(tet.normalized_volume(), 1)
    self.assertLen(lattice.lattice_points(tet), 4)
    self.assertEmpty(lattice.interior_points(tet))
    for facet in tet.facets:
      for v in tet.vertices:
        self.assertGreaterEqual(lattice.orient_d(v, *facet), 0)

  def test_octahedron(self):
    points = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1),
              (0, 0, -1)]
    octahedron = lattice.SimplicialPolytope.from_vertices(points)
    self.assertLen(octahedron.facets, 8)
    self.assertEqual(octahedron.normalized_volume(), 8)
    self.assertEqual(lattice.interior_points(octahedron), {(0, 0, 0)})

  def test_non_simplicial_rejected(self):
    cube = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    with self.assertRaisesRegex(exceptions.SchemaError, "non-simplicial"):
      lattice.SimplicialPolytope.from_vertices(cube)

  def test_json_roundtrip_reorients(self):
    obj = {
        "dim": 3,
        "vertices": [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
        "facets": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]],
    }
    tet = lattice.polytope_from_json(obj)
    self.assertEqual(lattice.polytope_from_json(tet.to_json()), tet)

  def test_translation_key(self):
    tet = lattice.SimplicialPolytope.from_vertices(
        [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    )
    moved = lattice.SimplicialPolytope.from_vertices(
        [(2, 0, 0), (3, 0, 0), (2, 1, 0), (2, 0, 1)]
    )
    self.assertEqual(lattice.canonical_key(tet), lattice.canonical_key(moved))


class IndexBoxTest(absltest.TestCase):

  def test_points(self):
    box = lattice.IndexBox(d=2, N=1)
    self.assertLen(list(box.points()), 9)
    self.assertIn((1, -1), box)
    self.assertNotIn((2, 0), box)
    with self.assertRaises(ValueError):
      lattice.IndexBox(d=2, N=0)


if __name__ == "__main__":
  absltest.main()
