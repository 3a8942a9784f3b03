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
"""Tests for genfun.py."""
from absl.testing import absltest
from absl.testing import parameterized
from polycorr._src.core import genpoly
from polycorr._src.core import lattice
from polycorr._src.python import genfun

GenPoly = genpoly.GenPoly

UNIT_TRIANGLE = lattice.LatticePolygon(((0, 0), (0, 1), (1, 0)))
UNIT_SQUARE = lattice.LatticePolygon(((0, 0), (0, 1), (1, 1), (1, 0)))
SQUARE_2 = lattice.LatticePolygon(((0, 0), (0, 2), (2, 2), (2, 0)))
SQUARE_2_FULL = lattice.LatticePolygon(
    ((0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0), (1, 0))
)
THIN_TRIANGLE = lattice.LatticePolygon(((0, 0), (0, 1), (2, 0)))
TRIANGLE_3 = lattice.LatticePolygon(((0, 0), (0, 3), (3, 0)))
L_HEXAGON = lattice.LatticePolygon(
    ((0, 0), (0, 2), (1, 2), (1, 1), (2, 1), (2, 0))
)

_UNIT_TRIANGLE_X = {(0, 0): 1, (0, 1): 1, (1, 0): 1}


class CorrelatorDirectTest(parameterized.TestCase):

  def test_unit_triangle(self):
    self.assertEqual(
        genfun.correlator_direct(UNIT_TRIANGLE),
        GenPoly.monomial(beta=1, x=_UNIT_TRIANGLE_X),
    )

  def test_unit_square(self):
    expected = GenPoly.monomial(
        beta=2, x={(0, 0): 2, (1, 0): 1, (1, 1): 2, (0, 1): 1}
    ) + GenPoly.monomial(beta=2, x={(0, 0): 1, (1, 0): 2, (1, 1): 1, (0, 1): 2})
    self.assertEqual(genfun.correlator_direct(UNIT_SQUARE), expected)

  def test_unit_square_without_deformation(self):
    self.assertEqual(
        genfun.without_deformation(genfun.correlator_direct(UNIT_SQUARE)),
        GenPoly.monomial(2, beta=2),
    )

  @parameterized.named_parameters(
      dict(testcase_name="unit_square", polygon=UNIT_SQUARE, degree=2),
      dict(testcase_name="thin_triangle", polygon=THIN_TRIANGLE, degree=1),
      dict(testcase_name="square_2_full", polygon=SQUARE_2_FULL, degree=8),
      dict(testcase_name="square_2", polygon=SQUARE_2, degree=4),
      dict(testcase_name="triangle_3", polygon=TRIANGLE_3, degree=3),
      dict(testcase_name="l_hexagon", polygon=L_HEXAGON, degree=4),
  )
  def test_beta_degree(self, polygon, degree):
    correlator = genfun.correlator_direct(polygon)
    self.assertEqual(correlator.beta_degree(), degree)
    self.assertEqual(
        degree, 2 * len(lattice.interior_points(polygon)) + polygon.n - 2
    )

  def test_triangulation_counts(self):
    self.assertEqual(genfun.triangulation_counts(SQUARE_2), {2: 2, 4: 1})
    self.assertEqual(genfun.triangulation_counts(UNIT_SQUARE), {2: 2})

  def test_x_degree_per_term(self):
    correlator = genfun.correlator_direct(SQUARE_2_FULL)
    for e, c in correlator.items():
      self.assertEqual(c, 1)
      self.assertEqual(sum(p for _, p in e.x), 3 * SQUARE_2_FULL.twice_area())


class SubdivisionGenfunTest(parameterized.TestCase):

  def test_unit_triangle(self):
    self.assertEqual(
        genfun.subdivision_genfun(UNIT_TRIANGLE),
        GenPoly.monomial(mu=-3, t={1: 1}, x=_UNIT_TRIANGLE_X),
    )

  def test_unit_square(self):
    result = genfun.without_deformation(genfun.subdivision_genfun(UNIT_SQUARE))
    self.assertEqual(
        result,
        GenPoly.monomial(mu=-4, t={2: 1})
        + GenPoly.monomial(2, mu=-5, t={1: 2}),
    )

  def test_square_cell_weight_is_fan(self):
    self.assertEqual(
        genfun.cell_weight(((0, 0), (0, 1), (1, 1), (1, 0))),
        GenPoly.monomial(x={(0, 0): 2, (0, 1): 1, (1, 1): 2, (1, 0): 1}),
    )

  def test_l_hexagon_has_no_single_cell(self):
    result = genfun.subdivision_genfun(L_HEXAGON)
    self.assertNotEmpty(result)
    for e, _ in result.items():
      self.assertGreater(e.t_degree(), 1)

  def test_max_cells_truncates(self):
    full = genfun.subdivision_genfun(SQUARE_2)
    self.assertEqual(
        genfun.subdivision_genfun(SQUARE_2, max_cells=2), full.truncate_t(2)
    )

  @parameterized.named_parameters(
      dict(testcase_name="unit_triangle", polygon=UNIT_TRIANGLE),
      dict(testcase_name="unit_square", polygon=UNIT_SQUARE),
      dict(testcase_name="square_2", polygon=SQUARE_2),
      dict(testcase_name="l_hexagon", polygon=L_HEXAGON),
  )
  def test_triangulation_part_matches_direct(self, polygon):
    self.assertEqual(
        genfun.triangulation_part(genfun.subdivision_genfun(polygon)),
        genfun.correlator_direct(polygon),
    )

  def test_edge_count_of_triangulations(self):
    for polygon in (UNIT_SQUARE, SQUARE_2, L_HEXAGON):
      for e, _ in genfun.subdivision_genfun(polygon).items():
        if {k for k, _ in e.t} == {1}:
          k = e.t_exponent(1)
          self.assertEqual(-2 * e.mu, 3 * k + polygon.n)


if __name__ == "__main__":
  absltest.main()
