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
"""Tests for ward.py."""
from absl.testing import absltest
from absl.testing import flagsaver
from absl.testing import parameterized
from polycorr._src.core import exceptions
from polycorr._src.core import genpoly
from polycorr._src.core import lattice
from polycorr._src.python import diffops
from polycorr._src.python import genfun
from polycorr._src.python import ward

DiffOp = diffops.DiffOp
GenPoly = genpoly.GenPoly

UNIT_TRIANGLE = lattice.LatticePolygon(((0, 0), (0, 1), (1, 0)))
UNIT_SQUARE = lattice.LatticePolygon(((0, 0), (0, 1), (1, 1), (1, 0)))


class HmmVirasoroTest(parameterized.TestCase):

  def test_invalid_mode(self):
    with self.assertRaises(ValueError):
      ward.hmm_virasoro(-2, 10)

  def test_window_too_small(self):
    with self.assertRaises(exceptions.WindowTooSmallError):
      ward.hmm_virasoro(3, 4)

  def test_l_minus_one_on_constant(self):
    self.assertEqual(
        ward.hmm_virasoro(-1, 4).apply(GenPoly.one(), n=3),
        GenPoly.monomial(3, t={1: 1}),
    )

  def test_l_zero_on_t1(self):
    # The Euler term gives t_1 and the N^2 term gives N^2 t_1.
    self.assertEqual(
        ward.hmm_virasoro(0, 4).apply(GenPoly.monomial(t={1: 1}), n=2),
        GenPoly.monomial(5, t={1: 1}),
    )

  def test_mu_term(self):
    self.assertEqual(
        ward.hmm_virasoro(1, 4).apply(GenPoly.monomial(t={3: 1}), n=1),
        GenPoly.monomial(-1, mu=1) + GenPoly.monomial(2, t={2: 1}),
    )

  @parameterized.parameters(
      (n, m) for n in range(-1, 3) for m in range(-1, 3)
  )
  def test_commutation_relations(self, n, m):
    self.assertTrue(ward.check_virasoro(n, m, window=8, degree=2))

  def test_check_rejects_small_window(self):
    with self.assertRaises(exceptions.WindowTooSmallError):
      ward.check_virasoro(1, 2, window=4, degree=2)

  def test_zero_one_on_large_window(self):
    self.assertTrue(ward.check_virasoro(0, 1, window=12, degree=6))

  def test_all_low_modes(self):
    modes = range(-1, 5)
    results = ward.check_virasoro_grid(modes, window=12, degree=3)
    self.assertLen(results, 36)
    self.assertTrue(all(results.values()))

  def test_min_window(self):
    self.assertEqual(ward.min_virasoro_window(4, 4, 6), 10)
    self.assertEqual(ward.min_virasoro_window(-1, 0, 6), 8)

  def test_self_commutator_is_zero(self):
    self.assertFalse(ward.virasoro_defect(2, 2, 10))

  @flagsaver.flagsaver(polycorr_num_threads=2)
  def test_grid(self):
    results = ward.check_virasoro_grid([-1, 0, 1], window=10, degree=2)
    self.assertLen(results, 9)
    self.assertTrue(all(results.values()))


class CorrelatorSumTest(absltest.TestCase):

  def test_rotations_merge(self):
    total = ward.CorrelatorSum()
    total.add(((0, 1), (1, 0), (0, 0)), GenPoly.one())
    total.add(((0, 0), (0, 1), (1, 0)), GenPoly.one())
    self.assertLen(total, 1)
    self.assertEqual(
        total.weight(((1, 0), (0, 0), (0, 1))), GenPoly.constant(2)
    )

  def test_cancellation(self):
    total = ward.CorrelatorSum()
    total.add(((0, 0), (0, 1), (1, 0)), GenPoly.one())
    total.add(((1, 0), (0, 0), (0, 1)), -GenPoly.one())
    self.assertEmpty(total)
    self.assertNotIn(((0, 0), (0, 1), (1, 0)), total)


class InsertIhatTest(absltest.TestCase):

  def test_unit_triangle(self):
    points = lattice.lattice_points(UNIT_TRIANGLE)
    inserted = ward.insert_ihat(UNIT_TRIANGLE.boundary, 1, points)
    self.assertLen(inserted, 3)
    self.assertIn(((0, 0), (1, 0), (0, 1), (1, 0)), inserted)
    for sequence, weight in inserted.items():
      self.assertLen(sequence, 4)
      self.assertEqual(weight, GenPoly.one())

  def test_deformed_weights(self):
    points = lattice.lattice_points(UNIT_TRIANGLE)
    inserted = ward.insert_ihat(
        UNIT_TRIANGLE.boundary, 1, points, deformation=True
    )
    for _, weight in inserted.items():
      self.assertEqual(weight.beta_degree(), 0)
      self.assertEqual(genfun.without_deformation(weight), GenPoly.one())
      self.assertNotEqual(weight, GenPoly.one())

  def test_no_cells_of_that_size(self):
    points = lattice.lattice_points(UNIT_TRIANGLE)
    self.assertEmpty(ward.insert_ihat(UNIT_TRIANGLE.boundary, 2, points))

  def test_unit_square(self):
    points = lattice.lattice_points(UNIT_SQUARE)
    inserted = ward.insert_ihat(UNIT_SQUARE.boundary, 1, points)
    self.assertLen(inserted, 8)
    self.assertTrue(all(len(s) == 5 for s, _ in inserted.items()))

  def test_invalid_order(self):
    with self.assertRaises(ValueError):
      ward.insert_ihat(UNIT_TRIANGLE.boundary, 0, [])


class WardOperatorTest(absltest.TestCase):

  def test_terms(self):
    self.assertEqual(
        ward.ward_operator(1, [1, 2]),
        DiffOp.term(-3, d={1: 1}, mu=1)
        + DiffOp.term(4, t={1: 1}, d={2: 1})
        + DiffOp.term(5, t={2: 1}, d={3: 1}),
    )


class WardResidualTest(parameterized.TestCase):

  @parameterized.named_parameters(
      dict(testcase_name="triangle_n1", polygon=UNIT_TRIANGLE, n=1, order=2),
      dict(testcase_name="triangle_n2", polygon=UNIT_TRIANGLE, n=2, order=2),
      dict(testcase_name="square_n1", polygon=UNIT_SQUARE, n=1, order=2),
      dict(testcase_name="square_n2", polygon=UNIT_SQUARE, n=2, order=2),
  )
  def test_identity_holds(self, polygon, n, order):
    self.assertEqual(ward.ward_residual(polygon, n, order), GenPoly.zero())

  def test_square_lowest_order_terms_cancel(self):
    # -4 mu d_2 Z gives -4 mu^-3 and four reinserted squares give 4 mu^-3.
    points = lattice.lattice_points(UNIT_SQUARE)
    inserted = ward.insert_ihat(UNIT_SQUARE.boundary, 2, points)
    self.assertLen(inserted, 4)
    for sequence, _ in inserted.items():
      self.assertEqual(
          ward.sequence_correlator(sequence, points, 0),
          GenPoly.monomial(mu=-3),
      )

  def test_simple_sequence_uses_enumeration(self):
    points = lattice.lattice_points(UNIT_SQUARE)
    self.assertEqual(
        ward.sequence_correlator(UNIT_SQUARE.boundary, points, 2),
        genfun.without_deformation(
            genfun.subdivision_genfun(UNIT_SQUARE, max_cells=2)
        ),
    )

  def test_zero_order_unsupported(self):
    with self.assertRaises(ValueError):
      ward.ward_residual(UNIT_TRIANGLE, 0, 1)

  @flagsaver.flagsaver(polycorr_wick_max_order=2)
  def test_cap(self):
    with self.assertRaises(exceptions.CapExceededError):
      ward.ward_residual(UNIT_TRIANGLE, 1, 2)


if __name__ == "__main__":
  absltest.main()
