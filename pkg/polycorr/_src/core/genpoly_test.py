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
"""Tests for genpoly.py."""
import fractions

from absl.testing import absltest
from absl.testing import parameterized
from polycorr._src.core import exceptions
from polycorr._src.core import genpoly
import numpy as np

GenPoly = genpoly.GenPoly


def _random_poly(rng: np.random.Generator) -> GenPoly:
  poly = GenPoly.zero()
  for _ in range(rng.integers(1, 5)):
    poly = poly + GenPoly.monomial(
        int(rng.integers(-3, 4)),
        beta=int(rng.integers(0, 3)),
        mu=int(rng.integers(-3, 1)),
        t={int(rng.integers(1, 3)): int(rng.integers(0, 2))},
        x={(int(rng.integers(0, 2)), 0): int(rng.integers(0, 3))},
    )
  return poly


class GenPolyTest(parameterized.TestCase):

  def test_zero_coefficients_dropped(self):
    a = GenPoly.monomial(2, beta=1)
    self.assertTrue((a - a).is_zero())
    self.assertEqual(a - a, GenPoly.zero())
    self.assertEmpty(GenPoly.monomial(0, beta=3).terms)

  def test_ring_axioms(self):
    rng = np.random.Generator(np.random.Philox(7))
    for _ in range(20):
      a, b, c = (_random_poly(rng) for _ in range(3))
      self.assertEqual((a * b) * c, a * (b * c))
      self.assertEqual(a * (b + c), a * b + a * c)
      self.assertEqual(a + b, b + a)
      self.assertEqual(a * GenPoly.one(), a)

  def test_laurent_mu(self):
    inv = GenPoly.monomial(mu=-1)
    self.assertEqual(inv * GenPoly.monomial(mu=1), GenPoly.one())

  def test_beta_degree(self):
    poly = GenPoly.monomial(beta=2) + GenPoly.monomial(5, beta=1)
    self.assertEqual(poly.beta_degree(), 2)
    with self.assertRaises(ValueError):
      GenPoly.zero().beta_degree()

  def test_coefficient_and_truncation(self):
    poly = GenPoly.monomial(3, beta=2, t={1: 2}) + GenPoly.monomial(
        beta=1, t={2: 1}
    )
    self.assertEqual(poly.coefficient(beta=2), GenPoly.monomial(3, t={1: 2}))
    self.assertEqual(poly.truncate_t(1), GenPoly.monomial(beta=1, t={2: 1}))
    self.assertEqual(
        poly.derivative_t(1), GenPoly.monomial(6, beta=2, t={1: 1})
    )

  def test_substitute(self):
    poly = GenPoly.monomial(beta=2, mu=-2, x={(0, 0): 2}) + GenPoly.monomial(
        beta=2, mu=-2
    )
    self.assertEqual(poly.substitute(x=0), GenPoly.monomial(beta=2, mu=-2))
    self.assertEqual(
        poly.substitute(mu=2, x=1),
        GenPoly.monomial(fractions.Fraction(1, 2), beta=2),
    )

  def test_fraction_coefficients_normalize(self):
    third = GenPoly.constant(fractions.Fraction(1, 3))
    self.assertEqual(third * 3, GenPoly.one())
    self.assertIsInstance(next(iter((third * 3).terms.values())), int)

  def test_json(self):
    poly = GenPoly.monomial(
        2, beta=2, t={1: 2, "tree": 1}, x={(0, 1): 1}
    ) + GenPoly.monomial(fractions.Fraction(1, 81), mu=-4)
    self.assertEqual(GenPoly.from_json(poly.to_json()), poly)
    first = poly.to_json()[0]
    self.assertEqual(first["coeff"], "1/81")
    self.assertEqual(poly.to_json()[1]["x"], {"0,1": 1})
    with self.assertRaises(exceptions.SchemaError):
      GenPoly.from_json([{"beta": 1}])

  def test_dumps_is_canonical(self):
    a = GenPoly.monomial(beta=1) + GenPoly.monomial(beta=2, x={(1, 1): 2})
    b = GenPoly.monomial(beta=2, x={(1, 1): 2}) + GenPoly.monomial(beta=1)
    self.assertEqual(genpoly.dumps(a), genpoly.dumps(b))

  def test_str(self):
    poly = GenPoly.monomial(2, beta=2) - GenPoly.monomial(mu=-1, t={1: 1})
    self.assertEqual(str(poly), "-mu^-1*t[1] + 2*beta^2")


if __name__ == "__main__":
  absltest.main()
