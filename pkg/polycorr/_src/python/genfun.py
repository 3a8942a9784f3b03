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
"""Correlators computed from the enumeration side.

`correlator_direct` sums over triangulations, `subdivision_genfun` over
subdivisions into strictly convex cells. Both return exact `GenPoly` values.

An x-monomial x_a^c stands for the deformation factor exp(c * L_a) with c in
normalized-volume units, so switching the deformation off (L = 0) sets every
x-variable to 1; see `without_deformation`.
"""

from __future__ import annotations

from typing import Optional

from absl import logging
from polycorr._src.core import exceptions
from polycorr._src.core import genpoly
from polycorr._src.core import lattice
from polycorr._src.core import monitoring as polycorr_monitoring
from polycorr._src.python import triangulations

from polycorr._src.core import monitoring

GenPoly = genpoly.GenPoly

_api_usage_counter = monitoring.Counter(
    "/polycorr/python/genfun/api",
    metadata=monitoring.Metadata(description="Direct correlator counter."),
    root=polycorr_monitoring.get_monitoring_root(),
    fields=[("name", str)],
)


def x_weight(phi: triangulations.CharFunction) -> GenPoly:
  """prod_a x_a^{phi(a)}."""
  return GenPoly.monomial(x=phi.as_dict())


def cell_weight(cell: triangulations.Cell) -> GenPoly:
  """x-weight of one cell, built from its fan from the least corner."""
  triangles = triangulations.fan_triangles(cell)
  return x_weight(
      triangulations.char_function(
          triangulations.Triangulation(frozenset(triangles))
      )
  )


def correlator_direct(polygon: lattice.LatticePolygon) -> GenPoly:
  """Sum over triangulations of beta^{|tau|} * prod_a x_a^{phi_tau(a)}.

  Args:
    polygon: The polygon.

  Returns:
    The correlator; every triangulation contributes one term of coefficient 1.
  """
  _api_usage_counter.Increment("correlator_direct")
  result = GenPoly.zero()
  for t in triangulations.enumerate_triangulations(polygon):
    phi = triangulations.char_function(t)
    term = GenPoly.monomial(beta=len(t.triangles)) * x_weight(phi)
    if phi.total() != 3 * polygon.twice_area():
      raise exceptions.PolycorrInternalError(
          f"x-degree {phi.total()} of {t.sorted_triangles()} is not three"
          " times the normalized area."
      )
    result += term
  return result


def triangulation_counts(polygon: lattice.LatticePolygon) -> dict[int, int]:
  """Number of triangulations by number of triangles."""
  poly = without_deformation(correlator_direct(polygon))
  return {
      k: int(c.terms.get(genpoly.Exponents(), 0))
      for k, c in poly.beta_coefficients().items()
  }


def edge_count(subdivision: triangulations.Subdivision) -> int:
  """Edges of the subdivision, boundary edges included."""
  return len(subdivision.undirected_edges())


def subdivision_term(subdivision: triangulations.Subdivision) -> GenPoly:
  """mu^{-E} * prod_cells t_{corners - 2} * W(cell) for one subdivision."""
  corners = subdivision.cells_by_corner_count()
  term = GenPoly.monomial(
      mu=-edge_count(subdivision),
      t={k - 2: v for k, v in corners.items()},
  )
  for cell in subdivision.sorted_cells():
    term *= cell_weight(cell)
  return term


def subdivision_genfun(
    polygon: lattice.LatticePolygon, max_cells: Optional[int] = None
) -> GenPoly:
  """Sum over subdivisions into strictly convex cells.

  Each subdivision contributes mu^{-E} times t_q for every cell with q + 2
  corners times the cell x-weights, with multiplicity 1.

  Args:
    polygon: The polygon.
    max_cells: If set, subdivisions with more cells are dropped, which
      truncates the result at t-degree `max_cells`.

  Returns:
    The generating function.
  """
  _api_usage_counter.Increment("subdivision_genfun")
  result = GenPoly.zero()
  subdivisions = triangulations.enumerate_subdivisions(polygon, max_cells)
  for s in subdivisions:
    result += subdivision_term(s)
  logging.vlog(
      1, "subdivision_genfun(%s): %d terms", polygon.boundary, len(result)
  )
  return result


def without_deformation(poly: GenPoly) -> GenPoly:
  """Sets the deformation parameters to zero, i.e. every x-variable to 1."""
  return poly.substitute(x=1)


def triangulation_part(poly: GenPoly) -> GenPoly:
  """Maps the t_1-only terms of a subdivision genfun to beta-polynomial form.

  A term t_1^k mu^{-E} x^c becomes beta^k x^c. Terms carrying other
  t-variables are dropped.

  Args:
    poly: A polynomial in mu, t and x.

  Returns:
    The beta-polynomial.
  """

  def _convert(e: genpoly.Exponents, c):
    if any(k != 1 for k, _ in e.t):
      return None
    return genpoly.Exponents(beta=e.t_exponent(1), x=e.x), c

  return poly.map_terms(_convert)
