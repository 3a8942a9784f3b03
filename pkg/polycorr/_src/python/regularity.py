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
"""Regularity of subdivisions and vertices of the secondary polytope.

A subdivision is regular when some height function on the lattice points of
the polygon has a lower convex hull that projects onto it. The search for
heights is an exact rational feasibility problem solved by
`simplex_lp.find_nonnegative_solution`. Strict inequalities are scaled to
`>= 1`, which loses nothing because the feasible cone is invariant under
positive scaling.
"""

from __future__ import annotations

import dataclasses
import fractions
from typing import Optional, Union

from absl import logging
from polycorr._src.core import config as polycorr_config
from polycorr._src.core import exceptions
from polycorr._src.core import lattice
from polycorr._src.core import monitoring as polycorr_monitoring
from polycorr._src.core import parallel
from polycorr._src.core import simplex_lp
from polycorr._src.python import triangulations

from polycorr._src.core import monitoring

LatticePoint = lattice.LatticePoint
Tiling = Union[triangulations.Triangulation, triangulations.Subdivision]
_Row = dict[LatticePoint, int]

_api_usage_counter = monitoring.Counter(
    "/polycorr/python/regularity/api",
    metadata=monitoring.Metadata(
        description="Regularity and secondary polytope counter."
    ),
    root=polycorr_monitoring.get_monitoring_root(),
    fields=[("name", str)],
)


def height_pool(polygon: lattice.LatticePolygon) -> frozenset[LatticePoint]:
  """Points that carry a height variable.

  By default these are the listed boundary points and the interior lattice
  points. With `--polycorr_secondary_full_pool` unlisted boundary lattice
  points join the pool and must then be lifted above the hull as well.

  Args:
    polygon: The polygon.

  Returns:
    The pool of height variables.
  """
  if polycorr_config.config.secondary_full_pool:
    return lattice.lattice_points(polygon)
  return frozenset(polygon.boundary) | lattice.interior_points(polygon)


def _cells(tiling: Tiling) -> frozenset[triangulations.Cell]:
  if isinstance(tiling, triangulations.Triangulation):
    return tiling.triangles
  return tiling.cells


def _above(
    a: LatticePoint, b: LatticePoint, c: LatticePoint, q: LatticePoint
) -> _Row:
  """Row r with r.h > 0 iff h(q) lies above the plane through a, b and c."""
  d = lattice.orient2(a, b, c)
  sign = 1 if d > 0 else -1
  row: _Row = {}
  for point, coeff in (
      (q, d),
      (a, -lattice.orient2(q, b, c)),
      (b, -lattice.orient2(a, q, c)),
      (c, -lattice.orient2(a, b, q)),
  ):
    row[point] = row.get(point, 0) + sign * coeff
  return {p: v for p, v in row.items() if v}


def _constraints(
    tiling: Tiling, pool: frozenset[LatticePoint]
) -> tuple[list[_Row], list[_Row]]:
  """Strict rows (r.h > 0) and equality rows (r.h = 0) for a tiling."""
  cells = sorted(_cells(tiling))
  owner = {}
  for cell in cells:
    for edge in triangulations.cell_edges(cell):
      owner[edge] = cell
  strict: list[_Row] = []
  equal: list[_Row] = []
  for cell in cells:
    a, b, c = cell[:3]
    for q in cell[3:]:
      equal.append(_above(a, b, c, q))
  for (a, b), cell in sorted(owner.items()):
    neighbour = owner.get((b, a))
    if neighbour is None or (b, a) < (a, b):
      continue
    c = next(p for p in cell if p not in (a, b))
    q = next(p for p in neighbour if p not in (a, b))
    strict.append(_above(a, b, c, q))
  used = {p for cell in cells for p in cell}
  if not used <= pool:
    raise ValueError(
        f"Invalid tiling. Vertices {sorted(used - pool)} are not in the"
        " height pool of the polygon."
    )
  for q in sorted(pool - used):
    cell = next((c for c in cells if lattice.locate_point(q, c) >= 0), None)
    if cell is None:
      raise exceptions.PolycorrInternalError(
          f"Point {q} is not covered by any cell of {cells}."
      )
    strict.append(_above(*cell[:3], q))
  return strict, equal


def regularity_witness(
    tiling: Tiling, polygon: lattice.LatticePolygon
) -> Optional[dict[LatticePoint, fractions.Fraction]]:
  """Heights whose lower hull induces `tiling`, or None if it is not regular.

  Args:
    tiling: A triangulation or subdivision of `polygon`.
    polygon: The polygon.

  Returns:
    A map from every pool point to its rational height, or None.
  """
  _api_usage_counter.Increment("regularity_witness")
  pool = sorted(height_pool(polygon))
  strict, equal = _constraints(tiling, frozenset(pool))
  column = {p: i for i, p in enumerate(pool)}
  n = len(pool)
  width = 2 * n + len(strict)
  a_eq, b_eq = [], []
  for k, row in enumerate(strict + equal):
    line = [0] * width
    for p, v in row.items():
      line[column[p]] = v
      line[n + column[p]] = -v
    if k < len(strict):
      line[2 * n + k] = -1
      b_eq.append(1)
    else:
      b_eq.append(0)
    a_eq.append(line)
  solution = simplex_lp.find_nonnegative_solution(a_eq, b_eq)
  if solution is None:
    logging.vlog(1, "No height function for %s", sorted(_cells(tiling)))
    return None
  heights = {p: solution[column[p]] - solution[n + column[p]] for p in pool}
  if polycorr_config.config.debug_mode:
    for row in strict:
      if sum(v * heights[p] for p, v in row.items()) <= 0:
        raise exceptions.PolycorrInternalError(f"Witness violates {row}.")
  return heights


def is_regular(tiling: Tiling, polygon: lattice.LatticePolygon) -> bool:
  return regularity_witness(tiling, polygon) is not None


@dataclasses.dataclass(frozen=True)
class SecondaryPolytope:
  """Vertex data of the secondary polytope of a polygon.

  Attributes:
    vertices: Characteristic functions of the regular triangulations.
    num_triangulations: Number of triangulations enumerated.
    num_regular: Number of those that are regular.
    collisions: Regular triangulations whose characteristic function
      duplicates that of another regular triangulation.
  """

  vertices: frozenset[triangulations.CharFunction]
  num_triangulations: int
  num_regular: int
  collisions: int


def secondary_polytope(polygon: lattice.LatticePolygon) -> SecondaryPolytope:
  """Enumerates triangulations and keeps the regular ones as vertices."""
  _api_usage_counter.Increment("secondary_polytope")
  found = triangulations.enumerate_triangulations(polygon)
  regular = parallel.run_in_parallel(
      is_regular, [dict(tiling=t, polygon=polygon) for t in found]
  )
  phis = [
      triangulations.char_function(t) for t, ok in zip(found, regular) if ok
  ]
  vertices = frozenset(phis)
  collisions = len(phis) - len(vertices)
  if collisions:
    logging.warning(
        "%d regular triangulations of %s share a characteristic function.",
        collisions,
        polygon.boundary,
    )
  return SecondaryPolytope(
      vertices=vertices,
      num_triangulations=len(found),
      num_regular=len(phis),
      collisions=collisions,
  )


def secondary_polytope_vertices(
    polygon: lattice.LatticePolygon,
) -> frozenset[triangulations.CharFunction]:
  return secondary_polytope(polygon).vertices
