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
"""Enumeration of lattice triangulations and convex subdivisions of polygons.

Both enumerators peel the polygon one cell at a time. The cell containing the
first boundary edge of the (canonically rotated) boundary is chosen in every
admissible way; removing it leaves simple sub-polygons, each with the subset
of interior lattice points still available as vertices. Sub-polygon results
are memoized on (boundary cycle, available points), so shared sub-polygons
are solved once.

Boundary edges are never subdivided, so boundary lattice points that are not
listed in the boundary sequence never become vertices.
"""

from __future__ import annotations

import collections
import dataclasses
import itertools
from typing import Iterable, Iterator, Optional, Sequence

from absl import logging
from polycorr._src.core import config as polycorr_config
from polycorr._src.core import exceptions
from polycorr._src.core import lattice
from polycorr._src.core import monitoring as polycorr_monitoring

from polycorr._src.core import monitoring

LatticePoint = lattice.LatticePoint
Cell = tuple[LatticePoint, ...]
_Tiling = frozenset[Cell]

_api_usage_counter = monitoring.Counter(
    "/polycorr/python/triangulations/api",
    metadata=monitoring.Metadata(
        description="Triangulation and subdivision enumeration counter."
    ),
    root=polycorr_monitoring.get_monitoring_root(),
    fields=[("name", str)],
)


def cell_volume(cell: Cell) -> int:
  """Normalized volume (twice the area) of a convex cell."""
  return -lattice.twice_signed_area(cell)


def fan_triangles(cell: Cell) -> list[Cell]:
  """Triangulates a convex cell by the fan from its least corner."""
  cell = lattice.rotate_to_min(cell)
  return [(cell[0], cell[i], cell[i + 1]) for i in range(1, len(cell) - 1)]


def cell_edges(cell: Cell) -> list[tuple[LatticePoint, LatticePoint]]:
  return lattice.edges_of(cell)


@dataclasses.dataclass(frozen=True)
class CharFunction:
  """Map from lattice points to normalized-volume sums; zero elsewhere.

  Attributes:
    values: Sorted (point, value) pairs with nonzero value.
  """

  values: tuple[tuple[LatticePoint, int], ...]

  @classmethod
  def from_dict(cls, values: dict[LatticePoint, int]) -> CharFunction:
    return cls(tuple(sorted((p, v) for p, v in values.items() if v)))

  def __getitem__(self, point: LatticePoint) -> int:
    return dict(self.values).get(point, 0)

  def as_dict(self) -> dict[LatticePoint, int]:
    return dict(self.values)

  def total(self) -> int:
    return sum(v for _, v in self.values)


@dataclasses.dataclass(frozen=True)
class Subdivision:
  """A tiling of a polygon by strictly convex lattice cells.

  Attributes:
    cells: The cells, each listed with orient2 > 0 at every corner and rotated
      to start at its least corner.
  """

  cells: frozenset[Cell]

  def sorted_cells(self) -> list[Cell]:
    return sorted(self.cells)

  @property
  def used_vertices(self) -> frozenset[LatticePoint]:
    return frozenset(p for c in self.cells for p in c)

  def is_triangulation(self) -> bool:
    return all(len(c) == 3 for c in self.cells)

  def cells_by_corner_count(self) -> collections.Counter[int]:
    return collections.Counter(len(c) for c in self.cells)

  def undirected_edges(self) -> set[frozenset[LatticePoint]]:
    return {frozenset(e) for c in self.cells for e in cell_edges(c)}

  def to_json(self) -> dict[str, list[list[list[int]]]]:
    return {"cells": [[list(p) for p in c] for c in self.sorted_cells()]}


@dataclasses.dataclass(frozen=True)
class Triangulation:
  """A lattice triangulation of a polygon.

  Attributes:
    triangles: Triangles with orient2 > 0, rotated to their least corner.
  """

  triangles: frozenset[Cell]

  def sorted_triangles(self) -> list[Cell]:
    return sorted(self.triangles)

  @property
  def used_vertices(self) -> frozenset[LatticePoint]:
    return frozenset(p for t in self.triangles for p in t)

  def as_subdivision(self) -> Subdivision:
    return Subdivision(self.triangles)

  def to_json(self) -> dict[str, list[list[list[int]]]]:
    return {
        "triangles": [[list(p) for p in t] for t in self.sorted_triangles()]
    }


def char_function(tiling: Triangulation | Subdivision) -> CharFunction:
  """phi: each point gets the summed volume of the triangles around it.

  Non-triangular cells of a subdivision count through their fan
  triangulation.

  Args:
    tiling: A triangulation (or subdivision).

  Returns:
    The characteristic function in normalized-volume units.
  """
  cells = (
      tiling.triangles if isinstance(tiling, Triangulation) else tiling.cells
  )
  values: dict[LatticePoint, int] = collections.defaultdict(int)
  for cell in cells:
    for triangle in fan_triangles(cell):
      volume = cell_volume(triangle)
      for corner in triangle:
        values[corner] += volume
  return CharFunction.from_dict(values)


def convex_cells_on_edge(
    p0: LatticePoint,
    p1: LatticePoint,
    points: Iterable[LatticePoint],
    max_corners: Optional[int] = None,
) -> Iterator[Cell]:
  """Strictly convex cells (p0, p1, ...) with corners drawn from `points`.

  Cells are yielded as corner chains starting with the directed edge p0->p1,
  with orient2 > 0 at every corner.

  Args:
    p0: First corner.
    p1: Second corner.
    points: Candidate corners.
    max_corners: If set, larger cells are skipped.

  Yields:
    The cells, in lexicographic order of their corner chains.
  """
  candidates = sorted(
      v
      for v in set(points)
      if v != p0 and v != p1 and lattice.orient2(p0, p1, v) > 0
  )
  chain = [p0, p1]

  def extend() -> Iterator[Cell]:
    last = chain[-1]
    if len(chain) >= 3 and all(
        lattice.orient2(last, p0, q) > 0 for q in chain[1:-1]
    ):
      yield tuple(chain)
    if max_corners is not None and len(chain) >= max_corners:
      return
    for v in candidates:
      if v in chain:
        continue
      if not all(
          lattice.orient2(a, b, v) > 0 for a, b in zip(chain, chain[1:])
      ):
        continue
      if not all(lattice.orient2(last, v, q) > 0 for q in chain[:-1]):
        continue
      chain.append(v)
      yield from extend()
      chain.pop()

  yield from extend()


def convex_cells(
    points: Iterable[LatticePoint], max_corners: Optional[int] = None
) -> list[Cell]:
  """Every strictly convex cell with corners in `points`, listed once."""
  points = sorted(set(points))
  cells = []
  for i, p0 in enumerate(points):
    for p1 in points[i + 1:]:
      cells.extend(convex_cells_on_edge(p0, p1, points[i:], max_corners))
  return cells


class _Peeler:
  """Memoized cell-peeling recursion over sub-polygons of one polygon."""

  def __init__(self, max_corners: Optional[int]):
    self._max_corners = max_corners
    self._tilings: dict[
        tuple[Cell, frozenset[LatticePoint]], tuple[_Tiling, ...]
    ] = {}
    self._counts: dict[tuple[Cell, frozenset[LatticePoint]], int] = {}

  def _candidate_cells(
      self, cycle: Cell, pool: frozenset[LatticePoint]
  ) -> Iterator[Cell]:
    """Strictly convex cells on the inner side of cycle[0]->cycle[1]."""
    return convex_cells_on_edge(
        cycle[0], cycle[1], set(cycle) | pool, self._max_corners
    )

  @staticmethod
  def _cell_fits(
      cell: Cell,
      cycle: Cell,
      doubled: Cell,
      boundary_edges: set[tuple[LatticePoint, LatticePoint]],
  ) -> bool:
    corners = set(cell)
    edges = cell_edges(cell)
    for q in cycle:
      if q in corners:
        continue
      if all(lattice.orient2(a, b, q) > 0 for a, b in edges):
        return False
      if any(lattice.in_open_segment(q, a, b) for a, b in edges):
        return False
    for a, b in edges:
      if (a, b) in boundary_edges:
        continue
      midpoint = (a[0] + b[0], a[1] + b[1])
      if lattice.locate_point(midpoint, doubled) != 1:
        return False
      for c, e in boundary_edges:
        if lattice.segments_cross_properly(a, b, c, e):
          return False
    return True

  @staticmethod
  def _components(
      cell: Cell, cycle: Cell, pool: frozenset[LatticePoint]
  ) -> Optional[list[tuple[Cell, frozenset[LatticePoint]]]]:
    """Sub-polygons left after removing `cell`, or None if ill-formed."""
    index = {p: i for i, p in enumerate(cycle)}
    n = len(cycle)
    # Walk the cell from cycle[1] round to cycle[0], treated as index n.
    walk = list(cell[1:]) + [cell[0]]
    contacts = []
    for pos, p in enumerate(walk):
      if p in index:
        contacts.append((pos, n if pos == len(walk) - 1 else index[p]))
    if any(b <= a for (_, a), (_, b) in zip(contacts, contacts[1:])):
      return None
    components = []
    for (pos_a, a), (pos_b, b) in zip(contacts, contacts[1:]):
      inner = walk[pos_a + 1:pos_b]
      if b == a + 1 and not inner:
        continue
      arc = [cycle[i % n] for i in range(a, b + 1)]
      component = tuple(arc + list(reversed(inner)))
      if len(component) < 3 or not lattice.is_simple_cycle(component):
        return None
      sub_pool = frozenset(
          p for p in pool
          if p not in component and lattice.locate_point(p, component) == 1
      )
      components.append((lattice.rotate_to_min(component), sub_pool))
    return components

  def _splits(
      self, cycle: Cell, pool: frozenset[LatticePoint]
  ) -> Iterator[tuple[Cell, list[tuple[Cell, frozenset[LatticePoint]]]]]:
    doubled = tuple((2 * x, 2 * y) for x, y in cycle)
    boundary_edges = set(lattice.edges_of(cycle))
    for cell in self._candidate_cells(cycle, pool):
      if not self._cell_fits(cell, cycle, doubled, boundary_edges):
        continue
      components = self._components(cell, cycle, pool)
      if components is None:
        continue
      yield lattice.rotate_to_min(cell), components

  def tilings(
      self, cycle: Cell, pool: frozenset[LatticePoint]
  ) -> tuple[_Tiling, ...]:
    key = (cycle, pool)
    if key in self._tilings:
      return self._tilings[key]
    results = []
    for cell, components in self._splits(cycle, pool):
      parts = [self.tilings(c, p) for c, p in components]
      for combination in itertools.product(*parts):
        results.append(frozenset([cell]).union(*combination))
    self._tilings[key] = tuple(results)
    return self._tilings[key]

  def count(self, cycle: Cell, pool: frozenset[LatticePoint]) -> int:
    key = (cycle, pool)
    if key in self._counts:
      return self._counts[key]
    total = 0
    for _, components in self._splits(cycle, pool):
      product = 1
      for c, p in components:
        product *= self.count(c, p)
        if not product:
          break
      total += product
    self._counts[key] = total
    return total


def _start(
    polygon: lattice.LatticePolygon,
) -> tuple[Cell, frozenset[LatticePoint]]:
  pool = lattice.interior_points(polygon)
  cap = polycorr_config.config.max_candidate_points
  if polygon.n + len(pool) > cap:
    raise exceptions.CapExceededError(
        f"Polygon offers {polygon.n + len(pool)} candidate vertices, more than"
        f" the cap of {cap} (--polycorr_max_candidate_points)."
    )
  return lattice.rotate_to_min(polygon.boundary), pool


def _check_tiling(polygon: lattice.LatticePolygon, cells: Iterable[Cell]):
  cells = list(cells)
  if sum(cell_volume(c) for c in cells) != polygon.twice_area():
    raise exceptions.PolycorrInternalError(
        f"Cells {cells} do not conserve the area of {polygon.boundary}."
    )
  if not set(polygon.boundary) <= {p for c in cells for p in c}:
    raise exceptions.PolycorrInternalError(
        f"Cells {cells} miss a boundary point of {polygon.boundary}."
    )


def enumerate_subdivisions(
    polygon: lattice.LatticePolygon,
    max_cells: Optional[int] = None,
) -> list[Subdivision]:
  """All subdivisions of the polygon into strictly convex lattice cells.

  Args:
    polygon: The polygon.
    max_cells: If set, only subdivisions with at most this many cells.

  Returns:
    Subdivisions in canonical order.
  """
  _api_usage_counter.Increment("enumerate_subdivisions")
  cycle, pool = _start(polygon)
  tilings = _Peeler(max_corners=None).tilings(cycle, pool)
  result = [
      Subdivision(t)
      for t in tilings
      if max_cells is None or len(t) <= max_cells
  ]
  if polycorr_config.config.debug_mode:
    for s in result:
      _check_tiling(polygon, s.cells)
  logging.vlog(1, "%d subdivisions of %s", len(result), polygon.boundary)
  return sorted(result, key=lambda s: (len(s.cells), s.sorted_cells()))


def enumerate_triangulations(
    polygon: lattice.LatticePolygon,
) -> list[Triangulation]:
  """All lattice triangulations of the polygon, in canonical order."""
  _api_usage_counter.Increment("enumerate_triangulations")
  cycle, pool = _start(polygon)
  tilings = _Peeler(max_corners=3).tilings(cycle, pool)
  result = [Triangulation(t) for t in tilings]
  if polycorr_config.config.debug_mode:
    for t in result:
      _check_tiling(polygon, t.triangles)
      if not satisfies_euler_count(polygon, t):
        raise exceptions.PolycorrInternalError(
            f"Euler count violated by {t.sorted_triangles()}."
        )
  logging.vlog(1, "%d triangulations of %s", len(result), polygon.boundary)
  return sorted(result, key=lambda t: t.sorted_triangles())


def count_triangulations(polygon: lattice.LatticePolygon) -> int:
  """Number of triangulations, without materializing them."""
  cycle, pool = _start(polygon)
  return _Peeler(max_corners=3).count(cycle, pool)


def satisfies_euler_count(
    polygon: lattice.LatticePolygon, triangulation: Triangulation
) -> bool:
  """|triangles| = 2 * (used interior points) + n - 2."""
  used_interior = triangulation.used_vertices - set(polygon.boundary)
  return len(triangulation.triangles) == 2 * len(used_interior) + polygon.n - 2


def subdivision_from_json(
    obj: dict[str, Sequence[Sequence[Sequence[int]]]],
) -> Subdivision:
  key = "cells" if "cells" in obj else "triangles"
  try:
    cells = [tuple(lattice.as_point(p, 2) for p in c) for c in obj[key]]
  except (KeyError, TypeError) as e:
    raise exceptions.SchemaError(f"Malformed subdivision JSON: {e}") from e
  for cell in cells:
    if not lattice.is_strictly_convex_cell(cell):
      raise exceptions.SchemaError(
          f"Cell {cell} is not a strictly convex cell."
      )
  return Subdivision(frozenset(lattice.rotate_to_min(c) for c in cells))
