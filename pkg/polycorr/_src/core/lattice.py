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
"""Exact integer lattice geometry.

Points are tuples of Python integers. Every predicate here is an exact integer
computation; nothing is ever converted to floating point except inside
`orient_d` for d > 3, where the determinant of a small integer matrix is
rounded back to the integer it must be.

Conventions: `orient2(i, j, k)` is the cross product of `i - j` and `k - j`.
Polygon boundaries are listed clockwise, i.e. their shoelace sum is negative,
and the cells of a subdivision listed in the same rotational sense have
`orient2 > 0` at every corner.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
from typing import Any, Iterable, Iterator, Optional, Sequence, Union

from polycorr._src.core import config as polycorr_config
from polycorr._src.core import exceptions
import more_itertools
import numpy as np
import sympy

LatticePoint = tuple[int, ...]


def as_point(coords: Iterable[Any], dim: Optional[int] = None) -> LatticePoint:
  """Validates `coords` and returns them as a lattice point."""
  point = tuple(coords)
  for c in point:
    if isinstance(c, bool) or not isinstance(c, (int, np.integer)):
      raise exceptions.SchemaError(
          f"Lattice point coordinates must be integers. Got {point!r}."
      )
  point = tuple(int(c) for c in point)
  if dim is not None and len(point) != dim:
    raise exceptions.SchemaError(
        f"Expected a point of dimension {dim}, got {point!r}."
    )
  return point


def _sub(a: LatticePoint, b: LatticePoint) -> LatticePoint:
  return tuple(x - y for x, y in zip(a, b))


def orient2(i: LatticePoint, j: LatticePoint, k: LatticePoint) -> int:
  """Returns the cross product of (i - j) and (k - j)."""
  if not len(i) == len(j) == len(k) == 2:
    raise ValueError(f"orient2 needs 2D points, got {i}, {j}, {k}.")
  return (i[0] - j[0]) * (k[1] - j[1]) - (i[1] - j[1]) * (k[0] - j[0])


def orient_d(*points: LatticePoint) -> int:
  """Determinant of the edge matrix (i_1 - i_0, ..., i_d - i_0).

  Its sign decides admissibility of the simplex and its absolute value is the
  normalized volume.

  Args:
    *points: d + 1 points of dimension d.

  Returns:
    The exact integer determinant.
  """
  d = len(points) - 1
  if d < 1 or any(len(p) != d for p in points):
    raise ValueError(
        f"orient_d needs d + 1 points of dimension d, got {points!r}."
    )
  rows = [_sub(p, points[0]) for p in points[1:]]
  if d == 1:
    return rows[0][0]
  if d == 2:
    (a, b), (c, e) = rows
    return a * e - b * c
  if d == 3:
    (a, b, c), (e, f, g), (h, i, j) = rows
    return a * (f * j - g * i) - b * (e * j - g * h) + c * (e * i - f * h)
  return int(sympy.Matrix(rows).det())


def normalized_volume(simplex: Sequence[LatticePoint]) -> int:
  return abs(orient_d(*simplex))


def twice_signed_area(cycle: Sequence[LatticePoint]) -> int:
  """Shoelace sum; positive for counterclockwise cycles."""
  return sum(
      a[0] * b[1] - a[1] * b[0]
      for a, b in more_itertools.pairwise(itertools.chain(cycle, cycle[:1]))
  )


def on_segment(p: LatticePoint, a: LatticePoint, b: LatticePoint) -> bool:
  """True iff p lies on the closed segment [a, b]."""
  if orient2(a, p, b) != 0:
    return False
  return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(
      a[1], b[1]
  ) <= p[1] <= max(a[1], b[1])


def in_open_segment(p: LatticePoint, a: LatticePoint, b: LatticePoint) -> bool:
  """True iff p lies on [a, b] and differs from both endpoints."""
  return p != a and p != b and on_segment(p, a, b)


def _sign(value: int) -> int:
  return (value > 0) - (value < 0)


def segments_cross_properly(
    a: LatticePoint, b: LatticePoint, c: LatticePoint, e: LatticePoint
) -> bool:
  """True iff the open segments (a, b) and (c, e) cross in a single point."""
  d1 = _sign(orient2(c, a, b))
  d2 = _sign(orient2(e, a, b))
  d3 = _sign(orient2(a, c, e))
  d4 = _sign(orient2(b, c, e))
  return d1 * d2 < 0 and d3 * d4 < 0


def segments_intersect(
    a: LatticePoint, b: LatticePoint, c: LatticePoint, e: LatticePoint
) -> bool:
  """True iff the closed segments [a, b] and [c, e] share a point."""
  if segments_cross_properly(a, b, c, e):
    return True
  return (
      on_segment(c, a, b)
      or on_segment(e, a, b)
      or on_segment(a, c, e)
      or on_segment(b, c, e)
  )


def edges_of(cycle: Sequence[LatticePoint]) -> list[tuple[LatticePoint, ...]]:
  return list(more_itertools.pairwise(itertools.chain(cycle, cycle[:1])))


def is_simple_cycle(cycle: Sequence[LatticePoint]) -> bool:
  """True iff the closed polyline through `cycle` does not touch itself."""
  n = len(cycle)
  if n < 3 or len(set(cycle)) != n:
    return False
  edges = edges_of(cycle)
  for i, (a, b) in enumerate(edges):
    # Adjacent edges may only share their common endpoint.
    c = edges[(i + 1) % n][1]
    if orient2(a, b, c) == 0 and (
        (a[0] - b[0]) * (c[0] - b[0]) + (a[1] - b[1]) * (c[1] - b[1]) > 0
    ):
      return False
    for j in range(i + 2, n):
      if i == 0 and j == n - 1:
        continue
      if segments_intersect(a, b, *edges[j]):
        return False
  return True


def locate_point(p: LatticePoint, cycle: Sequence[LatticePoint]) -> int:
  """Locates p against a simple cycle: 1 inside, 0 on the boundary, -1 out."""
  crossings = 0
  for a, b in edges_of(cycle):
    if on_segment(p, a, b):
      return 0
    if (a[1] > p[1]) != (b[1] > p[1]):
      # Sign of the x-offset of the crossing point relative to p.
      side = orient2(b, a, p) if b[1] > a[1] else orient2(a, b, p)
      if side > 0:
        crossings += 1
  return 1 if crossings % 2 else -1


def is_convex_cell(points: Sequence[LatticePoint]) -> bool:
  """True iff the cycle bounds a convex polygon; collinear corners allowed."""
  if len(points) < 3 or not is_simple_cycle(points):
    return False
  signs = {
      _sign(orient2(points[i - 1], points[i], points[(i + 1) % len(points)]))
      for i in range(len(points))
  }
  signs.discard(0)
  return len(signs) == 1


def is_strictly_convex_cell(points: Sequence[LatticePoint]) -> bool:
  """True iff every corner of the cycle turns with orient2 > 0."""
  n = len(points)
  return (
      n >= 3
      and all(
          orient2(points[i - 1], points[i], points[(i + 1) % n]) > 0
          for i in range(n)
      )
      and is_simple_cycle(points)
  )


def rotate_to_min(cycle: Sequence[LatticePoint]) -> tuple[LatticePoint, ...]:
  """Rotates a cycle so that it starts at its lexicographically least point."""
  start = min(range(len(cycle)), key=lambda i: cycle[i])
  return tuple(cycle[start:]) + tuple(cycle[:start])


@dataclasses.dataclass(frozen=True, slots=True)
class IndexBox:
  """The points of Z^d with every |coordinate| <= N.

  Attributes:
    d: Dimension.
    N: Bound on the absolute value of each coordinate.
  """

  d: int
  N: int

  def __post_init__(self):
    if self.d < 1 or self.N < 1:
      raise ValueError(
          f"Invalid IndexBox. Got d={self.d} and N={self.N}, but both must be"
          " positive."
      )

  def __contains__(self, point: LatticePoint) -> bool:
    return len(point) == self.d and all(abs(c) <= self.N for c in point)

  def points(self) -> Iterator[LatticePoint]:
    return itertools.product(range(-self.N, self.N + 1), repeat=self.d)

  def covers(self, points: Iterable[LatticePoint]) -> bool:
    return all(p in self for p in points)


@dataclasses.dataclass(frozen=True)
class LatticePolygon:
  """A clockwise simple lattice polygon given by its boundary sequence.

  Attributes:
    boundary: The boundary points in clockwise order. Collinear consecutive
      points are allowed unless `strict_collinear` is set; they add boundary
      lattice points to the sequence.
    strict_collinear: Reject collinear corners. Defaults to
      `config.strict_collinear`.
  """

  boundary: tuple[LatticePoint, ...]
  strict_collinear: Optional[bool] = dataclasses.field(
      default=None, compare=False, repr=False
  )

  def __post_init__(self):
    boundary = tuple(as_point(p, 2) for p in self.boundary)
    object.__setattr__(self, "boundary", boundary)
    if len(boundary) < 3:
      raise exceptions.SchemaError(
          f"A polygon needs at least 3 boundary points, got {len(boundary)}."
      )
    if not is_simple_cycle(boundary):
      raise exceptions.SchemaError(
          f"Polygon boundary {boundary} is not a simple closed curve."
      )
    if twice_signed_area(boundary) >= 0:
      raise exceptions.SchemaError(
          f"Polygon boundary {boundary} is not listed clockwise."
      )
    strict = self.strict_collinear
    if strict is None:
      strict = polycorr_config.config.strict_collinear
    if strict and any(
        orient2(boundary[i - 1], p, boundary[(i + 1) % len(boundary)]) == 0
        for i, p in enumerate(boundary)
    ):
      raise exceptions.SchemaError(
          f"Polygon boundary {boundary} has collinear corners."
      )

  @property
  def n(self) -> int:
    return len(self.boundary)

  def edges(self) -> list[tuple[LatticePoint, ...]]:
    return edges_of(self.boundary)

  def locate(self, p: LatticePoint) -> int:
    return locate_point(p, self.boundary)

  def twice_area(self) -> int:
    return -twice_signed_area(self.boundary)

  def to_json(self) -> dict[str, Any]:
    return {"dim": 2, "boundary": [list(p) for p in self.boundary]}


def _plane_side(
    facet: Sequence[LatticePoint], point: LatticePoint
) -> int:
  return orient_d(point, *facet)


@dataclasses.dataclass(frozen=True)
class SimplicialPolytope:
  """A convex lattice polytope with a triangulated boundary.

  Attributes:
    d: Dimension.
    vertices: The vertices.
    facets: Boundary simplices, each listed so that `orient_d(p, *facet) > 0`
      for points p strictly inside the polytope (outward orientation).
  """

  d: int
  vertices: frozenset[LatticePoint]
  facets: tuple[tuple[LatticePoint, ...], ...]

  def __post_init__(self):
    vertices = frozenset(as_point(v, self.d) for v in self.vertices)
    object.__setattr__(self, "vertices", vertices)
    if len(vertices) < self.d + 1:
      raise exceptions.SchemaError(
          f"A {self.d}-polytope needs at least {self.d + 1} vertices."
      )
    k = len(vertices)
    # k times the barycenter keeps the reference point integral.
    center = tuple(sum(v[i] for v in vertices) for i in range(self.d))
    oriented = []
    for facet in self.facets:
      facet = tuple(as_point(p, self.d) for p in facet)
      if len(facet) != self.d or not set(facet) <= vertices:
        raise exceptions.SchemaError(
            f"Facet {facet} must consist of {self.d} polytope vertices."
        )
      scaled = tuple(tuple(k * c for c in p) for p in facet)
      side = _plane_side(scaled, center)
      if side == 0:
        raise exceptions.SchemaError(
            f"Facet {facet} is degenerate or passes through the interior."
        )
      if side < 0:
        facet = (facet[1], facet[0]) + facet[2:]
      oriented.append(facet)
    object.__setattr__(
        self, "facets", tuple(sorted(oriented, key=lambda f: sorted(f)))
    )
    self._check_boundary_complex()

  def _check_boundary_complex(self):
    ridges = {}
    for facet in self.facets:
      for ridge in itertools.combinations(sorted(facet), self.d - 1):
        ridges[ridge] = ridges.get(ridge, 0) + 1
    if any(count != 2 for count in ridges.values()):
      raise exceptions.SchemaError(
          "Every ridge of the boundary complex must lie in exactly two facets."
      )
    for facet in self.facets:
      if any(_plane_side(facet, v) < 0 for v in self.vertices):
        raise exceptions.SchemaError(
            f"Facet {facet} does not support the polytope; it is not convex."
        )

  @classmethod
  def from_vertices(cls, points: Iterable[LatticePoint]) -> SimplicialPolytope:
    """Builds the boundary complex of conv(points); faces must be simplices."""
    points = sorted(set(as_point(p) for p in points))
    if not points:
      raise exceptions.SchemaError("Empty point set.")
    d = len(points[0])
    facets = []
    for candidate in itertools.combinations(points, d):
      sides = [_plane_side(candidate, p) for p in points]
      if any(s < 0 for s in sides) and any(s > 0 for s in sides):
        continue
      if all(s == 0 for s in sides):
        continue
      on_plane = sum(1 for s in sides if s == 0)
      if on_plane != d:
        if on_plane > d:
          raise exceptions.SchemaError(
              f"conv({points}) has a non-simplicial face through {candidate}."
          )
        continue
      facets.append(candidate)
    if not facets:
      raise exceptions.SchemaError(f"{points} is not full-dimensional.")
    vertices = {p for f in facets for p in f}
    return cls(d=d, vertices=frozenset(vertices), facets=tuple(facets))

  def locate(self, p: LatticePoint) -> int:
    sides = [_plane_side(f, p) for f in self.facets]
    if any(s < 0 for s in sides):
      return -1
    return 1 if all(s > 0 for s in sides) else 0

  def normalized_volume(self) -> int:
    """Normalized volume, via the cone over each facet from a vertex."""
    apex = min(self.vertices)
    return sum(
        _plane_side(f, apex) for f in self.facets if apex not in f
    )

  def to_json(self) -> dict[str, Any]:
    order = sorted(self.vertices)
    index = {v: i for i, v in enumerate(order)}
    return {
        "dim": self.d,
        "vertices": [list(v) for v in order],
        "facets": [[index[p] for p in f] for f in self.facets],
    }


Polytope = Union[LatticePolygon, SimplicialPolytope]


def polytope_from_json(obj: Any) -> Polytope:
  """Parses the polytope JSON schema."""
  if not isinstance(obj, dict) or "dim" not in obj:
    raise exceptions.SchemaError(
        f"Polytope JSON must be an object with a 'dim' key, got {obj!r}."
    )
  dim = obj["dim"]
  if dim == 2 and "boundary" in obj:
    return LatticePolygon(tuple(as_point(p, 2) for p in obj["boundary"]))
  if "vertices" not in obj:
    raise exceptions.SchemaError(f"Polytope JSON lacks vertices: {obj!r}.")
  vertices = [as_point(v, dim) for v in obj["vertices"]]
  if "facets" not in obj:
    return SimplicialPolytope.from_vertices(vertices)
  try:
    facets = tuple(tuple(vertices[i] for i in f) for f in obj["facets"])
  except (IndexError, TypeError) as e:
    raise exceptions.SchemaError(f"Bad facet indices: {obj['facets']!r}") from e
  return SimplicialPolytope(d=dim, vertices=frozenset(vertices), facets=facets)


def _bounding_box(points: Iterable[LatticePoint]) -> Iterator[LatticePoint]:
  points = list(points)
  d = len(points[0])
  lows = [min(p[i] for p in points) for i in range(d)]
  highs = [max(p[i] for p in points) for i in range(d)]
  return itertools.product(*(range(lo, hi + 1) for lo, hi in zip(lows, highs)))


def _region_points(polytope: Polytope) -> Iterator[LatticePoint]:
  if isinstance(polytope, LatticePolygon):
    return _bounding_box(polytope.boundary)
  return _bounding_box(polytope.vertices)


def lattice_points(polytope: Polytope) -> frozenset[LatticePoint]:
  """All lattice points of the closed region; l(polytope) is its size."""
  return frozenset(
      p for p in _region_points(polytope) if polytope.locate(p) >= 0
  )


def interior_points(polytope: Polytope) -> frozenset[LatticePoint]:
  """Lattice points strictly inside; l*(polytope) is its size."""
  return frozenset(
      p for p in _region_points(polytope) if polytope.locate(p) > 0
  )


def boundary_points(polytope: Polytope) -> frozenset[LatticePoint]:
  return frozenset(
      p for p in _region_points(polytope) if polytope.locate(p) == 0
  )


def canonical_key(polytope: Polytope) -> str:
  """Key equal for translates (and boundary rotations) of one polytope."""
  if isinstance(polytope, LatticePolygon):
    origin = min(polytope.boundary)
    cycle = rotate_to_min([_sub(p, origin) for p in polytope.boundary])
    return "polygon:" + json.dumps(
        [list(p) for p in cycle], separators=(",", ":")
    )
  origin = min(polytope.vertices)
  facets = sorted(sorted(_sub(p, origin) for p in f) for f in polytope.facets)
  return f"polytope{polytope.d}:" + json.dumps(
      [[list(p) for p in f] for f in facets], separators=(",", ":")
  )


def unimodular_transform(
    points: Iterable[LatticePoint], matrix: Sequence[Sequence[int]]
) -> list[LatticePoint]:
  """Applies an integer matrix to column vectors `points`."""
  m = np.array(matrix, dtype=object)
  return [
      tuple(int(c) for c in m.dot(np.array(p, dtype=object))) for p in points
  ]


def pick_holds(polygon: LatticePolygon) -> bool:
  """Checks 2A = 2 l* + B - 2."""
  return polygon.twice_area() == 2 * len(interior_points(polygon)) + len(
      boundary_points(polygon)
  ) - 2
