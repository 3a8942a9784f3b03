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
"""Dual and reflexive lattice polytopes and the Hodge numbers of their pairs.

Polytopes are full-dimensional and given by their vertices. Facets are stored
as `normal . x <= offset` with a primitive integer normal, so the polar dual
{x : <x, y> >= -1 for all y} has one vertex `-normal / offset` per facet. The
i-th vertex of `dual_polytope(p)` belongs to the i-th facet of `p`.
"""

from __future__ import annotations

import dataclasses
import fractions
import functools
import itertools
import math
from typing import Any, Iterable, Sequence

from absl import logging
from polycorr._src.core import exceptions
from polycorr._src.core import lattice
from polycorr._src.core import monitoring as polycorr_monitoring
from polycorr._src.core import parallel
import sympy
from sympy.matrices import normalforms

from polycorr._src.core import monitoring

Fraction = fractions.Fraction
RationalPoint = tuple[Fraction, ...]
Face = frozenset[int]

_api_usage_counter = monitoring.Counter(
    "/polycorr/python/toric/api",
    metadata=monitoring.Metadata(description="Toric duality counter."),
    root=polycorr_monitoring.get_monitoring_root(),
    fields=[("name", str)],
)


def _as_rational(point: Iterable[Any]) -> RationalPoint:
  return tuple(Fraction(c) for c in point)


def _to_sympy(point: Sequence[Fraction]) -> list[sympy.Rational]:
  return [sympy.Rational(c.numerator, c.denominator) for c in point]


def _affine_rank(points: Sequence[RationalPoint]) -> int:
  if len(points) <= 1:
    return 0
  base = points[0]
  rows = [_to_sympy([a - b for a, b in zip(p, base)]) for p in points[1:]]
  return sympy.Matrix(rows).rank()


def _dot(a: Sequence[Any], b: Sequence[Any]) -> Any:
  return sum(x * y for x, y in zip(a, b))


@dataclasses.dataclass(frozen=True)
class Facet:
  """A supporting hyperplane `normal . x <= offset` and its vertex indices."""

  normal: tuple[int, ...]
  offset: int | Fraction
  vertices: Face

  def slack(self, point: Sequence[Any]) -> Any:
    return self.offset - _dot(self.normal, point)


def _hyperplane(
    points: Sequence[RationalPoint],
) -> tuple[tuple[int, ...], Fraction] | None:
  """Primitive integer hyperplane through affinely independent `points`."""
  rows = [_to_sympy(p) + [sympy.Integer(1)] for p in points]
  kernel = sympy.Matrix(rows).nullspace()
  if len(kernel) != 1:
    return None
  vector = [sympy.Rational(c) for c in kernel[0]]
  scale = functools.reduce(math.lcm, (int(c.q) for c in vector), 1)
  ints = [int(c * scale) for c in vector]
  g = functools.reduce(math.gcd, ints[:-1], 0)
  if g == 0:
    return None
  normal = tuple(c // g for c in ints[:-1])
  return normal, Fraction(-ints[-1], g)


def _facets(
    points: Sequence[RationalPoint], dim: int
) -> list[tuple[tuple[int, ...], Fraction]]:
  found = set()
  for subset in itertools.combinations(points, dim):
    plane = _hyperplane(subset)
    if plane is None:
      continue
    normal, offset = plane
    values = [_dot(normal, p) for p in points]
    if all(v <= offset for v in values):
      found.add((normal, offset))
    elif all(v >= offset for v in values):
      found.add((tuple(-c for c in normal), -offset))
  return sorted(found)


@dataclasses.dataclass(frozen=True)
class ConvexPolytope:
  """A full-dimensional convex polytope with rational vertices.

  Attributes:
    vertices: The vertices, in construction order.
    facets: Facets sorted by (normal, offset).
  """

  vertices: tuple[RationalPoint, ...]
  facets: tuple[Facet, ...]

  @classmethod
  def from_points(cls, points: Iterable[Iterable[Any]]) -> ConvexPolytope:
    """Convex hull of `points`; interior and repeated points are dropped."""
    pts = list(dict.fromkeys(_as_rational(p) for p in points))
    if not pts:
      raise ValueError("A polytope needs at least one point.")
    dim = len(pts[0])
    if any(len(p) != dim for p in pts):
      raise ValueError(f"Points of mixed dimension: {pts!r}")
    if _affine_rank(pts) != dim:
      raise ValueError(
          f"Points span a polytope of dimension {_affine_rank(pts)}, but it"
          f" must be full-dimensional ({dim})."
      )
    planes = _facets(pts, dim)
    vertices = []
    for p in pts:
      tight = [_to_sympy(n) for n, b in planes if _dot(n, p) == b]
      if tight and sympy.Matrix(tight).rank() == dim:
        vertices.append(p)
    facets = tuple(
        Facet(
            normal=n,
            offset=b,
            vertices=frozenset(
                i for i, v in enumerate(vertices) if _dot(n, v) == b
            ),
        )
        for n, b in planes
    )
    return cls(vertices=tuple(vertices), facets=facets)

  @property
  def dim(self) -> int:
    return len(self.vertices[0])

  def contains(self, point: Sequence[Any], strict: bool = False) -> bool:
    if strict:
      return all(f.slack(point) > 0 for f in self.facets)
    return all(f.slack(point) >= 0 for f in self.facets)

  def is_integral(self) -> bool:
    return all(c.denominator == 1 for v in self.vertices for c in v)

  def to_json(self) -> dict[str, Any]:
    def coord(c: Fraction) -> int | str:
      return c.numerator if c.denominator == 1 else str(c)

    return {
        "dim": self.dim,
        "vertices": [[coord(c) for c in v] for v in self.vertices],
    }


def polytope_from_json(obj: Any) -> ConvexPolytope:
  """Parses `{"dim": n, "vertices": [...]}` with the origin inside."""
  if not isinstance(obj, dict) or "vertices" not in obj or "dim" not in obj:
    raise exceptions.SchemaError(
        f"Polytope JSON must have 'dim' and 'vertices' keys, got {obj!r}."
    )
  if obj.get("origin_interior", True) is not True:
    raise exceptions.SchemaError("Toric polytopes must have origin_interior.")
  points = [lattice.as_point(v, obj["dim"]) for v in obj["vertices"]]
  try:
    polytope = ConvexPolytope.from_points(points)
  except ValueError as e:
    raise exceptions.SchemaError(str(e)) from e
  if not polytope.contains((0,) * polytope.dim, strict=True):
    raise exceptions.SchemaError(
        f"The origin is not interior to {obj['vertices']!r}."
    )
  return polytope


def dual_polytope(polytope: ConvexPolytope) -> ConvexPolytope:
  """Polar dual {x : <x, y> >= -1 for all y in `polytope`}.

  Args:
    polytope: A polytope with the origin strictly inside.

  Returns:
    The dual. Its i-th vertex is `-normal / offset` of the i-th facet.

  Raises:
    ValueError: if the origin is not strictly interior.
  """
  _api_usage_counter.Increment("dual_polytope")
  if any(f.offset <= 0 for f in polytope.facets):
    raise ValueError(
        "Invalid polytope for dualization. The origin must be strictly"
        f" interior, but {polytope.vertices!r} does not contain it."
    )
  return ConvexPolytope.from_points(
      tuple(Fraction(-c) / f.offset for c in f.normal) for f in polytope.facets
  )


def is_reflexive(polytope: ConvexPolytope) -> bool:
  return polytope.is_integral() and dual_polytope(polytope).is_integral()


@dataclasses.dataclass(frozen=True)
class FaceLattice:
  """Proper nonempty faces of a polytope as sets of vertex indices."""

  dim: int
  faces: dict[int, tuple[Face, ...]]

  def of_dim(self, k: int) -> tuple[Face, ...]:
    return self.faces.get(k, ())

  def all_faces(self) -> list[Face]:
    return [f for k in sorted(self.faces) for f in self.faces[k]]

  def dimension(self, face: Face) -> int:
    for k, faces in self.faces.items():
      if face in faces:
        return k
    raise ValueError(f"{sorted(face)} is not a face.")


def face_lattice(polytope: ConvexPolytope) -> FaceLattice:
  """Closes the facet vertex sets under intersection."""
  _api_usage_counter.Increment("face_lattice")
  faces = {f.vertices for f in polytope.facets}
  frontier = set(faces)
  while frontier:
    new = set()
    for a, b in itertools.product(frontier, faces):
      c = a & b
      if c and c not in faces:
        new.add(c)
    faces |= new
    frontier = new
  by_dim: dict[int, list[Face]] = {}
  for face in faces:
    k = _affine_rank([polytope.vertices[i] for i in sorted(face)])
    by_dim.setdefault(k, []).append(face)
  return FaceLattice(
      dim=polytope.dim,
      faces={k: tuple(sorted(v, key=sorted)) for k, v in by_dim.items()},
  )


def dual_face(polytope: ConvexPolytope, face: Face) -> Face:
  """Vertices of `dual_polytope(polytope)` spanning the dual face of `face`."""
  return frozenset(
      i for i, f in enumerate(polytope.facets) if face <= f.vertices
  )


def lattice_points_nd(
    polytope: ConvexPolytope,
) -> frozenset[lattice.LatticePoint]:
  """Lattice points of the closed polytope, by a bounding-box scan."""
  ranges = []
  for axis in range(polytope.dim):
    coords = [v[axis] for v in polytope.vertices]
    ranges.append(range(math.ceil(min(coords)), math.floor(max(coords)) + 1))
  return frozenset(
      p for p in itertools.product(*ranges) if polytope.contains(p)
  )


def relative_interior_points(
    polytope: ConvexPolytope,
    face: Face,
    points: Iterable[lattice.LatticePoint] | None = None,
) -> frozenset[lattice.LatticePoint]:
  """Lattice points in the relative interior of `face`.

  Args:
    polytope: The polytope.
    face: Vertex indices of a face.
    points: The lattice points of `polytope`, if already known.

  Returns:
    Points tight on exactly the facets that contain `face`.
  """
  if points is None:
    points = lattice_points_nd(polytope)
  tight = [face <= f.vertices for f in polytope.facets]
  return frozenset(
      p
      for p in points
      if all((f.slack(p) == 0) == t for f, t in zip(polytope.facets, tight))
  )


def _interior_count(
    polytope: ConvexPolytope,
    face: Face,
    points: frozenset[lattice.LatticePoint],
) -> int:
  return len(relative_interior_points(polytope, face, points))


@dataclasses.dataclass(frozen=True)
class HodgeNumbers:
  h11: int
  hn21: int

  def to_json(self) -> dict[str, int]:
    return {"h11": self.h11, "hn21": self.hn21}


def _face_sum(polytope: ConvexPolytope, num_threads: int | None) -> int:
  """l(P) - n - 1 - sum over facets of l* + sum over codim-2 faces of l* l*."""
  n = polytope.dim
  dual = dual_polytope(polytope)
  faces = face_lattice(polytope)
  dual_faces = face_lattice(dual)
  points = lattice_points_nd(polytope)
  dual_points = lattice_points_nd(dual)
  facets = faces.of_dim(n - 1)
  ridges = faces.of_dim(n - 2)
  jobs = [dict(polytope=polytope, face=f, points=points) for f in facets]
  jobs += [dict(polytope=polytope, face=r, points=points) for r in ridges]
  jobs += [
      dict(polytope=dual, face=dual_face(polytope, r), points=dual_points)
      for r in ridges
  ]
  counts = parallel.run_in_parallel(_interior_count, jobs, num_threads)
  facet_counts = counts[: len(facets)]
  ridge_counts = counts[len(facets) : len(facets) + len(ridges)]
  dual_counts = counts[len(facets) + len(ridges) :]
  for r in ridges:
    if dual_faces.dimension(dual_face(polytope, r)) != 1:
      raise exceptions.PolycorrInternalError(
          f"The dual of ridge {sorted(r)} is not an edge."
      )
  return (
      len(points)
      - n
      - 1
      - sum(facet_counts)
      + sum(a * b for a, b in zip(ridge_counts, dual_counts))
  )


def hodge_numbers(
    polytope: ConvexPolytope, num_threads: int | None = None
) -> HodgeNumbers:
  """Hodge numbers h^{1,1} and h^{n-2,1} of the reflexive pair.

  h^{n-2,1} is evaluated on `polytope` and h^{1,1} on its dual, so swapping
  a polytope for its dual swaps the two numbers.

  Args:
    polytope: A reflexive polytope of dimension n >= 3.
    num_threads: Workers for the per-face lattice counts.

  Returns:
    The two Hodge numbers.

  Raises:
    ValueError: if the polytope is not reflexive or n < 3.
  """
  _api_usage_counter.Increment("hodge_numbers")
  n = polytope.dim
  if n < 3:
    raise ValueError(f"Hodge numbers need dimension >= 3, got {n}.")
  if not is_reflexive(polytope):
    raise ValueError(f"{polytope.vertices!r} is not reflexive.")
  if n == 3:
    logging.warning(
        "Evaluating the Hodge formulas in dimension 3, below their regime."
    )
  result = HodgeNumbers(
      h11=_face_sum(dual_polytope(polytope), num_threads),
      hn21=_face_sum(polytope, num_threads),
  )
  logging.info("Hodge numbers of a %d-dimensional pair: %s", n, result)
  return result


def _angle_key(p: lattice.LatticePoint) -> tuple[int, Fraction]:
  """Orders nonzero points by their angle in [0, 2 pi)."""
  x, y = p
  half = 0 if (y > 0 or (y == 0 and x > 0)) else 1
  if y == 0:
    return half, Fraction(-(10**9))
  return half, Fraction(-x, y) if half == 0 else Fraction(x, -y)


def _det(a: lattice.LatticePoint, b: lattice.LatticePoint) -> int:
  return a[0] * b[1] - a[1] * b[0]


def _distance_one(a: lattice.LatticePoint, b: lattice.LatticePoint) -> bool:
  """Edge ab lies at lattice distance 1 from the origin, seen ccw."""
  return _det(a, b) == math.gcd(b[0] - a[0], b[1] - a[1]) > 0


def _left_turn(
    a: lattice.LatticePoint, b: lattice.LatticePoint, c: lattice.LatticePoint
) -> bool:
  return _det((b[0] - a[0], b[1] - a[1]), (c[0] - b[0], c[1] - b[1])) > 0


def polygon_normal_form(vertices: Sequence[lattice.LatticePoint]) -> tuple:
  """Invariant of a cyclic vertex list under GL(2, Z) acting on the plane."""
  k = len(vertices)
  forms = []
  for step in (1, -1):
    for start in range(k):
      rows = [vertices[(start + step * i) % k] for i in range(k)]
      hnf = normalforms.hermite_normal_form(sympy.Matrix(rows))
      forms.append(tuple(tuple(int(c) for c in row) for row in hnf.tolist()))
  return min(forms)


def reflexive_polygon_census(
    box: int = 4,
) -> list[tuple[lattice.LatticePoint, ...]]:
  """Reflexive lattice polygons with vertices in [-box, box]^2.

  A lattice polygon around the origin is reflexive exactly when every edge
  lies at lattice distance 1 from the origin. The search walks primitive
  vertices in angular order and keeps one polygon per GL(2, Z) class.

  Args:
    box: Coordinate bound on the vertices.

  Returns:
    One counterclockwise vertex cycle per class, sorted by vertex count and
    normal form.
  """
  _api_usage_counter.Increment("reflexive_polygon_census")
  points = sorted(
      (
          p
          for p in itertools.product(range(-box, box + 1), repeat=2)
          if math.gcd(*p) == 1
      ),
      key=_angle_key,
  )
  classes: dict[tuple, tuple[lattice.LatticePoint, ...]] = {}

  def close(cycle: list[lattice.LatticePoint]):
    first, last = cycle[0], cycle[-1]
    if (
        len(cycle) >= 3
        and _distance_one(last, first)
        and _left_turn(cycle[-2], last, first)
        and _left_turn(last, first, cycle[1])
    ):
      classes.setdefault(polygon_normal_form(cycle), tuple(cycle))

  def grow(cycle: list[lattice.LatticePoint], index: int):
    close(cycle)
    for j in range(index + 1, len(points)):
      p = points[j]
      if not _distance_one(cycle[-1], p):
        continue
      if len(cycle) >= 2 and not _left_turn(cycle[-2], cycle[-1], p):
        continue
      cycle.append(p)
      grow(cycle, j)
      cycle.pop()

  for i, p in enumerate(points):
    grow([p], i)
  logging.info(
      "Found %d reflexive polygon classes in the box of size %d.",
      len(classes),
      box,
  )
  return [
      classes[key] for key in sorted(classes, key=lambda k: (len(k), k))
  ]
