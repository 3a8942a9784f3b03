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
"""Random lattice polygons and the invariant checks run over them."""

from __future__ import annotations

import dataclasses
import math
from typing import Any, Optional, Sequence

from absl import logging
from polycorr._src.core import exceptions
from polycorr._src.core import lattice
from polycorr._src.core import monitoring as polycorr_monitoring
from polycorr._src.core import parallel
from polycorr._src.python import genfun
from polycorr._src.python import regularity
from polycorr._src.python import triangulations
import numpy as np

from polycorr._src.core import monitoring

LatticePoint = lattice.LatticePoint

_MAX_ATTEMPTS_PER_POLYGON = 1000

_api_usage_counter = monitoring.Counter(
    "/polycorr/python/corpus/api",
    metadata=monitoring.Metadata(description="Polygon corpus counter."),
    root=polycorr_monitoring.get_monitoring_root(),
    fields=[("name", str)],
)


def make_rng(seed: int) -> np.random.Generator:
  return np.random.Generator(np.random.Philox(seed))


def _drop_collinear(cycle: Sequence[LatticePoint]) -> list[LatticePoint]:
  n = len(cycle)
  return [
      p
      for i, p in enumerate(cycle)
      if lattice.orient2(cycle[i - 1], p, cycle[(i + 1) % n]) != 0
  ]


def with_edge_points(cycle: Sequence[LatticePoint]) -> list[LatticePoint]:
  """Lists every lattice point on every edge, making collinear corners."""
  result = []
  for a, b in lattice.edges_of(cycle):
    g = math.gcd(b[0] - a[0], b[1] - a[1])
    step = ((b[0] - a[0]) // g, (b[1] - a[1]) // g)
    result.extend((a[0] + i * step[0], a[1] + i * step[1]) for i in range(g))
  return result


def random_polygon(
    rng: np.random.Generator,
    box: int = 3,
    max_corners: int = 7,
    max_points: int = 11,
    degenerate: bool = False,
) -> Optional[lattice.LatticePolygon]:
  """One star-shaped lattice polygon, or None if the draw was rejected.

  Corners are distinct points of [0, box]^2 sorted clockwise around their
  centroid. Draws that are not simple, are too thin or carry more than
  `max_points` lattice points are rejected.

  Args:
    rng: The random generator.
    box: Coordinate bound of the corners.
    max_corners: Most corners drawn.
    max_points: Largest allowed l(polygon).
    degenerate: List every boundary lattice point, so that edges with
      lattice points in their interior get collinear corners.

  Returns:
    The polygon or None.
  """
  grid = [(x, y) for x in range(box + 1) for y in range(box + 1)]
  k = int(rng.integers(3, max_corners + 1))
  picks = rng.choice(len(grid), size=k, replace=False)
  corners = [grid[int(i)] for i in picks]
  cx = sum(p[0] for p in corners) / k
  cy = sum(p[1] for p in corners) / k
  corners.sort(
      key=lambda p: (
          -math.atan2(p[1] - cy, p[0] - cx),
          math.hypot(p[0] - cx, p[1] - cy),
      )
  )
  cycle = _drop_collinear(corners)
  if len(cycle) < 3:
    return None
  if degenerate:
    cycle = with_edge_points(cycle)
  try:
    polygon = lattice.LatticePolygon(tuple(cycle), strict_collinear=False)
  except exceptions.SchemaError:
    return None
  if len(lattice.lattice_points(polygon)) > max_points:
    return None
  return polygon


def generate_corpus(
    seed: int,
    size: int,
    max_points: int = 11,
    degenerate_every: int = 4,
) -> list[lattice.LatticePolygon]:
  """`size` distinct polygons drawn from a Philox stream.

  Args:
    seed: Seed of the Philox generator.
    size: Number of polygons.
    max_points: Largest allowed l(polygon).
    degenerate_every: Every this many polygons lists all boundary lattice
      points. 0 disables degenerate corners.

  Returns:
    The polygons, in draw order. Translates count as duplicates.

  Raises:
    CapExceededError: if too many draws are rejected.
  """
  _api_usage_counter.Increment("generate_corpus")
  rng = make_rng(seed)
  corpus, keys = [], set()
  attempts = 0
  while len(corpus) < size:
    attempts += 1
    if attempts > _MAX_ATTEMPTS_PER_POLYGON * size:
      raise exceptions.CapExceededError(
          f"Drew {attempts} polygons but only {len(corpus)} were accepted."
      )
    degenerate = degenerate_every > 0 and len(corpus) % degenerate_every == 0
    polygon = random_polygon(
        rng, max_points=max_points, degenerate=degenerate
    )
    if polygon is None:
      continue
    key = lattice.canonical_key(polygon)
    if key in keys:
      continue
    keys.add(key)
    corpus.append(polygon)
  logging.info(
      "Generated %d polygons from seed %d in %d draws.", size, seed, attempts
  )
  return corpus


def expected_beta_degree(polygon: lattice.LatticePolygon) -> int:
  return 2 * len(lattice.interior_points(polygon)) + polygon.n - 2


@dataclasses.dataclass(frozen=True)
class PolygonReport:
  """Invariant checks of one polygon."""

  boundary: tuple[LatticePoint, ...]
  beta_degree: int
  expected_beta_degree: int
  pick_holds: bool
  euler_violations: int
  irregular: int
  regularity_checked: bool

  @property
  def ok(self) -> bool:
    return (
        self.beta_degree == self.expected_beta_degree
        and self.pick_holds
        and self.euler_violations == 0
        and self.irregular == 0
    )

  def to_json(self) -> dict[str, Any]:
    return {
        "boundary": [list(p) for p in self.boundary],
        "beta_degree": self.beta_degree,
        "expected_beta_degree": self.expected_beta_degree,
        "pick": self.pick_holds,
        "euler_violations": self.euler_violations,
        "irregular": self.irregular,
        "regularity_checked": self.regularity_checked,
    }


def check_polygon(
    polygon: lattice.LatticePolygon, check_regularity: bool = True
) -> PolygonReport:
  """Degree, Pick, Euler and (for hollow convex polygons) regularity checks."""
  triangles = triangulations.enumerate_triangulations(polygon)
  correlator = genfun.correlator_direct(polygon)
  hollow_convex = not lattice.interior_points(
      polygon
  ) and lattice.is_convex_cell(polygon.boundary)
  checked = check_regularity and hollow_convex
  irregular = 0
  if checked:
    irregular = sum(
        1 for t in triangles if not regularity.is_regular(t, polygon)
    )
  return PolygonReport(
      boundary=polygon.boundary,
      beta_degree=correlator.beta_degree(),
      expected_beta_degree=expected_beta_degree(polygon),
      pick_holds=lattice.pick_holds(polygon),
      euler_violations=sum(
          1
          for t in triangles
          if not triangulations.satisfies_euler_count(polygon, t)
      ),
      irregular=irregular,
      regularity_checked=checked,
  )


@dataclasses.dataclass(frozen=True)
class CorpusReport:
  reports: tuple[PolygonReport, ...]

  @property
  def failures(self) -> list[PolygonReport]:
    return [r for r in self.reports if not r.ok]

  def to_json(self) -> dict[str, Any]:
    return {
        "polygons": len(self.reports),
        "failures": [r.to_json() for r in self.failures],
        "regularity_checked": sum(r.regularity_checked for r in self.reports),
        "pass": not self.failures,
    }


def check_corpus(
    corpus: Sequence[lattice.LatticePolygon],
    check_regularity: bool = True,
    num_threads: Optional[int] = None,
) -> CorpusReport:
  """Runs `check_polygon` over the corpus; report order follows the corpus."""
  _api_usage_counter.Increment("check_corpus")
  reports = parallel.run_in_parallel(
      check_polygon,
      [dict(polygon=p, check_regularity=check_regularity) for p in corpus],
      num_threads,
  )
  result = CorpusReport(tuple(reports))
  for failure in result.failures:
    logging.warning("Invariant violated: %s", failure)
  return result
