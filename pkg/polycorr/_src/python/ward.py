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
"""Virasoro generators and Ward identities.

Two families of operators live here:

* The Hermitian-model generators `hmm_virasoro(n, K)`, checked against the
  commutation relations [L_n, L_m] = (n - m) L_{n+m} on a finite window of
  t-monomials.
* The Ward identities of the polygon model. For n >= 1 and x = 0 the
  correlator Z of a polygon satisfies

    -mu (n+2) d_n Z + sum_k (n+k+2) t_k d_{n+k} Z
        + sum_k t_k D_{n,k} + I_n Z = 0,

  where t_q weights cells with q + 2 corners. D_{n,k} collects the gluings
  of an (n+2)-gon and a (k+2)-gon along an edge whose union is not a
  strictly convex cell, and I_n inserts an (n+2)-gon cell at every boundary
  edge. Terms whose boundary word is not a simple clockwise polygon are
  evaluated by the Feynman expansion.
"""

from __future__ import annotations

import dataclasses
from typing import Iterable, Iterator, Optional, Sequence

from absl import logging
from polycorr._src.core import config as polycorr_config
from polycorr._src.core import exceptions
from polycorr._src.core import genpoly
from polycorr._src.core import lattice
from polycorr._src.core import monitoring as polycorr_monitoring
from polycorr._src.core import parallel
from polycorr._src.python import diffops
from polycorr._src.python import genfun
from polycorr._src.python import triangulations
from polycorr._src.python import wick

from polycorr._src.core import monitoring

DiffOp = diffops.DiffOp
GenPoly = genpoly.GenPoly
LatticePoint = lattice.LatticePoint
Boundary = tuple[LatticePoint, ...]

_api_usage_counter = monitoring.Counter(
    "/polycorr/python/ward/api",
    metadata=monitoring.Metadata(description="Virasoro and Ward counter."),
    root=polycorr_monitoring.get_monitoring_root(),
    fields=[("name", str)],
)


def hmm_virasoro(n: int, window: int) -> DiffOp:
  """L_n of the Hermitian matrix model, with the t-sum cut at `window`.

  L_n = -mu d_{n+2} + sum_{k=1..K} k t_k d_{k+n} + sum_{a+b=n} d_a d_b
        + 2N d_n + N^2 [n = 0] + N t_1 [n = -1],

  with d_{-1} = 0.

  Args:
    n: Mode number, at least -1.
    window: The truncation K.

  Returns:
    The operator.
  """
  if n < -1:
    raise ValueError(f"Invalid Virasoro mode. Got n={n}, but it must be >= -1.")
  if window < n + 2:
    raise exceptions.WindowTooSmallError(
        f"Window {window} cannot hold L_{n}, which needs t[{n + 2}]."
    )
  op = DiffOp.term(-1, d={n + 2: 1}, mu=1)
  for k in range(1, window + 1):
    op += DiffOp.term(k, t={k: 1}, d={k + n: 1})
  for a in range(n + 1):
    op += diffops.compose(DiffOp.derivative(a), DiffOp.derivative(n - a))
  if n >= 0:
    op += DiffOp.term(2, d={n: 1}, n=1)
  if n == 0:
    op += DiffOp.term(n=2)
  if n == -1:
    op += DiffOp.term(t={1: 1}, n=1)
  return op


def _by_n_power(op: DiffOp) -> list[DiffOp]:
  groups: dict[int, dict[diffops.OpKey, genpoly.Coefficient]] = {}
  for key, c in op.items():
    groups.setdefault(key.n, {})[dataclasses.replace(key, n=0)] = c
  return [DiffOp(terms) for _, terms in sorted(groups.items())]


def virasoro_defect(n: int, m: int, window: int) -> DiffOp:
  """[L_n, L_m] - (n - m) L_{n+m} as a normal-ordered operator."""
  l_n = hmm_virasoro(n, window)
  l_m = hmm_virasoro(m, window)
  defect = l_n.commutator(l_m)
  if n != m:
    defect -= (n - m) * hmm_virasoro(n + m, window)
  return defect


def min_virasoro_window(n: int, m: int, degree: int) -> int:
  """Smallest K for which the cut-off t-sums act exactly on the test window.

  The dropped terms k t_k d_{k+n} with k > K vanish on monomials whose
  indices are at most K + n. L_m raises the largest index of a window
  monomial by at most one, so K >= D + 2 suffices, next to the K >= n + 2
  every generator needs for its mu term.
  """
  return max(degree + 2, n + 2, m + 2, n + m + 2)


def check_virasoro(n: int, m: int, window: int, degree: int) -> bool:
  """Whether [L_n, L_m] = (n - m) L_{n+m} on all monomials in t_0..t_D.

  Args:
    n: First mode.
    m: Second mode.
    window: The truncation K of both generators.
    degree: D; monomials of total degree <= D in t_0, ..., t_D are tested.

  Returns:
    True iff the defect annihilates every tested monomial.

  Raises:
    WindowTooSmallError: If the cut at K could reach the tested monomials.
  """
  _api_usage_counter.Increment("check_virasoro")
  needed = min_virasoro_window(n, m, degree)
  if window < needed:
    raise exceptions.WindowTooSmallError(
        f"Window K={window} is too small to decide [L_{n}, L_{m}] on monomials"
        f" of degree {degree}; it must be at least {needed}."
    )
  groups = _by_n_power(virasoro_defect(n, m, window))
  for monomial in diffops.monomials(range(degree + 1), degree):
    for group in groups:
      image = group.apply(monomial)
      if image:
        logging.info(
            "[L_%d, L_%d] fails on %s: %s", n, m, monomial, image
        )
        return False
  return True


def check_virasoro_grid(
    modes: Sequence[int], window: int, degree: int
) -> dict[tuple[int, int], bool]:
  """check_virasoro for every ordered pair of modes."""
  pairs = [(n, m) for n in modes for m in modes]
  results = parallel.run_in_parallel(
      check_virasoro,
      [dict(n=n, m=m, window=window, degree=degree) for n, m in pairs],
  )
  return dict(zip(pairs, results))


def canonical_sequence(boundary: Sequence[LatticePoint]) -> Boundary:
  """The least cyclic rotation of a boundary sequence."""
  boundary = tuple(boundary)
  return min(boundary[i:] + boundary[:i] for i in range(len(boundary)))


class CorrelatorSum:
  """A formal sum of boundary sequences with polynomial weights."""

  def __init__(self):
    self._terms: dict[Boundary, GenPoly] = {}

  def add(self, boundary: Sequence[LatticePoint], weight: GenPoly) -> None:
    key = canonical_sequence(boundary)
    total = self._terms.get(key, GenPoly.zero()) + weight
    if total:
      self._terms[key] = total
    else:
      self._terms.pop(key, None)

  def items(self) -> list[tuple[Boundary, GenPoly]]:
    return sorted(self._terms.items())

  def __len__(self) -> int:
    return len(self._terms)

  def __contains__(self, boundary: Sequence[LatticePoint]) -> bool:
    return canonical_sequence(boundary) in self._terms

  def weight(self, boundary: Sequence[LatticePoint]) -> GenPoly:
    return self._terms.get(canonical_sequence(boundary), GenPoly.zero())

  def total_weight(self) -> GenPoly:
    total = GenPoly.zero()
    for _, w in self._terms.items():
      total += w
    return total


def insert_ihat(
    boundary: Sequence[LatticePoint],
    n: int,
    points: Iterable[LatticePoint],
    deformation: bool = False,
) -> CorrelatorSum:
  """Inserts an (n+2)-gon cell at every boundary edge.

  For the edge p_l -> p_{l+1} and every strictly convex cell
  (p_l, p_{l+1}, i_3, ..., i_{n+2}) on `points`, the result gains the
  sequence p_1..p_l, i_{n+2}..i_3, p_{l+1}..p_m with the cell weight.

  Args:
    boundary: The boundary sequence, at least 3 points.
    n: Number of inserted points, at least 1.
    points: The internal index set.
    deformation: Weight cells by their x-monomial instead of 1.

  Returns:
    The formal sum.
  """
  boundary = tuple(boundary)
  if len(boundary) < 3:
    raise ValueError(
        f"Invalid boundary. Got {len(boundary)} points, but at least 3 are"
        " needed."
    )
  if n < 1:
    raise ValueError(
        f"Invalid insertion order. Got n={n}, but it must be >= 1."
    )
  points = frozenset(points)
  result = CorrelatorSum()
  for l, (a, b) in enumerate(lattice.edges_of(boundary)):
    for cell in triangulations.convex_cells_on_edge(a, b, points, n + 2):
      if len(cell) != n + 2:
        continue
      weight = (
          genfun.cell_weight(lattice.rotate_to_min(cell))
          if deformation
          else GenPoly.one()
      )
      inserted = (
          boundary[: l + 1] + tuple(reversed(cell[2:])) + boundary[l + 1 :]
      )
      result.add(inserted, weight)
  return result


def ward_operator(n: int, kinds: Iterable[int]) -> DiffOp:
  """-mu (n+2) d_n + sum_k (n+k+2) t_k d_{n+k}."""
  op = DiffOp.term(-(n + 2), d={n: 1}, mu=1)
  for k in kinds:
    op += DiffOp.term(n + k + 2, t={k: 1}, d={n + k: 1})
  return op


def _union_cycle(
    cell: triangulations.Cell,
    other: triangulations.Cell,
    a: LatticePoint,
    b: LatticePoint,
) -> Boundary:
  """Boundary of cells glued along a->b (in `cell`) and b->a (in `other`)."""
  i = cell.index(b)
  from_b = cell[i:] + cell[:i]
  j = other.index(a)
  from_a = other[j:] + other[:j]
  return from_b + from_a[1:-1]


def _gluings(
    n: int, points: frozenset[LatticePoint], kinds: Sequence[int]
) -> Iterator[tuple[int, Boundary, tuple[wick.MatrixEntry, ...]]]:
  """(k, union cycle, union factors) of non-convex n- and k-cell gluings."""
  for cell in triangulations.convex_cells(points, n + 2):
    if len(cell) != n + 2:
      continue
    for a, b in lattice.edges_of(cell):
      for other in triangulations.convex_cells_on_edge(b, a, points):
        k = len(other) - 2
        if k not in kinds:
          continue
        union = _union_cycle(cell, other, a, b)
        if lattice.is_strictly_convex_cell(union):
          continue
        factors = tuple(
            f
            for f in wick.cell_factors(cell) + wick.cell_factors(other)
            if f not in (wick.MatrixEntry(a, b), wick.MatrixEntry(b, a))
        )
        yield k, union, factors


def gluing_defects(
    boundary: Sequence[LatticePoint],
    n: int,
    points: Iterable[LatticePoint],
    order: int,
    expander: Optional[wick.FeynmanExpander] = None,
) -> GenPoly:
  """sum_k t_k D_{n,k} up to t-degree `order`, at x = 0."""
  points = frozenset(points)
  kinds = wick.polygon_kinds(points)
  if expander is None:
    expander = wick.polygon_expander(points, deformation=False)
  word = wick.boundary_word(boundary)
  result = GenPoly.zero()
  if order < 1:
    return result
  for k, union, factors in _gluings(n, points, kinds):
    value = expander.generating_function(word + factors, kinds, order - 1)
    if value:
      logging.vlog(2, "D_{%d,%d} gluing %s contributes", n, k, union)
    result += GenPoly.monomial(t={k: 1}) * value
  return result


def sequence_correlator(
    boundary: Sequence[LatticePoint],
    points: Iterable[LatticePoint],
    order: int,
    expander: Optional[wick.FeynmanExpander] = None,
) -> GenPoly:
  """<boundary> at x = 0 up to t-degree `order`, for any boundary sequence.

  Simple clockwise sequences whose lattice points all lie in `points` go to
  the subdivision enumerator; every other word goes to the Feynman
  expansion over `points`.

  Args:
    boundary: The boundary sequence.
    points: The internal index set.
    order: Truncation order in t.
    expander: A cellular expander over `points` at x = 0 to reuse.

  Returns:
    The truncated correlator.
  """
  points = frozenset(points)
  if (
      lattice.is_simple_cycle(boundary)
      and lattice.twice_signed_area(boundary) < 0
  ):
    polygon = lattice.LatticePolygon(tuple(boundary), strict_collinear=False)
    if lattice.lattice_points(polygon) <= points:
      return genfun.without_deformation(
          genfun.subdivision_genfun(polygon, max_cells=order)
      )
  if expander is None:
    expander = wick.polygon_expander(points, deformation=False)
  return expander.generating_function(
      wick.boundary_word(boundary), wick.polygon_kinds(points), order
  )


def ward_residual(
    polygon: lattice.LatticePolygon, n: int, order: int
) -> GenPoly:
  """The Ward identity of order n applied to the polygon correlator at x = 0.

  Args:
    polygon: The polygon.
    n: Order of the identity, at least 1.
    order: Truncation order in t of the residual.

  Returns:
    The residual up to t-degree `order`; it vanishes when the identity holds.

  Raises:
    ValueError: For n < 1. A 2-gon insertion (n = 0) is not defined.
    CapExceededError: If order + 1 exceeds `--polycorr_wick_max_order`.
  """
  _api_usage_counter.Increment("ward_residual")
  if n < 1:
    raise ValueError(
        f"Unsupported Ward identity order n={n}; only n >= 1 is defined."
    )
  cap = polycorr_config.config.wick_max_order
  if order + 1 > cap:
    raise exceptions.CapExceededError(
        f"t-order {order} needs {order + 1} cells, above the cap {cap}"
        " (--polycorr_wick_max_order)."
    )
  points = lattice.lattice_points(polygon)
  kinds = wick.polygon_kinds(points)
  z = genfun.without_deformation(
      genfun.subdivision_genfun(polygon, max_cells=order + 1)
  )
  residual = ward_operator(n, kinds).apply(z)
  expander = wick.polygon_expander(points, deformation=False)
  residual += gluing_defects(polygon.boundary, n, points, order, expander)
  for sequence, weight in insert_ihat(polygon.boundary, n, points).items():
    residual += weight * sequence_correlator(
        sequence, points, order, expander
    )
  residual = residual.truncate_t(order)
  logging.info(
      "Ward residual of %s at n=%d, order %d: %s",
      polygon.boundary,
      n,
      order,
      residual,
  )
  return residual
