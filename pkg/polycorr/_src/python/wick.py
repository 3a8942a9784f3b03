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
"""Formal Gaussian expectations by Wick pairing.

This module is the oracle side of polycorr. It evaluates correlators straight
from the Gaussian integral instead of from the enumeration of tilings:

* `wick_expectation` is the naive sum over perfect pairings of a monomial.
* `FeynmanExpander` evaluates <word * prod_q W_q^{k_q} / k_q!> by growing
  pairings one factor at a time and opening interaction vertices on demand.
  It is generic over the factor type and serves the polygon model, the tensor
  model and the Ward-identity terms whose boundary word is not a polygon.
* `hmm_trace_moment` computes <N Tr H^k> of the Hermitian matrix model by
  counting faces of ribbon gluings.

The boundary monomial of a clockwise polygon reads its boundary reversed:
prod_l H[p_{l+1}, p_l]. `boundary_word` is the only place this mirror flip is
applied.
"""

from __future__ import annotations

import collections
import dataclasses
import fractions
import functools
import itertools
import math
from typing import (
    Any,
    Callable,
    Iterable,
    Iterator,
    Mapping,
    Optional,
    Protocol,
    Sequence,
)

from absl import logging
from polycorr._src.core import config as polycorr_config
from polycorr._src.core import exceptions
from polycorr._src.core import genpoly
from polycorr._src.core import lattice
from polycorr._src.core import monitoring as polycorr_monitoring
from polycorr._src.python import triangulations
import more_itertools
import sympy
from sympy.combinatorics import permutations

from polycorr._src.core import monitoring

GenPoly = genpoly.GenPoly
Fraction = fractions.Fraction
LatticePoint = lattice.LatticePoint

HERMITIAN_N = "hermitian_N"
DEFORMED_2D = "deformed_2d"
DEFORMED_TENSOR = "deformed_tensor"
_VARIANTS = (HERMITIAN_N, DEFORMED_2D, DEFORMED_TENSOR)

_api_usage_counter = monitoring.Counter(
    "/polycorr/python/wick/api",
    metadata=monitoring.Metadata(description="Wick oracle counter."),
    root=polycorr_monitoring.get_monitoring_root(),
    fields=[("name", str)],
)


class Factor(Protocol):
  """A Gaussian variable. Its only nonzero pairing is with `partner()`."""

  def partner(self) -> Factor:
    ...

  def __lt__(self, other: Any) -> bool:
    ...


@dataclasses.dataclass(frozen=True, order=True, slots=True)
class MatrixEntry:
  """The matrix entry H[i, j].

  Attributes:
    i: Row index.
    j: Column index.
  """

  i: Any
  j: Any

  def partner(self) -> MatrixEntry:
    return MatrixEntry(self.j, self.i)


Monomial = tuple[Factor, ...]


@dataclasses.dataclass(frozen=True)
class GaussianSpec:
  """The Gaussian measure an expectation is taken against.

  Attributes:
    variant: One of "hermitian_N", "deformed_2d" or "deformed_tensor".
    index_box: Index range of the deformed models. Internal index sums run
      over the lattice points of the polygon unless `strict_box` is set, in
      which case they run over the whole box.
    mu: A rational value for mu, or None to keep mu symbolic.
    n: Matrix size of the Hermitian model.
    scale: Pairing value in units of 1/mu (deformed) or 1/N (Hermitian).
    strict_box: Sum internal indices over the whole index box.
  """

  variant: str = DEFORMED_2D
  index_box: Optional[lattice.IndexBox] = None
  mu: Optional[Fraction] = None
  n: Optional[int] = None
  scale: Fraction = Fraction(1)
  strict_box: bool = False

  def __post_init__(self):
    if self.variant not in _VARIANTS:
      raise ValueError(
          f"Invalid Gaussian variant. Got {self.variant!r}, but it must be one"
          f" of {_VARIANTS}."
      )
    if self.variant == HERMITIAN_N and (self.n is None or self.n < 1):
      raise ValueError(
          f"The Hermitian model needs a matrix size N >= 1, got {self.n}."
      )
    if self.strict_box and self.index_box is None:
      raise ValueError("strict_box requires an index_box.")

  def pair_value(self) -> GenPoly:
    """Value of one matched pairing."""
    if self.variant == HERMITIAN_N:
      return GenPoly.constant(Fraction(self.scale) / self.n)
    if self.mu is not None:
      return GenPoly.constant(Fraction(self.scale) / Fraction(self.mu))
    return GenPoly.monomial(Fraction(self.scale), mu=-1)


def propagator(a: Factor, b: Factor, spec: GaussianSpec) -> GenPoly:
  """<a b> for two factors: nonzero only when b is the partner of a."""
  if b != a.partner():
    return GenPoly.zero()
  return spec.pair_value()


def _perfect_matchings(
    items: Sequence[int],
) -> Iterator[list[tuple[int, int]]]:
  if not items:
    yield []
    return
  first, rest = items[0], items[1:]
  for k, other in enumerate(rest):
    for matching in _perfect_matchings(rest[:k] + rest[k + 1:]):
      yield [(first, other)] + matching


def wick_expectation(monomial: Sequence[Factor], spec: GaussianSpec) -> GenPoly:
  """Sum over all perfect pairings of the product of propagators.

  Args:
    monomial: The factors.
    spec: The Gaussian measure.

  Returns:
    The expectation; zero for odd length.

  Raises:
    CapExceededError: If the monomial is longer than
      `--polycorr_wick_max_length`.
  """
  _api_usage_counter.Increment("wick_expectation")
  cap = polycorr_config.config.wick_max_length
  if len(monomial) > cap:
    raise exceptions.CapExceededError(
        f"Monomial of length {len(monomial)} exceeds the pairing cap {cap}"
        " (--polycorr_wick_max_length)."
    )
  if len(monomial) % 2:
    return GenPoly.zero()
  value = spec.pair_value()
  count = 0
  for matching in _perfect_matchings(tuple(range(len(monomial)))):
    if all(monomial[b] == monomial[a].partner() for a, b in matching):
      count += 1
  return value ** (len(monomial) // 2) * count


@dataclasses.dataclass(frozen=True)
class Vertex:
  """One interaction vertex of a potential sum_q t_q W_q.

  Attributes:
    kind: The t-variable key of the vertex.
    factors: Factors of the vertex monomial.
    weight: Vertex coefficient (an x-monomial, or 1).
  """

  kind: genpoly.TKey
  factors: tuple[Factor, ...]
  weight: GenPoly


class FeynmanExpander:
  """Evaluates <word * prod_q W_q^{k_q} / k_q!> for a fixed vertex set.

  The smallest unpaired factor f is paired with its partner p, which is
  either another unpaired factor or a factor of a vertex not yet opened. An
  opened vertex of kind q is one of the remaining copies of W_q, so it
  carries the number of remaining copies as multiplicity; the final division
  by prod_q k_q! must then be exact. A state with no unpaired factor but
  unopened copies contributes zero: there are no vacuum components.

  Matched pairings count as mu^{-1} inside the recursion; `scale` multiplies
  every pairing afterwards.
  """

  def __init__(
      self,
      vertices_with: Callable[[Factor], Iterable[Vertex]],
      scale: Fraction = Fraction(1),
  ):
    """Initializes the expander.

    Args:
      vertices_with: Returns the vertices whose monomial contains a factor.
        Every vertex must contain each of its factors at most once.
      scale: Pairing value in units of 1/mu.
    """
    self._vertices_with = vertices_with
    self._scale = Fraction(scale)
    self._vertex_cache: dict[Factor, tuple[Vertex, ...]] = {}
    self._memo: dict[
        tuple[tuple[Factor, ...], tuple[tuple[Any, int], ...]], GenPoly
    ] = {}

  def _vertices(self, factor: Factor) -> tuple[Vertex, ...]:
    if factor not in self._vertex_cache:
      self._vertex_cache[factor] = tuple(self._vertices_with(factor))
    return self._vertex_cache[factor]

  def _raw(
      self,
      state: tuple[Factor, ...],
      remaining: tuple[tuple[Any, int], ...],
  ) -> GenPoly:
    if not state:
      if all(r == 0 for _, r in remaining):
        return GenPoly.one()
      return GenPoly.zero()
    key = (state, remaining)
    if key in self._memo:
      return self._memo[key]
    f, rest = state[0], state[1:]
    p = f.partner()
    pair = GenPoly.monomial(mu=-1)
    total = GenPoly.zero()
    copies = rest.count(p)
    if copies:
      k = rest.index(p)
      total += pair * self._raw(rest[:k] + rest[k + 1:], remaining) * copies
    budget = dict(remaining)
    for vertex in self._vertices(p):
      r = budget.get(vertex.kind, 0)
      if not r:
        continue
      others = list(vertex.factors)
      others.remove(p)
      new_state = tuple(sorted(rest + tuple(others)))
      new_remaining = tuple(
          (kind, count - 1 if kind == vertex.kind else count)
          for kind, count in remaining
      )
      total += pair * vertex.weight * self._raw(new_state, new_remaining) * r
    self._memo[key] = total
    return total

  def expand(
      self, word: Sequence[Factor], orders: Mapping[genpoly.TKey, int]
  ) -> GenPoly:
    """<word * prod_q W_q^{k_q}> / prod_q k_q! for k = `orders`.

    Args:
      word: The external factors.
      orders: Number of vertices of each kind.

    Returns:
      The expectation, without t-variables.
    """
    remaining = tuple(
        sorted(
            ((k, v) for k, v in orders.items() if v),
            key=lambda kv: genpoly.t_sort_key(kv[0]),
        )
    )
    raw = self._raw(tuple(sorted(word)), remaining)
    denominator = math.prod(math.factorial(v) for _, v in remaining)

    def _divide(e: genpoly.Exponents, c: genpoly.Coefficient):
      if c % denominator:
        raise exceptions.PolycorrInternalError(
            f"Pairing count {c} is not divisible by {denominator} for orders"
            f" {dict(remaining)}."
        )
      return e, Fraction(c, denominator) * self._scale ** (-e.mu)

    return raw.map_terms(_divide)

  def homogeneous(
      self,
      word: Sequence[Factor],
      kinds: Sequence[genpoly.TKey],
      num_vertices: int,
  ) -> GenPoly:
    """sum_k prod_q t_q^{k_q} expand(word, k) with sum_q k_q = num_vertices."""
    result = GenPoly.zero()
    for split in itertools.combinations_with_replacement(
        sorted(kinds, key=genpoly.t_sort_key), num_vertices
    ):
      orders = collections.Counter(split)
      value = self.expand(word, orders)
      if value:
        result += GenPoly.monomial(t=orders) * value
    return result

  def generating_function(
      self,
      word: Sequence[Factor],
      kinds: Sequence[genpoly.TKey],
      max_vertices: int,
  ) -> GenPoly:
    """The homogeneous parts of degree 0, ..., max_vertices, summed."""
    result = GenPoly.zero()
    for total in range(max_vertices + 1):
      result += self.homogeneous(word, kinds, total)
    return result


def boundary_word(boundary: Sequence[LatticePoint]) -> tuple[MatrixEntry, ...]:
  """prod_l H[p_{l+1}, p_l] for a boundary sequence p_1, ..., p_m."""
  return tuple(
      MatrixEntry(b, a) for a, b in lattice.edges_of(tuple(boundary))
  )


def cell_factors(cell: triangulations.Cell) -> tuple[MatrixEntry, ...]:
  return tuple(MatrixEntry(a, b) for a, b in lattice.edges_of(cell))


def _fan_weight(cell: triangulations.Cell) -> GenPoly:
  """prod_a x_a^{phi(a)} for the fan of `cell` from its first corner."""
  phi: dict[LatticePoint, int] = collections.defaultdict(int)
  for a, b in more_itertools.pairwise(cell[1:]):
    volume = lattice.orient2(cell[0], a, b)
    for corner in (cell[0], a, b):
      phi[corner] += volume
  return GenPoly.monomial(x=phi)


@functools.cache
def _strictly_convex_cells(
    points: frozenset[LatticePoint], max_corners: Optional[int]
) -> tuple[triangulations.Cell, ...]:
  """Every strictly convex corner cycle on `points`, from its least corner.

  Each subset of points is tried in every cyclic order; a subset in convex
  position passes in exactly one of them.
  """
  largest = len(points)
  if max_corners is not None:
    largest = min(largest, max_corners)
  cells = []
  for k in range(3, largest + 1):
    for corners in itertools.combinations(sorted(points), k):
      for order in itertools.permutations(corners[1:]):
        cycle = (corners[0],) + order
        if lattice.is_strictly_convex_cell(cycle):
          cells.append(cycle)
  logging.vlog(
      1, "%d strictly convex cells on %d points.", len(cells), len(points)
  )
  return tuple(cells)


def polygon_expander(
    points: Iterable[LatticePoint],
    max_corners: Optional[int] = None,
    deformation: bool = True,
) -> FeynmanExpander:
  """A FeynmanExpander whose vertices are the strictly convex cells on `points`.

  Each oriented cell is one vertex of kind q = corners - 2, with the monomial
  prod_l H[c_l, c_{l+1}]. The cells come from testing every ordered tuple of
  points, not from the chain search the tilings use.

  Args:
    points: Allowed corner points (the internal index set).
    max_corners: Largest cell considered.
    deformation: Attach the x-weight of each cell.

  Returns:
    The expander.
  """
  index: dict[MatrixEntry, list[Vertex]] = collections.defaultdict(list)
  for cell in _strictly_convex_cells(frozenset(points), max_corners):
    weight = _fan_weight(cell) if deformation else GenPoly.one()
    vertex = Vertex(
        kind=len(cell) - 2, factors=cell_factors(cell), weight=weight
    )
    for factor in vertex.factors:
      index[factor].append(vertex)
  return FeynmanExpander(lambda factor: index.get(factor, ()))


def polygon_kinds(
    points: Iterable[LatticePoint], max_corners: Optional[int] = None
) -> list[int]:
  """Cell kinds q that occur among the strictly convex cells on `points`."""
  cells = _strictly_convex_cells(frozenset(points), max_corners)
  return sorted({len(c) - 2 for c in cells})


def _index_points(
    polygon: lattice.LatticePolygon, spec: GaussianSpec
) -> frozenset[LatticePoint]:
  if spec.index_box is not None and not spec.index_box.covers(
      lattice.lattice_points(polygon)
  ):
    raise ValueError(
        f"Invalid index box. {spec.index_box} does not cover the polygon"
        f" {polygon.boundary}."
    )
  if spec.strict_box:
    return frozenset(spec.index_box.points())
  return lattice.lattice_points(polygon)


def correlator_wick(
    polygon: lattice.LatticePolygon,
    k: int,
    spec: Optional[GaussianSpec] = None,
    deformation: bool = True,
) -> GenPoly:
  """The beta^k coefficient of <boundary * exp(beta W)> times beta^k.

  W is the sum over admissible oriented triangles of their x-weight times
  the triangle monomial.

  Args:
    polygon: The polygon.
    k: Order in beta.
    spec: The Gaussian measure; mu stays symbolic by default.
    deformation: Attach x-weights.

  Returns:
    beta^k * <boundary * W^k> / k!.

  Raises:
    CapExceededError: If k exceeds `--polycorr_wick_max_order`.
  """
  _api_usage_counter.Increment("correlator_wick")
  spec = spec or GaussianSpec()
  cap = polycorr_config.config.wick_max_order
  if k > cap:
    raise exceptions.CapExceededError(
        f"Order {k} exceeds the Wick cap {cap} (--polycorr_wick_max_order)."
    )
  if k < 0:
    raise ValueError(f"Invalid order. Got {k}, but it must be nonnegative.")
  expander = polygon_expander(
      _index_points(polygon, spec), max_corners=3, deformation=deformation
  )
  value = expander.expand(boundary_word(polygon.boundary), {1: k})
  if spec.mu is not None:
    value = value.substitute(mu=spec.mu)
  return GenPoly.monomial(beta=k) * value


def subdivision_genfun_wick(
    boundary: Sequence[LatticePoint],
    points: Iterable[LatticePoint],
    max_cells: int,
    deformation: bool = True,
) -> GenPoly:
  """<word(boundary) * exp(sum_q t_q W_q)> up to t-degree `max_cells`.

  The boundary need not be a simple polygon.

  Args:
    boundary: The boundary sequence; its word is `boundary_word(boundary)`.
    points: The internal index set.
    max_cells: Truncation order in t.
    deformation: Attach x-weights.

  Returns:
    The truncated generating function.
  """
  _api_usage_counter.Increment("subdivision_genfun_wick")
  points = frozenset(points)
  expander = polygon_expander(points, deformation=deformation)
  return expander.generating_function(
      boundary_word(boundary), polygon_kinds(points), max_cells
  )


def _face_count(matching: Sequence[tuple[int, int]], k: int) -> int:
  involution = list(range(k))
  for a, b in matching:
    involution[a], involution[b] = b, a
  gamma = permutations.Permutation([(i + 1) % k for i in range(k)])
  return (gamma * permutations.Permutation(involution)).cycles


def _check_moment_order(k: int) -> None:
  if k < 2 or k % 2:
    raise ValueError(
        f"Invalid moment order. Got k={k}, but it must be even and"
        " positive."
    )
  cap = polycorr_config.config.hmm_max_k
  if k > cap:
    raise exceptions.CapExceededError(
        f"Moment order {k} exceeds the cap {cap} (--polycorr_hmm_max_k)."
    )


def genus_split(k: int) -> dict[int, int]:
  """Pairings of the k factors of Tr H^k, counted by the genus they glue.

  Args:
    k: Even number of half-edges.

  Returns:
    Map from genus g to the number of pairings with N-exponent 2 - 2g.
  """
  _check_moment_order(k)
  counts: dict[int, int] = collections.defaultdict(int)
  for matching in _perfect_matchings(tuple(range(k))):
    faces = _face_count(matching, k)
    euler = faces - k // 2 + 1
    counts[(2 - euler) // 2] += 1
  return dict(sorted(counts.items()))


def hmm_trace_moment(k: int, n: Optional[int] = None) -> sympy.Poly | int:
  """<N Tr H^k> of the Gaussian Hermitian model.

  The propagator is <H_ij H_kl> = d_il d_jk / N.

  Each pairing of the k factors glues a surface of Euler characteristic
  chi and contributes N^chi.

  Args:
    k: Even power.
    n: Matrix size; if None the result is a polynomial in the symbol N.

  Returns:
    A `sympy.Poly` in N, or its integer value at N = n.
  """
  _api_usage_counter.Increment("hmm_trace_moment")
  big_n = sympy.Symbol("N")
  poly = sympy.Poly(
      sum(
          (count * big_n ** (2 - 2 * g) for g, count in genus_split(k).items()),
          sympy.Integer(0),
      ),
      big_n,
  )
  if n is None:
    return poly
  return int(poly.eval(n))


def hmm_trace_moment_by_index_sum(k: int, n: int) -> Fraction:
  """<N Tr H^k> at matrix size n by explicit index sums and Wick pairings."""
  _check_moment_order(k)
  spec = GaussianSpec(variant=HERMITIAN_N, n=n)
  total = GenPoly.zero()
  for indices in itertools.product(range(n), repeat=k):
    word = [
        MatrixEntry(indices[l], indices[(l + 1) % k]) for l in range(k)
    ]
    total += wick_expectation(word, spec)
  value = (total * n).terms.get(genpoly.Exponents(), 0)
  logging.vlog(1, "<N Tr H^%d> at N=%d is %s", k, n, value)
  return Fraction(value)
