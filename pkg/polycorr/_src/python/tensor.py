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
"""Correlators of the tensor model, from tilings and from Wick pairing.

Tensor entries are oriented facets (d-tuples of lattice points up to even
permutations); a facet pairs with its reversal. An interaction vertex of kind
t_tau is a convex cell glued from the simplices of the slot tree tau, with
one factor per boundary facet oriented towards the cell. The boundary word of
a polytope uses the reversed orientation of its facets, so that boundary
factors pair with the cells inside.
"""

from __future__ import annotations

import dataclasses
import fractions
import functools
import itertools
import math
from typing import Any, Iterator, Optional, Sequence

from absl import logging
from polycorr._src.core import config as polycorr_config
from polycorr._src.core import exceptions
from polycorr._src.core import genpoly
from polycorr._src.core import lattice
from polycorr._src.core import monitoring as polycorr_monitoring
from polycorr._src.python import diffops
from polycorr._src.python import trees
from polycorr._src.python import wick
import numpy as np
import sympy
from sympy.combinatorics import permutations

from polycorr._src.core import monitoring

DiffOp = diffops.DiffOp
Fraction = fractions.Fraction
GenPoly = genpoly.GenPoly
LatticePoint = lattice.LatticePoint
Tree = trees.Tree

_api_usage_counter = monitoring.Counter(
    "/polycorr/python/tensor/api",
    metadata=monitoring.Metadata(description="Tensor model counter."),
    root=polycorr_monitoring.get_monitoring_root(),
    fields=[("name", str)],
)


def _is_even(order: Sequence[int]) -> bool:
  return permutations.Permutation(list(order)).is_even


@dataclasses.dataclass(frozen=True, order=True)
class OrientedFacet:
  """A facet up to even permutations of its points."""

  points: tuple[LatticePoint, ...]

  def __post_init__(self):
    points = tuple(self.points)
    n = len(points)
    canonical = min(
        tuple(points[i] for i in order)
        for order in itertools.permutations(range(n))
        if _is_even(order)
    )
    object.__setattr__(self, "points", canonical)

  def partner(self) -> OrientedFacet:
    p = self.points
    return OrientedFacet((p[1], p[0]) + p[2:])


def cell_factors(cell: trees.TreeCell) -> tuple[OrientedFacet, ...]:
  return tuple(sorted(OrientedFacet(f) for f in cell.facets))


def boundary_factors(
    polytope: lattice.SimplicialPolytope,
) -> tuple[OrientedFacet, ...]:
  """The boundary word: each facet of the polytope, reversed."""
  return tuple(sorted(OrientedFacet(f).partner() for f in polytope.facets))


def tree_key(tree: Tree) -> str:
  """The t-variable of a tree; marks are ignored."""
  return trees.tree_canonical_form(tree.unmarked())


@dataclasses.dataclass(frozen=True)
class TensorPropagator:
  """<T_F T_F'> for a facet F and its reversal F'.

  Attributes:
    d: Dimension.
    value: The pairing value in units of 1/mu.
    numeric: The same value from a numerical Gaussian average at mu = 1.
  """

  d: int
  value: Fraction
  numeric: float


@functools.cache
def tensor_propagator(d: int) -> TensorPropagator:
  """Inverts the quadratic form -(mu/2) sum T_{i1 i2 i3..} T_{i2 i1 i3..}.

  Entries whose indices differ by an adjacent transposition are complex
  conjugates, so every even ordering of a facet carries one variable z and
  every odd ordering carries its conjugate. The form collapses to -c |z|^2
  and the propagator is 1/c.

  Args:
    d: Dimension, at least 2.

  Returns:
    The propagator, checked against a numerical Gaussian average.

  Raises:
    PolycorrInternalError: If the form is not diagonal in (z, conj z) or the
      numerical check disagrees.
  """
  if d < 2:
    raise ValueError(f"Invalid tensor dimension. Got d={d}, but d >= 2.")
  z, zbar, mu = sympy.symbols("z zbar mu", positive=True)
  form = sympy.Integer(0)
  for order in itertools.permutations(range(d)):
    swapped = (order[1], order[0]) + order[2:]
    left = z if _is_even(order) else zbar
    right = z if _is_even(swapped) else zbar
    form += left * right
  form = sympy.expand(-mu / 2 * form)
  poly = sympy.Poly(form, z, zbar)
  if poly.coeff_monomial(z**2) or poly.coeff_monomial(zbar**2):
    raise exceptions.PolycorrInternalError(
        f"Quadratic form {form} is not diagonal in (z, conj z)."
    )
  c = -poly.coeff_monomial(z * zbar)
  value = sympy.Rational(sympy.simplify(mu / c))
  value = Fraction(int(value.p), int(value.q))

  # A Riemann sum of the Gaussian on a fine grid at mu = 1.
  c_numeric = float(c.subs(mu, 1))
  half_width = 8.0 / math.sqrt(c_numeric)
  axis = np.linspace(-half_width, half_width, 801)
  x, y = np.meshgrid(axis, axis)
  r2 = x**2 + y**2
  weights = np.exp(-c_numeric * r2)
  numeric = float(np.sum(r2 * weights) / np.sum(weights))
  if not math.isclose(numeric, float(value), rel_tol=1e-6):
    raise exceptions.PolycorrInternalError(
        f"Propagator {value} disagrees with the Gaussian average {numeric}."
    )
  logging.vlog(1, "Tensor propagator d=%d: %s/mu", d, value)
  return TensorPropagator(d=d, value=value, numeric=numeric)


@dataclasses.dataclass(frozen=True)
class TensorCorrelator:
  """The tiling sum of a polytope.

  Attributes:
    polytope: The target polytope.
    value: Polynomial in mu and the tree variables t_tau.
    num_tilings: Number of tilings by tree cells.
    trees: Tree variables that occur among the cells.
    bound: Largest number of simplices per cell.
  """

  polytope: lattice.SimplicialPolytope
  value: GenPoly
  num_tilings: int
  trees: tuple[str, ...]
  bound: int

  def to_json(self) -> dict[str, Any]:
    return {
        "polytope": self.polytope.to_json(),
        "terms": self.value.to_json(),
        "tilings": self.num_tilings,
        "trees": list(self.trees),
        "bound": self.bound,
    }


def _check_bound(bound: Optional[int]) -> int:
  cap = polycorr_config.config.tree_bound
  if bound is None:
    return cap
  if bound > cap:
    raise exceptions.CapExceededError(
        f"Tree bound {bound} exceeds the cap {cap} (--polycorr_tree_bound)."
    )
  return bound


def _cells(
    polytope: lattice.SimplicialPolytope, bound: int
) -> list[trees.TreeCell]:
  return trees.enumerate_tree_cells(lattice.lattice_points(polytope), bound)


def _tilings(
    boundary: Sequence[OrientedFacet],
    cells: Sequence[trees.TreeCell],
) -> Iterator[tuple[int, ...]]:
  """Sets of cells whose facets cancel against each other and the boundary."""
  factors = [cell_factors(c) for c in cells]
  by_factor: dict[OrientedFacet, list[int]] = {}
  for i, fs in enumerate(factors):
    for f in fs:
      by_factor.setdefault(f, []).append(i)

  def search(
      frontier: frozenset[OrientedFacet], used: tuple[int, ...]
  ) -> Iterator[tuple[int, ...]]:
    if not frontier:
      yield used
      return
    f = min(frontier)
    inside = f.partner()
    for i in by_factor.get(inside, ()):
      if i in used:
        continue
      new = set(frontier)
      new.remove(f)
      clash = False
      for g in factors[i]:
        if g == inside:
          continue
        if g.partner() in new:
          new.remove(g.partner())
        elif g in new:
          clash = True
          break
        else:
          new.add(g)
      if not clash:
        yield from search(frozenset(new), used + (i,))

  yield from search(frozenset(boundary), ())


def correlator_tensor_direct(
    polytope: lattice.SimplicialPolytope, bound: Optional[int] = None
) -> TensorCorrelator:
  """Sums the tilings of a polytope by tree cells.

  A tiling contributes prod_cells (sum of t_tau over the trees realising the
  cell) times (g / mu)^F, with F the number of facets of the tiling (boundary
  included) and g the tensor propagator.

  Args:
    polytope: The polytope.
    bound: Largest number of simplices per cell. Defaults to the cap.

  Returns:
    The correlator.
  """
  _api_usage_counter.Increment("correlator_tensor_direct")
  bound = _check_bound(bound)
  scale = tensor_propagator(polytope.d).value
  cells = _cells(polytope, bound)
  boundary = boundary_factors(polytope)
  value = GenPoly.zero()
  count = 0
  for tiling in _tilings(boundary, cells):
    count += 1
    num_facets = (
        len(boundary) + sum(len(cells[i].facets) for i in tiling)
    ) // 2
    term = GenPoly.monomial(scale**num_facets, mu=-num_facets)
    for i in tiling:
      weight = GenPoly.zero()
      for key in cells[i].trees:
        weight += GenPoly.monomial(t={key: 1})
      term *= weight
    value += term
  logging.info(
      "Tensor correlator of %s: %d tilings by %d cells.",
      lattice.canonical_key(polytope),
      count,
      len(cells),
  )
  return TensorCorrelator(
      polytope=polytope,
      value=value,
      num_tilings=count,
      trees=tuple(sorted({k for c in cells for k in c.trees})),
      bound=bound,
  )


def tensor_expander(
    cells: Sequence[trees.TreeCell], scale: Fraction
) -> wick.FeynmanExpander:
  """A FeynmanExpander with one vertex per (cell, realising tree)."""
  index: dict[OrientedFacet, list[wick.Vertex]] = {}
  for cell in cells:
    factors = cell_factors(cell)
    for key in cell.trees:
      vertex = wick.Vertex(kind=key, factors=factors, weight=GenPoly.one())
      for f in factors:
        index.setdefault(f, []).append(vertex)
  return wick.FeynmanExpander(lambda f: index.get(f, ()), scale=scale)


def correlator_tensor_wick(
    polytope: lattice.SimplicialPolytope,
    order: int,
    bound: Optional[int] = None,
) -> GenPoly:
  """The order-k part of <boundary * exp(sum_tau t_tau W_tau)> by pairing.

  Args:
    polytope: The polytope.
    order: Number of interaction vertices k.
    bound: Largest number of simplices per cell.

  Returns:
    The homogeneous degree-k part in the tree variables.

  Raises:
    CapExceededError: If k exceeds `--polycorr_wick_max_order`.
  """
  _api_usage_counter.Increment("correlator_tensor_wick")
  cap = polycorr_config.config.wick_max_order
  if order > cap:
    raise exceptions.CapExceededError(
        f"Order {order} exceeds the cap {cap} (--polycorr_wick_max_order)."
    )
  bound = _check_bound(bound)
  cells = _cells(polytope, bound)
  kinds = sorted({k for c in cells for k in c.trees})
  expander = tensor_expander(cells, tensor_propagator(polytope.d).value)
  return expander.homogeneous(boundary_factors(polytope), kinds, order)


@functools.cache
def _trees_upto(d: int, max_vertices: int) -> tuple[Tree, ...]:
  if max_vertices < 1:
    return ()
  return tuple(trees.enumerate_trees(d, max_vertices))


def _tree_size(key: genpoly.TKey) -> int:
  # One bracket pair per vertex in a canonical form.
  return str(key).count("(")


def marked_key(tree: Tree, marked: trees.Slot) -> str:
  return trees.tree_canonical_form(
      dataclasses.replace(tree, marked=tuple(marked))
  )


def slot_weights(
    cell: trees.TreeCell, tree: Tree, marked: trees.Slot
) -> dict[OrientedFacet, Fraction]:
  """Where the marked slot of (tau, v) lands on the boundary of a cell.

  Every placement of tau onto a decomposition of the cell puts slot v on one
  unshared facet; a facet is weighted by its share of those placements.

  Args:
    cell: A cell realised by tau.
    tree: The tree tau.
    marked: Its marked open edge v.

  Returns:
    Weights summing to 1, or an empty dict if tau does not realise the cell.
  """
  form = marked_key(tree, marked)
  counts: dict[OrientedFacet, int] = {}
  for decomposition in cell.decompositions:
    for (key, facet), n in trees.marked_slot_facets(decomposition).items():
      if key == form:
        f = OrientedFacet(facet)
        counts[f] = counts.get(f, 0) + n
  total = sum(counts.values())
  return {f: Fraction(n, total) for f, n in sorted(counts.items())}


@dataclasses.dataclass(frozen=True)
class _WardContext:
  cells: tuple[trees.TreeCell, ...]
  factors: tuple[tuple[OrientedFacet, ...], ...]
  kinds: tuple[str, ...]
  word: tuple[OrientedFacet, ...]
  expander: wick.FeynmanExpander


@functools.cache
def _ward_context(
    polytope: lattice.SimplicialPolytope, bound: int
) -> _WardContext:
  cells = tuple(_cells(polytope, bound))
  return _WardContext(
      cells=cells,
      factors=tuple(cell_factors(c) for c in cells),
      kinds=tuple(sorted({k for c in cells for k in c.trees})),
      word=boundary_factors(polytope),
      expander=tensor_expander(cells, tensor_propagator(polytope.d).value),
  )


@functools.cache
def _insertions(
    polytope: lattice.SimplicialPolytope,
    bound: int,
    tree: Tree,
    marked: trees.Slot,
    order: int,
) -> tuple[GenPoly, GenPoly]:
  """Gluing and boundary insertions of (tau, v) into <boundary>, to `order`.

  For a tau-cell c with the marked slot on facet F, the gluing part opens a
  cell V containing the reversal F' and inserts t_V (c - F)(V - F'); the
  boundary part removes F' from the boundary word and inserts c - F.

  Returns:
    The pair (gluing part, boundary part), both truncated at `order`.
  """
  context = _ward_context(polytope, bound)
  key = tree_key(tree)
  gluing = GenPoly.zero()
  boundary = GenPoly.zero()
  for cell, factors in zip(context.cells, context.factors):
    if key not in cell.trees:
      continue
    for facet, weight in slot_weights(cell, tree, marked).items():
      others = tuple(f for f in factors if f != facet)
      target = facet.partner()
      if target in context.word:
        rest = list(context.word)
        rest.remove(target)
        boundary += GenPoly.monomial(weight) * (
            context.expander.generating_function(
                tuple(rest) + others, context.kinds, order
            )
        )
      if order < 1:
        continue
      for other, other_factors in zip(context.cells, context.factors):
        if target not in other_factors:
          continue
        value = context.expander.generating_function(
            context.word
            + others
            + tuple(f for f in other_factors if f != target),
            context.kinds,
            order - 1,
        )
        for kind in other.trees:
          gluing += GenPoly.monomial(weight, t={kind: 1}) * value
  return gluing.truncate_t(order), boundary.truncate_t(order)


@functools.cache
def _differential(tree: Tree, marked: trees.Slot, window: int) -> DiffOp:
  scale = tensor_propagator(tree.d).value
  op = DiffOp.term(-1 / scale, d={tree_key(tree): 1}, mu=1)
  for sigma in _trees_upto(tree.d, window - tree.num_vertices):
    sigma_key = tree_key(sigma)
    for e in sigma.open_edges():
      glued = trees.glue_tree(sigma, e, tree, marked)
      op += DiffOp.term(t={sigma_key: 1}, d={tree_key(glued): 1})
  return op


@functools.cache
def _apply_differential(
    tree: Tree, marked: trees.Slot, poly: GenPoly
) -> GenPoly:
  window = max([tree.num_vertices] + [_tree_size(k) for k in poly.t_keys()])
  return _differential(tree, marked, window).apply(poly)


@dataclasses.dataclass(frozen=True)
class TensorLOperator:
  """The tree operator L_(tau, v).

  L_(tau, v) = -(mu/g) d_tau + sum_sigma sum_e t_sigma d_{sigma#_e(tau, v)}
  + I_(tau, v), with g the tensor propagator.

  The first two parts form a vector field in the tree variables. I_(tau, v)
  glues a tau-cell along slot v to the boundary of the polytope; it only acts
  on tiling correlators, through their boundary word.

  Attributes:
    tree: The tree tau, unmarked.
    marked: Its marked open edge v.
  """

  tree: Tree
  marked: trees.Slot

  def __post_init__(self):
    object.__setattr__(self, "tree", self.tree.unmarked())
    marked = (int(self.marked[0]), int(self.marked[1]))
    object.__setattr__(self, "marked", marked)
    if marked not in self.tree.open_edges():
      raise exceptions.SchemaError(f"Marked edge {marked} is not open.")

  @property
  def key(self) -> str:
    return tree_key(self.tree)

  def differential(self, window: int) -> DiffOp:
    """The vector field part, with sigma kept within `window` vertices."""
    if window < self.tree.num_vertices:
      raise exceptions.WindowTooSmallError(
          f"Window {window} cannot hold a tree with {self.tree.num_vertices}"
          " vertices."
      )
    return _differential(self.tree, self.marked, window)

  def apply_differential(self, poly: GenPoly) -> GenPoly:
    """The vector field part on `poly`, exact for every tree in `poly`."""
    return _apply_differential(self.tree, self.marked, poly)

  def ward_residual(
      self, correlator: TensorCorrelator, order: Optional[int] = None
  ) -> GenPoly:
    """L_(tau, v) on a tiling correlator, to t-degree `order`.

    -(mu/g) d_tau acts on the correlator's value. The gluing part and I_(tau,
    v) act by inserting cells into its boundary word and pairing the result,
    with the cells of the correlator. A correlator that really sums the
    tilings of its polytope is annihilated.

    Args:
      correlator: A tensor correlator.
      order: Largest t-degree kept. Defaults to one below the degree of the
        correlator, the highest degree its value determines.

    Returns:
      The residual, zero for a genuine correlator.

    Raises:
      CapExceededError: If `order` exceeds `--polycorr_wick_max_order`.
    """
    _api_usage_counter.Increment("ward_residual")
    z = correlator.value
    if order is None:
      order = 0 if z.is_zero() else max(z.t_degree() - 1, 0)
    cap = polycorr_config.config.wick_max_order
    if order > cap:
      raise exceptions.CapExceededError(
          f"Order {order} exceeds the cap {cap} (--polycorr_wick_max_order)."
      )
    scale = tensor_propagator(self.tree.d).value
    residual = GenPoly.monomial(-1 / scale, mu=1) * z.derivative_t(self.key)
    if self.key in correlator.trees:
      gluing, boundary = _insertions(
          correlator.polytope,
          correlator.bound,
          self.tree,
          self.marked,
          order,
      )
      residual += gluing + boundary
    return residual.truncate_t(order)


def tensor_l_operator(tree: Tree, marked: trees.Slot) -> TensorLOperator:
  return TensorLOperator(tree=tree, marked=marked)


def virasoro_like_check(
    t1: Tree,
    v1: trees.Slot,
    t2: Tree,
    v2: trees.Slot,
    fixtures: Sequence[TensorCorrelator],
    order: Optional[int] = None,
) -> bool:
  """Checks the tree commutator identity on fixture correlators.

  [L_(t1,v1), L_(t2,v2)] must equal
  sum L_(t1#(t2,v2)|v1) - sum L_(t2#(t1,v1)|v2).

  On each fixture the vector field parts of both sides must agree, and every
  operator involved must annihilate the fixture once I_(tau, v) is added.

  Args:
    t1: First tree.
    v1: Its marked edge.
    t2: Second tree.
    v2: Its marked edge.
    fixtures: Tiling correlators.
    order: Largest t-degree of the annihilation check; see
      `TensorLOperator.ward_residual`.

  Returns:
    True iff both conditions hold on every fixture.
  """
  _api_usage_counter.Increment("virasoro_like_check")
  first = tensor_l_operator(t1, v1)
  second = tensor_l_operator(t2, v2)
  plus = [
      tensor_l_operator(rho, rho.marked)
      for rho in trees.tree_gluing_set(t1, v1, t2, v2)
  ]
  minus = [
      tensor_l_operator(rho, rho.marked)
      for rho in trees.tree_gluing_set(t2, v2, t1, v1)
  ]
  for correlator in fixtures:
    z = correlator.value
    lhs = first.apply_differential(
        second.apply_differential(z)
    ) - second.apply_differential(first.apply_differential(z))
    rhs = GenPoly.zero()
    for op in plus:
      rhs += op.apply_differential(z)
    for op in minus:
      rhs -= op.apply_differential(z)
    if lhs != rhs:
      logging.info(
          "Tree commutator fails for %s/%s and %s/%s.",
          tree_key(t1), v1, tree_key(t2), v2,
      )
      return False
    for op in [first, second] + plus + minus:
      residual = op.ward_residual(correlator, order)
      if not residual.is_zero():
        logging.info(
            "L_(%s, %s) does not annihilate the correlator of %s: %s",
            op.key,
            op.marked,
            lattice.canonical_key(correlator.polytope),
            residual,
        )
        return False
  return True


def bipyramid() -> lattice.SimplicialPolytope:
  """The bipyramid over the triangle e1, e2, e3 with apexes 0 and (1, 1, 1)."""
  return lattice.SimplicialPolytope.from_vertices(
      [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]
  )


def unit_tetrahedron() -> lattice.SimplicialPolytope:
  return lattice.SimplicialPolytope.from_vertices(
      [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
  )
