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
"""Slot-numbered trees and the convex polytopes glued from their simplices.

A tree of valence d + 1 has vertices with slots 0..d. An internal edge joins
slot s of vertex v to slot s' of vertex w; every other slot is an open edge.
A placement sends vertex v to an ordered simplex (p_0, ..., p_d), and slot j
names the facet opposite p_j, so an internal edge glues two simplices along a
common facet.
"""

from __future__ import annotations

import dataclasses
import functools
import itertools
import json
from typing import Any, Iterable, Mapping, Optional, Sequence

from absl import logging
from polycorr._src.core import config as polycorr_config
from polycorr._src.core import exceptions
from polycorr._src.core import lattice
from polycorr._src.core import monitoring as polycorr_monitoring
from polycorr._src.core import simplex_lp
import networkx as nx

from polycorr._src.core import monitoring

LatticePoint = lattice.LatticePoint
Slot = tuple[int, int]
Edge = tuple[int, int, int, int]
Simplex = frozenset[LatticePoint]
Facet = tuple[LatticePoint, ...]

_api_usage_counter = monitoring.Counter(
    "/polycorr/python/trees/api",
    metadata=monitoring.Metadata(description="Slot tree counter."),
    root=polycorr_monitoring.get_monitoring_root(),
    fields=[("name", str)],
)


def _normalize_edge(edge: Sequence[int]) -> Edge:
  v, s, w, t = (int(x) for x in edge)
  return (v, s, w, t) if (v, s) <= (w, t) else (w, t, v, s)


@dataclasses.dataclass(frozen=True)
class Tree:
  """A connected acyclic slot tree.

  Attributes:
    d: Dimension; every vertex has d + 1 slots.
    num_vertices: Number of vertices, numbered from 0.
    edges: Internal edges (v, s, w, s').
    marked: An optional marked open edge (v, s).
  """

  d: int
  num_vertices: int
  edges: tuple[Edge, ...] = ()
  marked: Optional[Slot] = None

  def __post_init__(self):
    edges = tuple(sorted(_normalize_edge(e) for e in self.edges))
    object.__setattr__(self, "edges", edges)
    if self.d < 1 or self.num_vertices < 1:
      raise exceptions.SchemaError(
          f"A tree needs d >= 1 and at least one vertex, got d={self.d},"
          f" {self.num_vertices} vertices."
      )
    used = set()
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(self.num_vertices))
    for v, s, w, t in edges:
      for vertex, slot in ((v, s), (w, t)):
        if not 0 <= vertex < self.num_vertices or not 0 <= slot <= self.d:
          raise exceptions.SchemaError(
              f"Edge {(v, s, w, t)} leaves the tree's vertices or slots."
          )
        if (vertex, slot) in used:
          raise exceptions.SchemaError(
              f"Slot {slot} of vertex {vertex} is used twice."
          )
        used.add((vertex, slot))
      if v == w:
        raise exceptions.SchemaError(f"Edge {(v, s, w, t)} is a loop.")
      graph.add_edge(v, w)
    if not nx.is_tree(graph):
      raise exceptions.SchemaError(f"Edges {edges} do not form a tree.")
    if self.marked is not None:
      marked = (int(self.marked[0]), int(self.marked[1]))
      object.__setattr__(self, "marked", marked)
      if marked not in self.open_edges():
        raise exceptions.SchemaError(f"Marked edge {marked} is not open.")

  def open_edges(self) -> list[Slot]:
    used = {(v, s) for v, s, _, _ in self.edges} | {
        (w, t) for _, _, w, t in self.edges
    }
    return [
        (v, s)
        for v in range(self.num_vertices)
        for s in range(self.d + 1)
        if (v, s) not in used
    ]

  def neighbor(self, v: int, s: int) -> Optional[Slot]:
    for a, b, c, e in self.edges:
      if (a, b) == (v, s):
        return (c, e)
      if (c, e) == (v, s):
        return (a, b)
    return None

  def unmarked(self) -> Tree:
    return dataclasses.replace(self, marked=None)

  def to_json(self) -> dict[str, Any]:
    return {
        "d": self.d,
        "vertices": self.num_vertices,
        "edges": [list(e) for e in self.edges],
        "marked": list(self.marked) if self.marked is not None else None,
    }

  @classmethod
  def from_json(cls, obj: Any) -> Tree:
    if not isinstance(obj, dict) or not {"d", "vertices"} <= obj.keys():
      raise exceptions.SchemaError(
          f"Tree JSON must have 'd' and 'vertices' keys, got {obj!r}."
      )
    try:
      edges = tuple(tuple(e) for e in obj.get("edges", []))
      if any(len(e) != 4 for e in edges):
        raise exceptions.SchemaError(f"Tree edges must be 4-tuples: {edges}.")
      marked = obj.get("marked")
      return cls(
          d=int(obj["d"]),
          num_vertices=int(obj["vertices"]),
          edges=edges,
          marked=tuple(marked) if marked is not None else None,
      )
    except exceptions.SchemaError:
      raise
    except (TypeError, ValueError) as e:
      raise exceptions.SchemaError(f"Malformed tree JSON {obj!r}: {e}") from e


def single_vertex(d: int, marked: Optional[int] = None) -> Tree:
  """The one-vertex tree, optionally marked at one of its slots."""
  return Tree(
      d=d, num_vertices=1, marked=None if marked is None else (0, marked)
  )


def _code(tree: Tree, v: int, entry: int) -> str:
  parts = []
  for s in range(tree.d + 1):
    if s == entry:
      parts.append("^")
      continue
    other = tree.neighbor(v, s)
    parts.append("." if other is None else _code(tree, *other))
  return "(" + "".join(parts) + ")"


def tree_canonical_form(tree: Tree) -> str:
  """A string equal for two trees iff they are isomorphic as slot trees.

  Each open edge roots a coding that walks the tree in slot order; the form is
  the least of them. A marked tree is coded from its marked edge only.

  Args:
    tree: The tree.

  Returns:
    The canonical string, prefixed by the dimension.
  """
  if tree.marked is not None:
    return f"d{tree.d}*" + _code(tree, *tree.marked)
  return f"d{tree.d}:" + min(_code(tree, v, s) for v, s in tree.open_edges())


def glue_tree(t1: Tree, e1: Slot, t2: Tree, e2: Slot) -> Tree:
  """Glues open edge e1 of t1 to open edge e2 of t2.

  The vertices of t2 are renumbered after those of t1. The mark of t1
  survives unless it is e1; the mark of t2 is dropped.

  Args:
    t1: First tree.
    e1: An open edge of t1.
    t2: Second tree.
    e2: An open edge of t2.

  Returns:
    The glued tree.
  """
  if t1.d != t2.d:
    raise ValueError(f"Cannot glue trees of dimensions {t1.d} and {t2.d}.")
  e1, e2 = tuple(e1), tuple(e2)
  if e1 not in t1.open_edges():
    raise ValueError(f"Edge {e1} is not open in the first tree.")
  if e2 not in t2.open_edges():
    raise ValueError(f"Edge {e2} is not open in the second tree.")
  offset = t1.num_vertices
  shifted = tuple((v + offset, s, w + offset, t) for v, s, w, t in t2.edges)
  marked = t1.marked if t1.marked != e1 else None
  return Tree(
      d=t1.d,
      num_vertices=t1.num_vertices + t2.num_vertices,
      edges=t1.edges + shifted + ((e1[0], e1[1], e2[0] + offset, e2[1]),),
      marked=marked,
  )


def tree_gluing_set(t1: Tree, v1: Slot, t2: Tree, v2: Slot) -> list[Tree]:
  """Trees from gluing (t2, v2) to every open edge of t1 other than v1.

  Each result is marked at v1. There is one entry per open edge of t1, so
  isomorphic results repeat.
  """
  v1, v2 = tuple(v1), tuple(v2)
  if v1 not in t1.open_edges() or v2 not in t2.open_edges():
    raise ValueError(f"Marked edges {v1}, {v2} must be open in their trees.")
  t1 = dataclasses.replace(t1, marked=v1)
  results = [glue_tree(t1, e, t2, v2) for e in t1.open_edges() if e != v1]
  if not results:
    raise exceptions.PolycorrInternalError(
        f"Tree {t1} has no open edge besides {v1}."
    )
  return results


def enumerate_trees(d: int, max_vertices: int) -> list[Tree]:
  """One representative per isomorphism class, up to max_vertices vertices."""
  _api_usage_counter.Increment("enumerate_trees")
  leaf = single_vertex(d)
  level = {tree_canonical_form(leaf): leaf}
  found = dict(level)
  for _ in range(max_vertices - 1):
    grown = {}
    for tree in level.values():
      for e in tree.open_edges():
        for s in range(d + 1):
          new = glue_tree(tree, e, leaf, (0, s))
          grown.setdefault(tree_canonical_form(new), new)
    level = grown
    found.update(grown)
  logging.info("Enumerated %d slot trees with d=%d, <= %d vertices.",
               len(found), d, max_vertices)
  return sorted(found.values(), key=lambda t: (t.num_vertices,
                                               tree_canonical_form(t)))


def omega_simplex(points: Sequence[LatticePoint]) -> int:
  """1 for a positively oriented simplex, else 0."""
  return 1 if lattice.orient_d(*points) > 0 else 0


def facet_opposite(simplex: Sequence[LatticePoint], slot: int) -> Facet:
  return tuple(simplex[:slot]) + tuple(simplex[slot + 1:])


def inward_facet(facet: Iterable[LatticePoint], apex: LatticePoint) -> Facet:
  """Sorted facet, with its first two points swapped if needed to face apex."""
  facet = tuple(sorted(facet))
  if lattice.orient_d(apex, *facet) < 0:
    facet = (facet[1], facet[0]) + facet[2:]
  return facet


def _boundary(
    simplices: Iterable[Simplex],
) -> Optional[list[tuple[Facet, LatticePoint]]]:
  """Unshared facets facing their simplex, or None if a facet is overfull."""
  counts: dict[frozenset[LatticePoint], list[LatticePoint]] = {}
  for simplex in simplices:
    for p in simplex:
      counts.setdefault(simplex - {p}, []).append(p)
  if any(len(apexes) > 2 for apexes in counts.values()):
    return None
  return sorted(
      (inward_facet(facet, apexes[0]), apexes[0])
      for facet, apexes in counts.items()
      if len(apexes) == 1
  )


def _is_hull_vertex(v: LatticePoint, others: Sequence[LatticePoint]) -> bool:
  if not others:
    return True
  d = len(v)
  a_eq = [[p[i] for p in others] for i in range(d)] + [[1] * len(others)]
  b_eq = list(v) + [1]
  return simplex_lp.find_nonnegative_solution(a_eq, b_eq) is None


def is_convex_union(simplices: Iterable[Simplex]) -> bool:
  """Whether non-degenerate simplices tile a convex polytope.

  The test is exact: every unshared facet must support all vertices, the
  volume enclosed by the unshared facets must equal the summed simplex
  volumes, and every vertex must be a vertex of the hull.

  Args:
    simplices: Simplices given as point sets.

  Returns:
    True iff the union is convex and the simplices do not overlap.
  """
  simplices = list(simplices)
  volumes = [lattice.normalized_volume(sorted(s)) for s in simplices]
  if not simplices or not all(volumes):
    return False
  boundary = _boundary(simplices)
  if boundary is None:
    return False
  vertices = sorted(set().union(*simplices))
  for facet, _ in boundary:
    if any(lattice.orient_d(v, *facet) < 0 for v in vertices):
      return False
  apex = vertices[0]
  enclosed = sum(
      lattice.orient_d(apex, *facet)
      for facet, _ in boundary
      if apex not in facet
  )
  if enclosed != sum(volumes):
    return False
  return all(
      _is_hull_vertex(v, [u for u in vertices if u != v]) for v in vertices
  )


def _check_placement(
    tree: Tree, placement: Mapping[int, Sequence[LatticePoint]]
) -> list[tuple[LatticePoint, ...]]:
  simplices = []
  for v in range(tree.num_vertices):
    if v not in placement:
      raise ValueError(f"Placement misses vertex {v}.")
    simplex = tuple(lattice.as_point(p, tree.d) for p in placement[v])
    if len(simplex) != tree.d + 1:
      raise ValueError(
          f"Vertex {v} needs {tree.d + 1} points, got {len(simplex)}."
      )
    if lattice.orient_d(*simplex) == 0:
      raise ValueError(f"Vertex {v} is placed on a degenerate simplex.")
    simplices.append(simplex)
  for v, s, w, t in tree.edges:
    if set(facet_opposite(simplices[v], s)) != set(
        facet_opposite(simplices[w], t)
    ):
      raise ValueError(
          f"Placement is inconsistent along edge {(v, s, w, t)}: the facets"
          " differ."
      )
  return simplices


def _buildable(tree: Tree, simplices: Sequence[Simplex]) -> bool:
  """Whether some order of single gluings keeps every partial union convex."""
  adjacency: dict[int, set[int]] = {v: set() for v in range(tree.num_vertices)}
  for v, _, w, _ in tree.edges:
    adjacency[v].add(w)
    adjacency[w].add(v)
  full = frozenset(range(tree.num_vertices))

  @functools.cache
  def grow(done: frozenset[int]) -> bool:
    if done == full:
      return True
    frontier = set().union(*(adjacency[v] for v in done)) - done
    for w in sorted(frontier):
      nxt = done | {w}
      if is_convex_union(simplices[u] for u in nxt) and grow(nxt):
        return True
    return False

  return any(grow(frozenset([v])) for v in range(tree.num_vertices))


def polytope_of_tree(
    tree: Tree, placement: Mapping[int, Sequence[LatticePoint]]
) -> Optional[lattice.SimplicialPolytope]:
  """The convex polytope glued from a placed tree, or None if rejected.

  Args:
    tree: The tree.
    placement: Vertex -> ordered simplex.

  Returns:
    The union with its boundary complex, or None when two glued simplices lie
    on the same side of their facet or no gluing order keeps the partial
    unions convex.

  Raises:
    ValueError: If the placement is incomplete, degenerate or inconsistent.
  """
  ordered = _check_placement(tree, placement)
  for v, s, w, t in tree.edges:
    facet = facet_opposite(ordered[v], s)
    if (lattice.orient_d(ordered[v][s], *facet) > 0) == (
        lattice.orient_d(ordered[w][t], *facet) > 0
    ):
      return None
  simplices = [frozenset(s) for s in ordered]
  if len(set(simplices)) != len(simplices) or not _buildable(tree, simplices):
    return None
  boundary = _boundary(simplices)
  return lattice.SimplicialPolytope(
      d=tree.d,
      vertices=frozenset().union(*simplices),
      facets=tuple(facet for facet, _ in boundary),
  )


def tree_potential_weight(
    tree: Tree, placement: Mapping[int, Sequence[LatticePoint]]
) -> int:
  """Product of omega_simplex over vertices, or 0 for a rejected polytope."""
  ordered = _check_placement(tree, placement)
  if not all(omega_simplex(s) for s in ordered):
    return 0
  return 1 if polytope_of_tree(tree, placement) is not None else 0


@dataclasses.dataclass(frozen=True)
class TreeCell:
  """A convex cell together with the slot trees that realise it.

  Attributes:
    facets: Unshared facets, each oriented towards the cell.
    vertices: The cell's vertices.
    trees: Canonical forms of the realising trees.
    num_simplices: Number of simplices of a realisation.
    decompositions: The simplices of each realisation, as sorted point tuples.
  """

  facets: tuple[Facet, ...]
  vertices: frozenset[LatticePoint]
  trees: tuple[str, ...]
  num_simplices: int
  decompositions: tuple[tuple[tuple[LatticePoint, ...], ...], ...] = ()

  def volume(self) -> int:
    apex = min(self.vertices)
    return sum(
        lattice.orient_d(apex, *f) for f in self.facets if apex not in f
    )


def _slot_maps(
    simplex: Simplex, glued: Sequence[frozenset[LatticePoint]]
) -> set[tuple[int, ...]]:
  """Slots the glued facets can take over positively ordered corners."""
  maps = set()
  for order in itertools.permutations(sorted(simplex)):
    if lattice.orient_d(*order) <= 0:
      continue
    maps.add(tuple(order.index(next(iter(simplex - f))) for f in glued))
  return maps


def realising_trees(simplices: Sequence[Simplex]) -> set[str]:
  """Canonical forms of all slot trees placing onto these simplices."""
  simplices = list(simplices)
  d = len(next(iter(simplices[0]))) if simplices else 0
  glued_pairs = [
      (i, j, simplices[i] & simplices[j])
      for i, j in itertools.combinations(range(len(simplices)), 2)
      if len(simplices[i] & simplices[j]) == d
  ]
  per_simplex = []
  for i, simplex in enumerate(simplices):
    glued = [f for a, b, f in glued_pairs if i in (a, b)]
    per_simplex.append(sorted(_slot_maps(simplex, glued)))
  forms = set()
  for choice in itertools.product(*per_simplex):
    used = [0] * len(simplices)
    edges = []
    for a, b, _ in glued_pairs:
      edges.append((a, choice[a][used[a]], b, choice[b][used[b]]))
      used[a] += 1
      used[b] += 1
    forms.add(
        tree_canonical_form(
            Tree(d=d, num_vertices=len(simplices), edges=tuple(edges))
        )
    )
  return forms


@functools.cache
def marked_slot_facets(
    simplices: tuple[tuple[LatticePoint, ...], ...],
) -> dict[tuple[str, Facet], int]:
  """Counts placements by (marked tree, facet under the marked slot).

  Every positively ordered placement of a slot tree onto `simplices` is
  visited once per open slot; the slot marks the tree and names the unshared
  facet it sits on, oriented towards its simplex.

  Args:
    simplices: A tree cell decomposition, each simplex as a point tuple.

  Returns:
    Placement counts keyed by marked canonical form and facet.
  """
  sets = [frozenset(s) for s in simplices]
  d = len(simplices[0][0])
  glued_pairs = [
      (i, j, sets[i] & sets[j])
      for i, j in itertools.combinations(range(len(sets)), 2)
      if len(sets[i] & sets[j]) == d
  ]
  orders = [
      [o for o in itertools.permutations(sorted(s)) if lattice.orient_d(*o) > 0]
      for s in sets
  ]
  counts: dict[tuple[str, Facet], int] = {}
  for choice in itertools.product(*orders):
    edges = tuple(
        (
            i,
            choice[i].index(next(iter(sets[i] - shared))),
            j,
            choice[j].index(next(iter(sets[j] - shared))),
        )
        for i, j, shared in glued_pairs
    )
    tree = Tree(d=d, num_vertices=len(sets), edges=edges)
    for v, s in tree.open_edges():
      facet = inward_facet(facet_opposite(choice[v], s), choice[v][s])
      key = (f"d{d}*" + _code(tree, v, s), facet)
      counts[key] = counts.get(key, 0) + 1
  return counts


def _extensions(
    state: frozenset[Simplex], points: Sequence[LatticePoint]
) -> Iterable[frozenset[Simplex]]:
  boundary = _boundary(state)
  facet_sets = {}
  for simplex in state:
    for p in simplex:
      facet_sets[simplex - {p}] = facet_sets.get(simplex - {p}, 0) + 1
  for facet, _ in boundary:
    for q in points:
      if lattice.orient_d(q, *facet) >= 0:
        continue
      new = frozenset(facet) | {q}
      if any(new - {p} in facet_sets for p in new if p != q) or new in state:
        continue
      yield state | {new}


def enumerate_tree_cells(
    points: Iterable[LatticePoint], bound: Optional[int] = None
) -> list[TreeCell]:
  """All convex cells on `points` glued from at most `bound` simplices.

  A cell is built by gluing one simplex at a time across an unshared facet,
  keeping every partial union convex; the simplex adjacency stays a tree.
  Cells with the same oriented boundary are merged and keep every realising
  tree.

  Args:
    points: Allowed corners, all of one dimension d.
    bound: Largest number of simplices. Defaults to `--polycorr_tree_bound`.

  Returns:
    The cells, sorted by facets.
  """
  _api_usage_counter.Increment("enumerate_tree_cells")
  if bound is None:
    bound = polycorr_config.config.tree_bound
  points = sorted(set(points))
  if not points:
    return []
  d = len(points[0])
  level = {
      frozenset([frozenset(c)])
      for c in itertools.combinations(points, d + 1)
      if lattice.orient_d(*c) != 0
  }
  states = set(level)
  for size in range(2, bound + 1):
    grown = set()
    for state in level:
      for new in _extensions(state, points):
        if new not in states and new not in grown and is_convex_union(new):
          grown.add(new)
    logging.vlog(1, "%d convex unions of %d simplices.", len(grown), size)
    if not grown:
      break
    states |= grown
    level = grown
  cells: dict[tuple[Facet, ...], tuple[set[str], frozenset, int, set]] = {}
  for state in states:
    facets = tuple(f for f, _ in _boundary(state))
    trees, vertices, size, parts = cells.get(
        facets, (set(), frozenset(), len(state), set())
    )
    trees |= realising_trees(sorted(state, key=sorted))
    parts.add(tuple(sorted(tuple(sorted(s)) for s in state)))
    cells[facets] = (trees, vertices | frozenset().union(*state), size, parts)
  return [
      TreeCell(
          facets=facets,
          vertices=vertices,
          trees=tuple(sorted(trees)),
          num_simplices=size,
          decompositions=tuple(sorted(parts)),
      )
      for facets, (trees, vertices, size, parts) in sorted(cells.items())
  ]


def tree_polytope_collisions(
    points: Iterable[LatticePoint], bound: Optional[int] = None
) -> list[TreeCell]:
  """Cells realised by more than one slot tree."""
  collisions = [
      c for c in enumerate_tree_cells(points, bound) if len(c.trees) > 1
  ]
  if collisions:
    logging.warning(
        "%d cells are realised by several distinct slot trees.",
        len(collisions),
    )
  return collisions


OCTAHEDRON = (
    (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1),
)


def octahedron_check(bound: Optional[int] = None) -> bool:
  """Whether no tree cell on the octahedron's vertices is the octahedron.

  Returns:
    True iff the octahedron is not a single tree polytope with at most
    `bound` simplices.
  """
  _api_usage_counter.Increment("octahedron_check")
  octahedron = lattice.SimplicialPolytope.from_vertices(OCTAHEDRON)
  target = octahedron.normalized_volume()
  cells = enumerate_tree_cells(OCTAHEDRON, bound)
  whole = [
      c
      for c in cells
      if c.vertices == octahedron.vertices and c.volume() == target
  ]
  logging.info(
      "Octahedron: %d tree cells, %d of them fill it.", len(cells), len(whole)
  )
  return not whole


def dumps_tree(tree: Tree) -> str:
  return json.dumps(tree.to_json(), sort_keys=True, separators=(",", ":"))
