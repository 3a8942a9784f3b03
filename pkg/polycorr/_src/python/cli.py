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
"""Command line front-end: one verb per computation, JSON on stdout.

  polycorr count --in square.json
  polycorr correlate --in square.json --set-x 0
  polycorr ward --in square.json --n 1 --t-order 2

Exit status is 0 on success, 2 on malformed input, 3 when a resource cap is
hit and 1 when an internal check fails. Results are cached under
$POLYCORR_CACHE unless --no_cache is given; a cached result is byte-identical
to a fresh one and a `{"cached": true}` line on stderr reports the hit.
"""

from __future__ import annotations

import dataclasses
import sys
from typing import Any, Callable, Optional, Sequence

from absl import app
from absl import flags
from absl import logging
from polycorr._src.core import config as polycorr_config
from polycorr._src.core import exceptions
from polycorr._src.core import genpoly
from polycorr._src.core import lattice
from polycorr._src.core import usage_logging
from polycorr._src.python import cache
from polycorr._src.python import genfun
from polycorr._src.python import polycorr_logging
from polycorr._src.python import regularity
from polycorr._src.python import serialization
from polycorr._src.python import tensor
from polycorr._src.python import toric
from polycorr._src.python import trees
from polycorr._src.python import triangulations
from polycorr._src.python import ward
from polycorr._src.python import wick

_IN = flags.DEFINE_string("in", None, "Input JSON file.")
_OUT = flags.DEFINE_string("out", None, "Output file; stdout if unset.")
_SET_X = flags.DEFINE_string(
    "set_x", None, "Deformation parameter; 0 switches the x-weights off."
)
_BETA_ORDER = flags.DEFINE_integer("beta_order", None, "Order in beta.")
_T_ORDER = flags.DEFINE_integer("t_order", None, "Order in the t-variables.")
_TREE_BOUND = flags.DEFINE_integer(
    "tree_bound", None, "Largest tree size in tensor searches."
)
_STRICT_BOX = flags.DEFINE_bool(
    "strict_box", False, "Sum Wick indices over the whole index box."
)
_NO_CACHE = flags.DEFINE_bool("no_cache", False, "Bypass the result cache.")
_PRETTY = flags.DEFINE_bool("pretty", False, "Indented, human-readable output.")
_N = flags.DEFINE_integer("n", None, "Mode n of a Ward or Virasoro check.")
_K = flags.DEFINE_integer("k", None, "Coordinate box of the reflexive census.")
_M = flags.DEFINE_integer("m", None, "Mode m of a Virasoro check.")
_WINDOW_K = flags.DEFINE_integer(
    "window_k", None, "Operator truncation window (largest t index)."
)
_WINDOW_D = flags.DEFINE_integer(
    "window_d", None, "Degree of the test monomials of a Virasoro check."
)

EXIT_INTERNAL = 1
EXIT_SCHEMA = 2
EXIT_CAP = 3

_VIRASORO_MODES = tuple(range(-1, 5))
_DEFAULT_WINDOW_K = 12
_DEFAULT_WINDOW_D = 6
_DEFAULT_CENSUS_BOX = 4
_SWEEP_TREE_SIZE = 2


@dataclasses.dataclass(frozen=True)
class JobSpec:
  """One CLI invocation.

  Attributes:
    command: The verb.
    input_path: Input JSON file, if the verb takes one.
    set_x: Value of the deformation parameter; only "0" is accepted.
    beta_order: Order in beta.
    t_order: Order in the t-variables.
    tree_bound: Largest tree size in tensor searches.
    strict_box: Sum Wick indices over the whole index box.
    use_cache: Read and write the result cache.
    pretty: Indent the output.
    n: First mode.
    k: Census box.
    m: Second mode.
    window_k: Operator window.
    window_d: Test monomial degree.
  """

  command: str
  input_path: Optional[str] = None
  set_x: Optional[str] = None
  beta_order: Optional[int] = None
  t_order: Optional[int] = None
  tree_bound: Optional[int] = None
  strict_box: bool = False
  use_cache: bool = True
  pretty: bool = False
  n: Optional[int] = None
  k: Optional[int] = None
  m: Optional[int] = None
  window_k: Optional[int] = None
  window_d: Optional[int] = None

  def __post_init__(self):
    if self.command not in VERBS:
      raise exceptions.SchemaError(
          f"Unknown command {self.command!r}. Valid commands: {sorted(VERBS)}."
      )
    for name in ("beta_order", "t_order"):
      value = getattr(self, name)
      if value is not None and value < 0:
        raise exceptions.SchemaError(
            f"Invalid {name}. Got {value}, but it must be nonnegative."
        )
    for name in ("tree_bound", "k", "window_k", "window_d"):
      value = getattr(self, name)
      if value is not None and value < 1:
        raise exceptions.SchemaError(
            f"Invalid {name}. Got {value}, but it must be positive."
        )
    if self.set_x is not None and self.set_x.strip() not in ("0", "0.0"):
      raise exceptions.SchemaError(
          f"Only --set_x 0 is supported, got {self.set_x!r}."
      )

  @classmethod
  def from_flags(cls, argv: Sequence[str]) -> JobSpec:
    if len(argv) != 2:
      raise exceptions.SchemaError(
          f"Expected exactly one command, got {list(argv[1:])}."
      )
    return cls(
        command=argv[1],
        input_path=_IN.value,
        set_x=_SET_X.value,
        beta_order=_BETA_ORDER.value,
        t_order=_T_ORDER.value,
        tree_bound=_TREE_BOUND.value,
        strict_box=_STRICT_BOX.value,
        use_cache=not _NO_CACHE.value,
        pretty=_PRETTY.value,
        n=_N.value,
        k=_K.value,
        m=_M.value,
        window_k=_WINDOW_K.value,
        window_d=_WINDOW_D.value,
    )

  @property
  def deformation(self) -> bool:
    return self.set_x is None

  def caps(self) -> dict[str, Any]:
    skip = ("command", "input_path", "use_cache", "pretty")
    return {
        f.name: getattr(self, f.name)
        for f in dataclasses.fields(self)
        if f.name not in skip
    }


def _polygon(obj: Any) -> lattice.LatticePolygon:
  polytope = lattice.polytope_from_json(obj)
  if not isinstance(polytope, lattice.LatticePolygon):
    raise exceptions.SchemaError("This command needs a polygon.")
  return polytope


def _polyhedron(obj: Any) -> lattice.SimplicialPolytope:
  polytope = lattice.polytope_from_json(obj)
  if not isinstance(polytope, lattice.SimplicialPolytope):
    raise exceptions.SchemaError("This command needs a 3D polytope.")
  return polytope


def _require(value: Optional[int], name: str) -> int:
  if value is None:
    raise exceptions.SchemaError(f"This command needs --{name}.")
  return value


def _maybe_plain(job: JobSpec, poly: genpoly.GenPoly) -> genpoly.GenPoly:
  return poly if job.deformation else genfun.without_deformation(poly)


def _count(job: JobSpec, obj: Any) -> dict[str, Any]:
  del job
  polytope = lattice.polytope_from_json(obj)
  return {
      "l": len(lattice.lattice_points(polytope)),
      "l_star": len(lattice.interior_points(polytope)),
  }


def _triangulate(job: JobSpec, obj: Any) -> dict[str, Any]:
  del job
  found = triangulations.enumerate_triangulations(_polygon(obj))
  return {"count": len(found), "triangulations": found}


def _subdivide(job: JobSpec, obj: Any) -> dict[str, Any]:
  found = triangulations.enumerate_subdivisions(
      _polygon(obj), max_cells=job.beta_order
  )
  return {"count": len(found), "subdivisions": found}


def _correlate(job: JobSpec, obj: Any) -> dict[str, Any]:
  poly = _maybe_plain(job, genfun.correlator_direct(_polygon(obj)))
  if job.beta_order is not None:
    poly = poly.map_terms(
        lambda e, c: (e, c) if e.beta <= job.beta_order else None
    )
  return {"terms": poly}


def _subdiv_genfun(job: JobSpec, obj: Any) -> dict[str, Any]:
  poly = genfun.subdivision_genfun(_polygon(obj), max_cells=job.t_order)
  return {"terms": _maybe_plain(job, poly)}


def _wick(job: JobSpec, obj: Any) -> dict[str, Any]:
  polygon = _polygon(obj)
  k = _require(job.beta_order, "beta_order")
  spec = wick.GaussianSpec()
  if job.strict_box:
    bound = max(abs(c) for p in polygon.boundary for c in p)
    spec = wick.GaussianSpec(
        index_box=lattice.IndexBox(d=2, N=max(bound, 1)), strict_box=True
    )
  value = wick.correlator_wick(polygon, k, spec, deformation=job.deformation)
  direct = _maybe_plain(job, genfun.correlator_direct(polygon))
  expected = genpoly.GenPoly.monomial(beta=k) * direct.coefficient(beta=k)
  return {"terms": value, "matches_direct": value == expected}


def _ward(job: JobSpec, obj: Any) -> dict[str, Any]:
  n = _require(job.n, "n")
  order = 2 if job.t_order is None else job.t_order
  residual = ward.ward_residual(_polygon(obj), n, order)
  return {
      "n": n,
      "t_order": order,
      "residual": str(residual),
      "pass": residual.is_zero(),
  }


def _virasoro_check(job: JobSpec, obj: Any) -> dict[str, Any]:
  del obj
  window = job.window_k or _DEFAULT_WINDOW_K
  degree = job.window_d or _DEFAULT_WINDOW_D
  if job.n is not None and job.m is not None:
    results = {
        (job.n, job.m): ward.check_virasoro(job.n, job.m, window, degree)
    }
  else:
    results = ward.check_virasoro_grid(_VIRASORO_MODES, window, degree)
  return {
      "window_k": window,
      "window_d": degree,
      "pairs": [
          {"n": n, "m": m, "pass": ok} for (n, m), ok in sorted(results.items())
      ],
      "pass": all(results.values()),
  }


def _secondary(job: JobSpec, obj: Any) -> dict[str, Any]:
  del job
  result = regularity.secondary_polytope(_polygon(obj))
  return {
      "vertices": sorted(
          [[list(p), v] for p, v in phi.values] for phi in result.vertices
      ),
      "num_triangulations": result.num_triangulations,
      "num_regular": result.num_regular,
      "collisions": result.collisions,
  }


def _tensor_correlate(job: JobSpec, obj: Any) -> dict[str, Any]:
  polytope = _polyhedron(obj)
  direct = tensor.correlator_tensor_direct(polytope, bound=job.tree_bound)
  out = direct.to_json()
  if job.t_order is not None:
    order = job.t_order
    value = tensor.correlator_tensor_wick(polytope, order, bound=job.tree_bound)
    part = direct.value.map_terms(
        lambda e, c: (e, c) if e.t_degree() == order else None
    )
    out["wick"] = value
    out["matches_direct"] = value == part
  return out


_TreePair = tuple[trees.Tree, trees.Slot, trees.Tree, trees.Slot]


def _tree_pairs(obj: Any) -> list[_TreePair]:
  if obj is None:
    marked = [
        (t, e)
        for t in trees.enumerate_trees(3, _SWEEP_TREE_SIZE)
        for e in t.open_edges()
    ]
    return [a + b for a in marked for b in marked]
  try:
    return [
        (
            trees.Tree.from_json(p["t1"]),
            tuple(p["v1"]),
            trees.Tree.from_json(p["t2"]),
            tuple(p["v2"]),
        )
        for p in obj["pairs"]
    ]
  except (KeyError, TypeError) as e:
    raise exceptions.SchemaError(f"Malformed tree pairs: {e}") from e


def _tensor_virasoro(job: JobSpec, obj: Any) -> dict[str, Any]:
  fixtures = [
      tensor.correlator_tensor_direct(p, bound=job.tree_bound)
      for p in (tensor.bipyramid(), tensor.unit_tetrahedron())
  ]
  results = []
  for t1, v1, t2, v2 in _tree_pairs(obj):
    ok = tensor.virasoro_like_check(t1, v1, t2, v2, fixtures)
    results.append({"t1": t1, "v1": v1, "t2": t2, "v2": v2, "pass": ok})
  return {"pairs": results, "pass": all(r["pass"] for r in results)}


def _toric_dual(job: JobSpec, obj: Any) -> dict[str, Any]:
  if obj is None:
    census = toric.reflexive_polygon_census(job.k or _DEFAULT_CENSUS_BOX)
    return {"reflexive_polygons": len(census), "polygons": census}
  polytope = toric.polytope_from_json(obj)
  dual = toric.dual_polytope(polytope)
  twice = toric.dual_polytope(dual)
  return {
      "dual": dual,
      "reflexive": toric.is_reflexive(polytope),
      "double_dual": set(twice.vertices) == set(polytope.vertices),
  }


def _toric_hodge(job: JobSpec, obj: Any) -> dict[str, Any]:
  del job
  if obj is None:
    raise exceptions.SchemaError("toric-hodge needs --in.")
  polytope = toric.polytope_from_json(obj)
  result = toric.hodge_numbers(polytope).to_json()
  result["dim"] = polytope.dim
  return result


def _octahedron_check(job: JobSpec, obj: Any) -> dict[str, Any]:
  del obj
  bound = job.tree_bound or polycorr_config.config.tree_bound
  return {"bound": bound, "not_single_cell": trees.octahedron_check(bound)}


@dataclasses.dataclass(frozen=True)
class _Verb:
  handler: Callable[[JobSpec, Any], dict[str, Any]]
  needs_input: bool = True
  # The output does not depend on where the input sits in the lattice.
  translation_invariant: bool = False


VERBS: dict[str, _Verb] = {
    "count": _Verb(_count, translation_invariant=True),
    "triangulate": _Verb(_triangulate),
    "subdivide": _Verb(_subdivide),
    "correlate": _Verb(_correlate),
    "subdiv-genfun": _Verb(_subdiv_genfun),
    "wick": _Verb(_wick),
    "ward": _Verb(_ward, translation_invariant=True),
    "virasoro-check": _Verb(_virasoro_check, needs_input=False),
    "secondary": _Verb(_secondary),
    "tensor-correlate": _Verb(_tensor_correlate),
    "tensor-virasoro": _Verb(_tensor_virasoro, needs_input=False),
    "toric-dual": _Verb(_toric_dual, needs_input=False),
    "toric-hodge": _Verb(_toric_hodge),
    "octahedron-check": _Verb(_octahedron_check, needs_input=False),
}


def _cache_input(job: JobSpec, obj: Any) -> str:
  if obj is None:
    return ""
  verb = VERBS[job.command]
  if verb.translation_invariant or (
      job.command in ("correlate", "subdiv-genfun") and not job.deformation
  ):
    return lattice.canonical_key(lattice.polytope_from_json(obj))
  return serialization.dumps(obj)


def execute(job: JobSpec, result_cache: Optional[cache.ResultCache] = None):
  """Runs a job and returns (output text, whether it came from the cache).

  Args:
    job: The job.
    result_cache: Cache to use; defaults to the configured directory.

  Returns:
    The JSON output and a cache-hit flag.

  Raises:
    SchemaError: on malformed input.
    CapExceededError: when a cap is hit.
  """
  verb = VERBS[job.command]
  obj = None
  if job.input_path is not None:
    obj = serialization.read_json(job.input_path)
  elif verb.needs_input:
    raise exceptions.SchemaError(f"{job.command} needs --in.")
  key = cache.make_key(job.command, _cache_input(job, obj), job.caps())
  if job.use_cache:
    result_cache = result_cache or cache.ResultCache()
    hit = result_cache.lookup(key)
    if hit is not None:
      return hit, True
  output = serialization.dumps(verb.handler(job, obj), pretty=job.pretty)
  if job.use_cache:
    result_cache.store(key, output)
  return output, False


def run(
    job: JobSpec, result_cache: Optional[cache.ResultCache] = None
) -> tuple[int, str]:
  """Runs a job and maps failures to exit codes; messages go to stderr."""
  polycorr_logging.set_process_identifier_prefix(job.command)
  usage_logging.log_event("cli", tag_2=job.command)
  try:
    output, cached = execute(job, result_cache)
  except exceptions.CapExceededError as e:
    sys.stderr.write(f"Cap exceeded: {e}\n")
    return EXIT_CAP, ""
  except ValueError as e:
    sys.stderr.write(f"Invalid input: {e}\n")
    return EXIT_SCHEMA, ""
  except exceptions.PolycorrInternalError as e:
    logging.exception("Internal check failed.")
    sys.stderr.write(f"Internal error: {e}\n")
    return EXIT_INTERNAL, ""
  if cached:
    sys.stderr.write('{"cached":true}\n')
  return 0, output


def normalize_argv(argv: Sequence[str]) -> list[str]:
  """Accepts dashed flag names such as --set-x for --set_x."""
  result = []
  for arg in argv:
    if arg.startswith("--") and len(arg) > 2:
      name, sep, value = arg[2:].partition("=")
      arg = "--" + name.replace("-", "_") + sep + value
    result.append(arg)
  return result


def _parse_flags(argv: list[str]) -> list[str]:
  try:
    return flags.FLAGS(normalize_argv(argv))
  except flags.Error as e:
    sys.stderr.write(f"{e}\n")
    sys.exit(EXIT_SCHEMA)


def main(argv: Sequence[str]) -> int:
  try:
    job = JobSpec.from_flags(argv)
  except exceptions.SchemaError as e:
    sys.stderr.write(f"Invalid input: {e}\n")
    return EXIT_SCHEMA
  status, output = run(job)
  if status == 0:
    if _OUT.value is not None:
      serialization.write_text(_OUT.value, output + "\n")
    else:
      sys.stdout.write(output + "\n")
  return status


def run_main():
  app.run(main, flags_parser=_parse_flags)


if __name__ == "__main__":
  run_main()
