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
"""Normal-ordered differential operators in the t-variables.

A `DiffOp` is a finite sum of terms c * N^p * mu^m * t^a * d^b where every t
stands left of every derivative d = d/dt. Products are normal-ordered with the
Leibniz rule

  d_k^b t_k^g = sum_j C(b, j) * g!/(g - j)! * t_k^(g - j) * d_k^(b - j).

Variables are keyed like `GenPoly` t-variables: integers for the polygon and
Hermitian models, canonical tree strings for the tensor model.
"""

from __future__ import annotations

import collections
import dataclasses
import itertools
import math
from typing import Any, Iterable, Iterator, Mapping, Optional, Union

from polycorr._src.core import exceptions
from polycorr._src.core import genpoly

GenPoly = genpoly.GenPoly
TKey = genpoly.TKey
Coefficient = genpoly.Coefficient
_Powers = tuple[tuple[TKey, int], ...]


def _powers(values: Mapping[TKey, int]) -> _Powers:
  return tuple(
      sorted(
          ((k, e) for k, e in values.items() if e),
          key=lambda kv: genpoly.t_sort_key(kv[0]),
      )
  )


def _falling(n: int, k: int) -> int:
  return math.perm(n, k)


@dataclasses.dataclass(frozen=True, order=False)
class OpKey:
  """Exponent record of one DiffOp term.

  Attributes:
    t: Sorted (key, power) pairs of multiplication operators.
    d: Sorted (key, order) pairs of derivatives.
    mu: Power of mu.
    n: Power of N.
  """

  t: _Powers = ()
  d: _Powers = ()
  mu: int = 0
  n: int = 0

  def sort_key(self) -> tuple[Any, ...]:
    return (
        tuple((genpoly.t_sort_key(k), e) for k, e in self.t),
        tuple((genpoly.t_sort_key(k), e) for k, e in self.d),
        self.mu,
        self.n,
    )

  def indices(self) -> Iterator[TKey]:
    for k, _ in itertools.chain(self.t, self.d):
      yield k


class DiffOp:
  """An immutable differential operator with exact coefficients."""

  __slots__ = ("_terms",)

  def __init__(self, terms: Optional[Mapping[OpKey, Coefficient]] = None):
    self._terms = {k: v for k, v in (terms or {}).items() if v}

  @classmethod
  def identity(cls, coeff: Coefficient = 1) -> DiffOp:
    return cls({OpKey(): coeff})

  @classmethod
  def zero(cls) -> DiffOp:
    return cls()

  @classmethod
  def term(
      cls,
      coeff: Coefficient = 1,
      *,
      t: Optional[Mapping[TKey, int]] = None,
      d: Optional[Mapping[TKey, int]] = None,
      mu: int = 0,
      n: int = 0,
  ) -> DiffOp:
    """The single term coeff * N^n * mu^mu * t^t * d^d."""
    return cls({OpKey(_powers(t or {}), _powers(d or {}), mu, n): coeff})

  @classmethod
  def t_var(cls, key: TKey) -> DiffOp:
    return cls.term(t={key: 1})

  @classmethod
  def derivative(cls, key: TKey) -> DiffOp:
    return cls.term(d={key: 1})

  @property
  def terms(self) -> Mapping[OpKey, Coefficient]:
    return dict(self._terms)

  def items(self) -> list[tuple[OpKey, Coefficient]]:
    return sorted(self._terms.items(), key=lambda kv: kv[0].sort_key())

  def __bool__(self) -> bool:
    return bool(self._terms)

  def __len__(self) -> int:
    return len(self._terms)

  def __eq__(self, other: Any) -> bool:
    if not isinstance(other, DiffOp):
      return NotImplemented
    return self._terms == other._terms

  def __hash__(self) -> int:
    return hash(frozenset(self._terms.items()))

  def __repr__(self) -> str:
    return f"DiffOp({self})"

  def __str__(self) -> str:
    if not self._terms:
      return "0"
    parts = []
    for key, c in self.items():
      factors = []
      if key.n:
        factors.append("N" if key.n == 1 else f"N^{key.n}")
      if key.mu:
        factors.append("mu" if key.mu == 1 else f"mu^{key.mu}")
      for k, e in key.t:
        factors.append(f"t[{k}]" if e == 1 else f"t[{k}]^{e}")
      for k, e in key.d:
        factors.append(f"d[{k}]" if e == 1 else f"d[{k}]^{e}")
      body = "*".join(factors)
      if not body:
        parts.append(str(c))
      elif c == 1:
        parts.append(body)
      elif c == -1:
        parts.append("-" + body)
      else:
        parts.append(f"{c}*{body}")
    return " + ".join(parts).replace("+ -", "- ")

  def __add__(self, other: Union[DiffOp, Coefficient]) -> DiffOp:
    if not isinstance(other, DiffOp):
      other = DiffOp.identity(other)
    terms = dict(self._terms)
    for k, v in other._terms.items():
      terms[k] = terms.get(k, 0) + v
    return DiffOp(terms)

  __radd__ = __add__

  def __neg__(self) -> DiffOp:
    return DiffOp({k: -v for k, v in self._terms.items()})

  def __sub__(self, other: Union[DiffOp, Coefficient]) -> DiffOp:
    if not isinstance(other, DiffOp):
      other = DiffOp.identity(other)
    return self + (-other)

  def __mul__(self, other: Union[DiffOp, Coefficient]) -> DiffOp:
    if isinstance(other, DiffOp):
      return compose(self, other)
    return DiffOp({k: v * other for k, v in self._terms.items()})

  def __rmul__(self, other: Coefficient) -> DiffOp:
    return DiffOp({k: v * other for k, v in self._terms.items()})

  def max_index(self) -> Optional[int]:
    """Largest integer variable index the operator touches."""
    indices = [
        i for key in self._terms for i in key.indices() if isinstance(i, int)
    ]
    return max(indices, default=None)

  def commutator(self, other: DiffOp) -> DiffOp:
    return compose(self, other) - compose(other, self)

  def apply(self, poly: GenPoly, n: Optional[Coefficient] = None) -> GenPoly:
    """Applies the operator to a polynomial in the t-variables.

    Args:
      poly: The polynomial; its mu exponents shift by the operator's.
      n: Value of N. Required when a term carries a power of N.

    Returns:
      The image polynomial.
    """
    terms: dict[genpoly.Exponents, Coefficient] = collections.defaultdict(int)
    for key, c in self._terms.items():
      if key.n:
        if n is None:
          raise ValueError(
              f"Operator term {key} carries N^{key.n}; pass a value for N."
          )
        c = c * n**key.n
      for exponents, value in poly.items():
        powers = dict(exponents.t)
        factor = c * value
        for k, order in key.d:
          have = powers.get(k, 0)
          if have < order:
            factor = 0
            break
          factor *= _falling(have, order)
          powers[k] = have - order
        if not factor:
          continue
        for k, e in key.t:
          powers[k] = powers.get(k, 0) + e
        new = dataclasses.replace(
            exponents, t=_powers(powers), mu=exponents.mu + key.mu
        )
        terms[new] += factor
    return GenPoly(terms)


def _compose_terms(
    a: OpKey, b: OpKey
) -> Iterator[tuple[OpKey, int]]:
  """Normal-ordered expansion of (t^a1 d^a2)(t^b1 d^b2)."""
  a_d = dict(a.d)
  b_t = dict(b.t)
  shared = [k for k in a_d if k in b_t]
  ranges = [range(min(a_d[k], b_t[k]) + 1) for k in shared]
  for js in itertools.product(*ranges):
    coeff = 1
    t = collections.Counter(dict(a.t))
    d = collections.Counter(dict(b.d))
    for k, j in zip(shared, js):
      coeff *= math.comb(a_d[k], j) * _falling(b_t[k], j)
    for k, e in b_t.items():
      t[k] += e - dict(zip(shared, js)).get(k, 0)
    for k, e in a_d.items():
      d[k] += e - dict(zip(shared, js)).get(k, 0)
    yield OpKey(_powers(t), _powers(d), a.mu + b.mu, a.n + b.n), coeff


def compose(a: DiffOp, b: DiffOp, window: Optional[int] = None) -> DiffOp:
  """The normal-ordered product a * b.

  Args:
    a: Left factor.
    b: Right factor.
    window: If set, an integer variable index above `window` in the result
      raises instead of being kept.

  Returns:
    The product.

  Raises:
    WindowTooSmallError: If the product leaves the window.
  """
  terms: dict[OpKey, Coefficient] = collections.defaultdict(int)
  for ka, ca in a.terms.items():
    for kb, cb in b.terms.items():
      for key, c in _compose_terms(ka, kb):
        terms[key] += ca * cb * c
  result = DiffOp(terms)
  if window is not None:
    top = result.max_index()
    if top is not None and top > window:
      raise exceptions.WindowTooSmallError(
          f"Operator product touches t[{top}], outside the window {window}."
      )
  return result


def sum_ops(ops: Iterable[DiffOp]) -> DiffOp:
  total = DiffOp.zero()
  for op in ops:
    total += op
  return total


def monomials(variables: Iterable[TKey], max_degree: int) -> Iterator[GenPoly]:
  """All monic t-monomials of total degree <= max_degree."""
  variables = sorted(set(variables), key=genpoly.t_sort_key)
  for degree in range(max_degree + 1):
    for combo in itertools.combinations_with_replacement(variables, degree):
      yield GenPoly.monomial(t=collections.Counter(combo))
