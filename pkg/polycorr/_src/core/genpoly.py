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
"""Exact sparse Laurent polynomials in beta, mu, {t_q} and {x_a}.

Every correlator polycorr computes is a `GenPoly`. Coefficients are Python
integers, or `fractions.Fraction` where a propagator is fractional (tensor
models). Exponents of mu may be negative; all other exponents are
nonnegative in correlators but the type does not insist on it.

t-variables are keyed by an integer q (polygon cells with q + 2 corners) or
by a string (canonical form of a slot-numbered tree).
"""

from __future__ import annotations

import dataclasses
import fractions
import json
from typing import Any, Callable, Iterable, Iterator, Mapping, Optional, Union

from polycorr._src.core import exceptions

Coefficient = Union[int, fractions.Fraction]
TKey = Union[int, str]
XKey = tuple[int, ...]


def t_sort_key(key: TKey) -> tuple[int, Any]:
  return (0, key, "") if isinstance(key, int) else (1, 0, key)


def _normalize(value: Coefficient) -> Coefficient:
  if isinstance(value, fractions.Fraction) and value.denominator == 1:
    return int(value.numerator)
  return value


def _merge(
    a: tuple[tuple[Any, int], ...],
    b: tuple[tuple[Any, int], ...],
    sort_key: Optional[Callable[[Any], Any]] = None,
) -> tuple[tuple[Any, int], ...]:
  if not a:
    return b
  if not b:
    return a
  merged = dict(a)
  for key, e in b:
    total = merged.get(key, 0) + e
    if total:
      merged[key] = total
    else:
      del merged[key]
  return tuple(
      sorted(
          merged.items(),
          key=lambda kv: sort_key(kv[0]) if sort_key else kv[0],
      )
  )


def _t_item_key(key: TKey) -> tuple[int, Any]:
  return t_sort_key(key)


@dataclasses.dataclass(frozen=True, slots=True, order=False)
class Exponents:
  """Exponent record of one GenPoly term.

  Attributes:
    beta: Exponent of beta.
    mu: Exponent of mu (Laurent).
    t: Sorted (key, exponent) pairs of t-variables.
    x: Sorted (lattice point, exponent) pairs of x-variables.
  """

  beta: int = 0
  mu: int = 0
  t: tuple[tuple[TKey, int], ...] = ()
  x: tuple[tuple[XKey, int], ...] = ()

  def __mul__(self, other: Exponents) -> Exponents:
    return Exponents(
        beta=self.beta + other.beta,
        mu=self.mu + other.mu,
        t=_merge(self.t, other.t, _t_item_key),
        x=_merge(self.x, other.x),
    )

  def sort_key(self) -> tuple[Any, ...]:
    return (
        self.beta,
        self.mu,
        tuple((t_sort_key(k), e) for k, e in self.t),
        self.x,
    )

  def t_degree(self) -> int:
    return sum(e for _, e in self.t)

  def t_exponent(self, key: TKey) -> int:
    for k, e in self.t:
      if k == key:
        return e
    return 0

  def with_t(self, key: TKey, exponent: int) -> Exponents:
    items = {k: e for k, e in self.t if k != key}
    if exponent:
      items[key] = exponent
    return dataclasses.replace(
        self, t=tuple(sorted(items.items(), key=lambda kv: t_sort_key(kv[0])))
    )


_ONE = Exponents()


class GenPoly:
  """An immutable exact sparse polynomial."""

  __slots__ = ("_terms",)

  def __init__(
      self, terms: Optional[Mapping[Exponents, Coefficient]] = None
  ):
    cleaned = {}
    for exponents, coeff in (terms or {}).items():
      if coeff:
        cleaned[exponents] = _normalize(coeff)
    self._terms = cleaned

  @classmethod
  def _raw(cls, terms: dict[Exponents, Coefficient]) -> GenPoly:
    poly = cls.__new__(cls)
    poly._terms = terms
    return poly

  @classmethod
  def constant(cls, value: Coefficient) -> GenPoly:
    return cls({_ONE: value})

  @classmethod
  def zero(cls) -> GenPoly:
    return cls._raw({})

  @classmethod
  def one(cls) -> GenPoly:
    return cls._raw({_ONE: 1})

  @classmethod
  def monomial(
      cls,
      coeff: Coefficient = 1,
      *,
      beta: int = 0,
      mu: int = 0,
      t: Optional[Mapping[TKey, int]] = None,
      x: Optional[Mapping[XKey, int]] = None,
  ) -> GenPoly:
    exponents = Exponents(
        beta=beta,
        mu=mu,
        t=tuple(
            sorted(
                ((k, e) for k, e in (t or {}).items() if e),
                key=lambda kv: t_sort_key(kv[0]),
            )
        ),
        x=tuple(sorted((tuple(k), e) for k, e in (x or {}).items() if e)),
    )
    return cls({exponents: coeff})

  @property
  def terms(self) -> Mapping[Exponents, Coefficient]:
    return dict(self._terms)

  def items(self) -> Iterator[tuple[Exponents, Coefficient]]:
    return iter(sorted(self._terms.items(), key=lambda kv: kv[0].sort_key()))

  def __len__(self) -> int:
    return len(self._terms)

  def __bool__(self) -> bool:
    return bool(self._terms)

  def is_zero(self) -> bool:
    return not self._terms

  def __eq__(self, other: Any) -> bool:
    if isinstance(other, (int, fractions.Fraction)):
      other = GenPoly.constant(other)
    if not isinstance(other, GenPoly):
      return NotImplemented
    return self._terms == other._terms

  def __hash__(self) -> int:
    return hash(frozenset(self._terms.items()))

  def __repr__(self) -> str:
    return f"GenPoly({self})"

  def __add__(self, other: Union[GenPoly, Coefficient]) -> GenPoly:
    if not isinstance(other, GenPoly):
      other = GenPoly.constant(other)
    terms = dict(self._terms)
    for exponents, coeff in other._terms.items():
      total = terms.get(exponents, 0) + coeff
      if total:
        terms[exponents] = _normalize(total)
      else:
        terms.pop(exponents, None)
    return GenPoly._raw(terms)

  __radd__ = __add__

  def __neg__(self) -> GenPoly:
    return GenPoly._raw({e: -c for e, c in self._terms.items()})

  def __sub__(self, other: Union[GenPoly, Coefficient]) -> GenPoly:
    if not isinstance(other, GenPoly):
      other = GenPoly.constant(other)
    return self + (-other)

  def __rsub__(self, other: Coefficient) -> GenPoly:
    return GenPoly.constant(other) - self

  def __mul__(self, other: Union[GenPoly, Coefficient]) -> GenPoly:
    if not isinstance(other, GenPoly):
      if not other:
        return GenPoly.zero()
      return GenPoly._raw(
          {e: _normalize(c * other) for e, c in self._terms.items()}
      )
    terms: dict[Exponents, Coefficient] = {}
    for e1, c1 in self._terms.items():
      for e2, c2 in other._terms.items():
        exponents = e1 * e2
        terms[exponents] = terms.get(exponents, 0) + c1 * c2
    return GenPoly(terms)

  __rmul__ = __mul__

  def __pow__(self, exponent: int) -> GenPoly:
    if exponent < 0:
      raise ValueError(f"Negative powers are not supported, got {exponent}.")
    result = GenPoly.one()
    for _ in range(exponent):
      result = result * self
    return result

  def map_terms(
      self,
      fn: Callable[
          [Exponents, Coefficient], Optional[tuple[Exponents, Coefficient]]
      ],
  ) -> GenPoly:
    """Applies `fn` to every term; `None` drops the term."""
    terms: dict[Exponents, Coefficient] = {}
    for exponents, coeff in self._terms.items():
      mapped = fn(exponents, coeff)
      if mapped is None:
        continue
      new_exponents, new_coeff = mapped
      terms[new_exponents] = terms.get(new_exponents, 0) + new_coeff
    return GenPoly(terms)

  def beta_degree(self) -> int:
    """Maximal exponent of beta."""
    if not self._terms:
      raise ValueError("beta_degree of the zero polynomial is undefined.")
    return max(e.beta for e in self._terms)

  def t_degree(self) -> int:
    if not self._terms:
      raise ValueError("t_degree of the zero polynomial is undefined.")
    return max(e.t_degree() for e in self._terms)

  def coefficient(self, *, beta: int) -> GenPoly:
    """The coefficient of beta**beta, as a polynomial free of beta."""
    return self.map_terms(
        lambda e, c: (dataclasses.replace(e, beta=0), c)
        if e.beta == beta
        else None
    )

  def beta_coefficients(self) -> dict[int, GenPoly]:
    return {
        k: self.coefficient(beta=k)
        for k in sorted({e.beta for e in self._terms})
    }

  def truncate_t(self, order: int) -> GenPoly:
    """Drops terms of total t-degree above `order`."""
    return self.map_terms(
        lambda e, c: (e, c) if e.t_degree() <= order else None
    )

  def derivative_t(self, key: TKey) -> GenPoly:
    def _derive(e: Exponents, c: Coefficient):
      power = e.t_exponent(key)
      if not power:
        return None
      return e.with_t(key, power - 1), c * power

    return self.map_terms(_derive)

  def t_keys(self) -> set[TKey]:
    return {k for e in self._terms for k, _ in e.t}

  def substitute(
      self,
      *,
      mu: Optional[Coefficient] = None,
      x: Optional[Coefficient] = None,
  ) -> GenPoly:
    """Substitutes a value for mu and/or for every x-variable."""

    def _sub(e: Exponents, c: Coefficient):
      if mu is not None:
        if e.mu < 0 and not mu:
          raise ZeroDivisionError("Cannot set mu = 0 in a Laurent term.")
        c = c * fractions.Fraction(mu) ** e.mu
        e = dataclasses.replace(e, mu=0)
      if x is not None:
        for _, power in e.x:
          if power < 0 and not x:
            raise ZeroDivisionError("Cannot set x = 0 under a negative power.")
          c = c * fractions.Fraction(x) ** power
        e = dataclasses.replace(e, x=())
      return e, c

    return self.map_terms(_sub)

  def to_json(self) -> list[dict[str, Any]]:
    """Canonically sorted term list."""
    out = []
    for e, c in self.items():
      out.append({
          "coeff": (
              c if isinstance(c, int) else f"{c.numerator}/{c.denominator}"
          ),
          "beta": e.beta,
          "mu": e.mu,
          "t": {str(k): p for k, p in e.t},
          "x": {",".join(str(v) for v in k): p for k, p in e.x},
      })
    return out

  @classmethod
  def from_json(cls, terms: Iterable[Mapping[str, Any]]) -> GenPoly:
    poly: dict[Exponents, Coefficient] = {}
    try:
      for term in terms:
        coeff = term["coeff"]
        if isinstance(coeff, str):
          coeff = fractions.Fraction(coeff)
        t = {
            (int(k) if k.lstrip("-").isdigit() else k): int(p)
            for k, p in term.get("t", {}).items()
        }
        x = {
            tuple(int(v) for v in k.split(",")): int(p)
            for k, p in term.get("x", {}).items()
        }
        new = cls.monomial(
            coeff, beta=int(term.get("beta", 0)), mu=int(term.get("mu", 0)),
            t=t, x=x,
        )
        for e, c in new._terms.items():
          poly[e] = poly.get(e, 0) + c
    except (KeyError, TypeError, ValueError) as e:
      raise exceptions.SchemaError(f"Malformed polynomial JSON: {e}") from e
    return cls(poly)

  def __str__(self) -> str:
    if not self._terms:
      return "0"
    parts = []
    for e, c in self.items():
      factors = []
      if e.beta:
        factors.append("beta" if e.beta == 1 else f"beta^{e.beta}")
      if e.mu:
        factors.append("mu" if e.mu == 1 else f"mu^{e.mu}")
      for k, p in e.t:
        factors.append(f"t[{k}]" if p == 1 else f"t[{k}]^{p}")
      for k, p in e.x:
        name = "x" + "_".join(str(v) for v in k)
        factors.append(name if p == 1 else f"{name}^{p}")
      if not factors:
        parts.append(str(c))
      elif c == 1:
        parts.append("*".join(factors))
      elif c == -1:
        parts.append("-" + "*".join(factors))
      else:
        parts.append(f"{c}*" + "*".join(factors))
    return " + ".join(parts).replace("+ -", "- ")


def dumps(poly: GenPoly, pretty: bool = False) -> str:
  if pretty:
    return str(poly)
  return json.dumps(poly.to_json(), sort_keys=True, separators=(",", ":"))
