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
"""Exact rational simplex tableau for feasibility questions.

Rows store a basic variable as `x_B[i] = b[i] - sum_j A[i][j] * x_N[j]`.
Pivoting uses Bland's rule, so the method terminates on degenerate problems,
and all arithmetic is in `fractions.Fraction`.
"""

from __future__ import annotations

import fractions
from typing import Optional, Sequence

from absl import logging
from polycorr._src.core import exceptions

Fraction = fractions.Fraction


class SimplexTableau:
  """Dense tableau over the rationals, maximizing `c . x_N`."""

  def __init__(self, m: int, n: int):
    self.m = m
    self.n = n
    self.A = [[Fraction(0)] * n for _ in range(m)]
    self.b = [Fraction(0)] * m
    self.c = [Fraction(0)] * n
    self.nb_vars = list(range(n))
    self.b_vars = list(range(n, n + m))

  def pivot(self, i: int, j: int) -> None:
    logging.vlog(2, "Pivot %d -> %d (%d, %d)", self.b_vars[i], self.nb_vars[j],
                 i, j)
    piv = self.A[i][j]
    delta = self.c[j] / piv
    for l in range(self.n):
      self.c[l] -= delta * self.A[i][l]
    self.c[j] = -delta
    row = self.A[i]
    for l in range(self.n):
      row[l] = 1 / piv if l == j else row[l] / piv
    self.b[i] /= piv
    for k in range(self.m):
      if k == i:
        continue
      f = self.A[k][j]
      if not f:
        continue
      other = self.A[k]
      for l in range(self.n):
        other[l] = -f / piv if l == j else other[l] - f * row[l]
      self.b[k] -= f * self.b[i]
    self.nb_vars[j], self.b_vars[i] = self.b_vars[i], self.nb_vars[j]

  def bland_primal_step(self) -> str:
    candidates = [(self.nb_vars[j], j) for j in range(self.n) if self.c[j] > 0]
    if not candidates:
      return "optimal"
    _, j = min(candidates)
    ratios = [
        (self.b[i] / self.A[i][j], self.b_vars[i], i)
        for i in range(self.m)
        if self.A[i][j] > 0
    ]
    if not ratios:
      return "unbounded"
    _, _, i = min(ratios)
    self.pivot(i, j)
    return "go_on"

  def bland_primal(self, max_steps: int = 100_000) -> str:
    for _ in range(max_steps):
      ret = self.bland_primal_step()
      if ret in ("optimal", "unbounded"):
        return ret
    raise exceptions.CapExceededError(
        f"Simplex did not terminate within {max_steps} pivots."
    )

  def first_phase_cost(self) -> None:
    for j in range(self.n):
      self.c[j] = sum((self.A[i][j] for i in range(self.m)), Fraction(0))

  def value_of(self, var: int) -> Fraction:
    if var in self.b_vars:
      return self.b[self.b_vars.index(var)]
    return Fraction(0)


def find_nonnegative_solution(
    a_eq: Sequence[Sequence[int | Fraction]],
    b_eq: Sequence[int | Fraction],
) -> Optional[list[Fraction]]:
  """Finds x >= 0 with a_eq @ x = b_eq, or returns None if infeasible.

  Runs phase one of the two-phase simplex method with one artificial variable
  per row.

  Args:
    a_eq: Constraint matrix, m rows of n entries.
    b_eq: Right-hand side, m entries.

  Returns:
    A feasible point with exact rational entries, or None.
  """
  m = len(a_eq)
  if m == 0:
    return []
  n = len(a_eq[0])
  tableau = SimplexTableau(m, n)
  for i, (row, rhs) in enumerate(zip(a_eq, b_eq)):
    if len(row) != n:
      raise ValueError(f"Row {i} has {len(row)} entries, expected {n}.")
    flip = -1 if rhs < 0 else 1
    tableau.A[i] = [Fraction(flip * v) for v in row]
    tableau.b[i] = Fraction(flip * rhs)
  tableau.first_phase_cost()
  if tableau.bland_primal() == "unbounded":
    raise exceptions.PolycorrInternalError("Phase one cannot be unbounded.")
  artificial = range(n, n + m)
  if any(tableau.value_of(v) != 0 for v in artificial):
    return None
  return [tableau.value_of(v) for v in range(n)]
