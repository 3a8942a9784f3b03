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
"""Core polycorr API: configuration, errors and lattice geometry."""

# pylint: disable=g-multiple-import
# pylint: disable=unused-import
# pylint: disable=g-importing-member

from ._src.core.config import config
from ._src.core.exceptions import (
    CapExceededError,
    PolycorrInternalError,
    SchemaError,
    WindowTooSmallError,
)
from ._src.core.genpoly import Exponents, GenPoly
from ._src.core.lattice import (
    IndexBox,
    LatticePoint,
    LatticePolygon,
    SimplicialPolytope,
    boundary_points,
    canonical_key,
    interior_points,
    lattice_points,
    normalized_volume,
    orient2,
    orient_d,
    pick_holds,
    polytope_from_json,
    unimodular_transform,
)
from ._src.core.simplex_lp import find_nonnegative_solution
