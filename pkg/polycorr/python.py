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
"""polycorr computational API."""

# pylint: disable=g-importing-member
# pylint: disable=g-multiple-import
# pylint: disable=unused-import

from ._src.core.config import config
from ._src.python.corpus import (
    CorpusReport,
    check_corpus,
    check_polygon,
    generate_corpus,
    random_polygon,
)
from ._src.python.diffops import DiffOp, compose, monomials
from ._src.python.genfun import (
    correlator_direct,
    subdivision_genfun,
    triangulation_counts,
    without_deformation,
)
from ._src.python.regularity import (
    SecondaryPolytope,
    is_regular,
    regularity_witness,
    secondary_polytope,
    secondary_polytope_vertices,
)
from ._src.python.tensor import (
    OrientedFacet,
    TensorCorrelator,
    TensorLOperator,
    correlator_tensor_direct,
    correlator_tensor_wick,
    slot_weights,
    tensor_l_operator,
    tensor_propagator,
    virasoro_like_check,
)
from ._src.python.toric import (
    ConvexPolytope,
    FaceLattice,
    HodgeNumbers,
    dual_face,
    dual_polytope,
    face_lattice,
    hodge_numbers,
    is_reflexive,
    lattice_points_nd,
    reflexive_polygon_census,
    relative_interior_points,
)
from ._src.python.trees import (
    Tree,
    TreeCell,
    enumerate_tree_cells,
    enumerate_trees,
    glue_tree,
    is_convex_union,
    octahedron_check,
    polytope_of_tree,
    tree_canonical_form,
    tree_gluing_set,
    tree_polytope_collisions,
)
from ._src.python.triangulations import (
    CharFunction,
    Subdivision,
    Triangulation,
    char_function,
    count_triangulations,
    enumerate_subdivisions,
    enumerate_triangulations,
    satisfies_euler_count,
)
from ._src.python.ward import (
    CorrelatorSum,
    check_virasoro,
    check_virasoro_grid,
    hmm_virasoro,
    insert_ihat,
    ward_residual,
)
from ._src.python.wick import (
    FeynmanExpander,
    GaussianSpec,
    MatrixEntry,
    correlator_wick,
    genus_split,
    hmm_trace_moment,
    hmm_trace_moment_by_index_sum,
    subdivision_genfun_wick,
    wick_expectation,
)
