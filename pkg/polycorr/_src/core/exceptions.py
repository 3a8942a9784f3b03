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
"""Exceptions raised by polycorr."""


class PolycorrInternalError(Exception):
  """An internal consistency check failed."""


class SchemaError(ValueError):
  """Input does not match the expected polytope, tree or job schema."""


class CapExceededError(RuntimeError):
  """A configured resource cap was hit before the computation finished."""


class WindowTooSmallError(CapExceededError):
  """An operator truncation window cannot decide the requested identity."""
