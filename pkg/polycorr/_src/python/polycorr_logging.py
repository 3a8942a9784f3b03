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
"""Adds an identifier of the running job to Python log messages.

The CLI tags every line with the verb it is running, which keeps logs of
several processes sharing one cache apart.
"""

import logging
from absl import logging as absl_logging


# Adds a prefix containing the `identifier` to all new Python log messages.
def set_process_identifier_prefix(identifier: str) -> None:
  log_formatter = logging.Formatter(f'[{identifier}] %(message)s')
  absl_logging.get_absl_handler().setFormatter(log_formatter)


def clear_process_identifier_prefix() -> None:
  """Restores the default absl formatter."""
  absl_logging.get_absl_handler().setFormatter(absl_logging.PythonFormatter())
