# Copyright 2026 The Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the mnli C++ core.

Requests and configs use the same JSON schema as the ``mnli`` command-line
tool; they are passed as dicts and results come back as dicts.
"""

import json

from ._core import (
    ConfigError,
    ResourceLimitError,
    choice_probability,
    confidence_radius,
    exploration_threshold,
)
from . import _core

__all__ = [
    "ConfigError",
    "ResourceLimitError",
    "choice_probability",
    "confidence_radius",
    "evaluate",
    "exploration_threshold",
    "optimize",
    "simulate",
]


def evaluate(request):
    """Expected one-cycle profit of a decision; see ``mnli evaluate``."""
    return json.loads(_core._evaluate(json.dumps(request)))


def optimize(request):
    """Best decision for given parameters; see ``mnli optimize``."""
    return json.loads(_core._optimize(json.dumps(request)))


def simulate(config):
    """Runs a regret experiment and returns per-policy summaries."""
    return json.loads(_core._simulate(json.dumps(config)))
