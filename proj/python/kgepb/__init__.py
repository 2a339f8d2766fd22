# Copyright 2026 The kgepb Authors
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
#
"""Knowledge-graph embedding recommender privacy workbench."""

from ._core import (
    AttackSetup,
    Error,
    ExperimentConfig,
    Graph,
    Model,
    TrainConfig,
    attack,
    list_utility,
    run_stage,
    sanitize,
    tradeoff,
    train,
)

__all__ = [
    "AttackSetup",
    "Error",
    "ExperimentConfig",
    "Graph",
    "Model",
    "TrainConfig",
    "attack",
    "list_utility",
    "run_stage",
    "sanitize",
    "tradeoff",
    "train",
]
