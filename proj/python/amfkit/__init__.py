# Copyright 2026 The amfkit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the amfkit C++ core."""

from ._amfkit import (
    DatasetTable,
    NumericalError,
    ValidationError,
    auc,
    balanced_accuracy,
    compute_report,
    config_keys,
    default_config,
    dynamic_pos_weight,
    focal_loss,
    generate_synthetic,
    gradcheck,
    load_csv,
    load_embeddings,
    lodo_folds,
    ms_mine,
    stratified_split,
    train,
)

__all__ = [
    "DatasetTable",
    "NumericalError",
    "ValidationError",
    "auc",
    "balanced_accuracy",
    "compute_report",
    "config_keys",
    "default_config",
    "dynamic_pos_weight",
    "focal_loss",
    "generate_synthetic",
    "gradcheck",
    "load_csv",
    "load_embeddings",
    "lodo_folds",
    "ms_mine",
    "stratified_split",
    "train",
]
