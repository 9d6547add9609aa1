# Copyright 2026 The QViT Authors.

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Quantum vision transformer: RBS-circuit simulation, pyramid orthogonal
layers, quantum attention and the jet-image data pipeline."""

from ._qvit import (
    Circuit,
    DimensionError,
    DomainError,
    Error,
    FormatError,
    Gate,
    GateKind,
    IoError,
    LoaderProgram,
    Model,
    NegativeDeterminantError,
    NotOrthogonalError,
    ValidationError,
    attention_circuit,
    attention_coefficient,
    attention_coefficient_dense,
    compile_matrix,
    generate_dataset,
    load_split,
    load_unary,
    loader_angles,
    loader_circuit,
    pyramid_circuit,
    pyramid_matrix,
    pyramid_wiring,
    rbs_decomposition,
    rbs_matrix,
    run_cli,
    simulate_dense,
    simulate_unary,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
