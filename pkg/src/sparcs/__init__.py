"""Spectral parametrization and architecture search for feedforward nets.

The adjacency matrix of a layered network (skip connections included) is
parametrized by its eigenvector blocks and eigenvalues; every weight bundle
is a closed-form function of those factors.  Training the factors with a
sparsity penalty on the hidden eigenvalues turns weight learning and
architecture search into the same gradient descent.
"""

from ._version import VERSION as __version__
from .analysis import (
    PruningCurve,
    eigenvalue_histogram,
    gamma_norm,
    gamma_tensor,
    param_count_comparison,
    r2_score,
    spectral_prune,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .datasets import Dataset, add_bias_column, gen_family, gen_teacher, load_csv, save_csv
from .errors import (
    CapacityError,
    ConfigError,
    ConsistencyError,
    DegeneracyError,
    DimensionError,
    ParseError,
    SparcsError,
    StructuralError,
    TrainingDivergedError,
)
from .network import (
    ActivationTrace,
    Gradients,
    backward,
    finite_difference_gradients,
    forward,
)
from .spectral import (
    DirectModel,
    SpectralParams,
    assemble_dense_adjacency,
    binomial_identities,
    export_direct,
    init_perceptron,
    nilpotency_residual,
    phi_dense,
    phi_inverse_blocks,
    phi_inverse_polynomial,
    random_params,
    weight_blocks,
)
from .training import (
    AdamState,
    TrainConfig,
    TrainHistory,
    adam_step,
    init_adam,
    loss_total,
    regularizer_value,
    train,
)

__all__ = [
    "__version__",
    "SpectralParams",
    "DirectModel",
    "init_perceptron",
    "random_params",
    "weight_blocks",
    "phi_dense",
    "phi_inverse_blocks",
    "phi_inverse_polynomial",
    "assemble_dense_adjacency",
    "nilpotency_residual",
    "binomial_identities",
    "export_direct",
    "forward",
    "backward",
    "finite_difference_gradients",
    "ActivationTrace",
    "Gradients",
    "TrainConfig",
    "TrainHistory",
    "AdamState",
    "init_adam",
    "adam_step",
    "loss_total",
    "regularizer_value",
    "train",
    "Dataset",
    "gen_family",
    "gen_teacher",
    "add_bias_column",
    "save_csv",
    "load_csv",
    "save_checkpoint",
    "load_checkpoint",
    "gamma_tensor",
    "gamma_norm",
    "eigenvalue_histogram",
    "spectral_prune",
    "PruningCurve",
    "param_count_comparison",
    "r2_score",
    "SparcsError",
    "DimensionError",
    "DegeneracyError",
    "CapacityError",
    "StructuralError",
    "ConsistencyError",
    "TrainingDivergedError",
    "ParseError",
    "ConfigError",
]
