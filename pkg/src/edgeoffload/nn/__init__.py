"""Hand-rolled neural network toolkit on numpy: dense layers, attention,
Gumbel-softmax sampling, Adam, finite-difference checks, checkpoints."""

from .attention import (AttentionSpec, attention_backward, attention_forward,
                        multi_head_attention, register_attention)
from .checkpoint import (load_stores, read_tensors, save_stores, write_tensors)
from .gradcheck import GradCheckReport, finite_difference_check, relative_error
from .ops import (dense, dense_backward, dropout, dropout_backward,
                  log_softmax, log_softmax_backward, relu, relu_backward,
                  sigmoid, sigmoid_backward, softmax, softmax_backward, tanh,
                  tanh_backward)
from .sampling import (gumbel_noise, gumbel_softmax, gumbel_softmax_backward,
                       sample_categorical, tempered_softmax,
                       tempered_softmax_backward)
from .store import ParamStore, adaptive_moment_step

__all__ = [
    "AttentionSpec", "attention_backward", "attention_forward",
    "multi_head_attention", "register_attention", "load_stores",
    "read_tensors", "save_stores", "write_tensors", "GradCheckReport",
    "finite_difference_check", "relative_error", "dense", "dense_backward",
    "dropout", "dropout_backward", "log_softmax", "log_softmax_backward",
    "relu", "relu_backward", "sigmoid", "sigmoid_backward", "softmax",
    "softmax_backward", "tanh", "tanh_backward", "gumbel_noise",
    "gumbel_softmax", "gumbel_softmax_backward", "sample_categorical",
    "tempered_softmax", "tempered_softmax_backward", "ParamStore",
    "adaptive_moment_step",
]
