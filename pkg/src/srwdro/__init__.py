"""Statistically robust Wasserstein DRO: exact desk-scale oracles,
KL-constrained reweighting, penalty-based adversarial training, and
generalization certificates on finite spaces."""

from .core import (AmbiguityParams, Architecture, Dataset,
                   DiscreteDistribution, ModelParams, Sample, grad_theta,
                   grad_x, init_params, model_loss, predict)
from .adversary import AttackConfig, dhat, grad_dhat, pgd_attack, udr_attack
from .certificates import (CertificateInputs, certificate_probability,
                           covering_number_greedy, delta_of,
                           feasibility_monte_carlo, robustness_certificate)
from .dro_oracle import (FiniteInstance, dual_value, minimax_gap,
                         reachable_distributions, simplex_grid, sr_loss_exact)
from .exceptions import (ConfigError, DimensionMismatchError,
                         InvalidDistributionError, NumericError,
                         ProblemTooLargeError, SrwdroError)
from .harness import (TrainConfig, TrainHistory, evaluate, load_model,
                      run_experiment, save_model, train)
from .metrics import (CostMatrix, kl_divergence, lp_eps, lp_metric,
                      tv_distance, wasserstein_p)
from .reweight import ReweightSolution, kl_dual_value, solve_weights
from .transport import kernel_name, solve_transport

__version__ = "0.1.0"

__all__ = [
    "AmbiguityParams", "Architecture", "AttackConfig", "CertificateInputs",
    "ConfigError", "CostMatrix", "Dataset", "DimensionMismatchError",
    "DiscreteDistribution", "FiniteInstance", "InvalidDistributionError",
    "ModelParams", "NumericError", "ProblemTooLargeError", "ReweightSolution",
    "Sample", "SrwdroError", "TrainConfig", "TrainHistory",
    "certificate_probability", "covering_number_greedy", "delta_of", "dhat",
    "dual_value", "evaluate", "feasibility_monte_carlo", "grad_dhat",
    "grad_theta", "grad_x", "init_params", "kernel_name", "kl_divergence",
    "kl_dual_value", "load_model", "lp_eps", "lp_metric", "minimax_gap",
    "model_loss", "pgd_attack", "predict", "reachable_distributions",
    "robustness_certificate", "run_experiment", "save_model", "simplex_grid",
    "solve_transport", "solve_weights", "sr_loss_exact", "train",
    "tv_distance", "udr_attack", "wasserstein_p",
]
