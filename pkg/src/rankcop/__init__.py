"""Bayesian Gaussian-copula estimation for mixed data via the extended rank likelihood."""

__version__ = "0.1.0"

from .data import (  # noqa: E402
    Dataset,
    EmpiricalMarginal,
    ObservedColumn,
    empirical_quantile,
    load_csv,
    normal_scores,
    write_csv,
)
from .posterior import PosteriorSamples, read_posterior, write_posterior  # noqa: E402
from .sampler import (  # noqa: E402
    LatentState,
    McmcConfig,
    PriorSpec,
    gibbs_scan,
    initialize_latent,
    run_chain,
    run_chains,
)
from .analysis import (  # noqa: E402
    autocorrelation,
    correlation_quantiles,
    dependence_graph,
    effective_sample_size,
    regression_coefficients,
    summarize,
)
from .predictive import conditional_table, sample_predictive  # noqa: E402
from .baseline import BiasScenario, bias_study, pseudo_rho_correlation, pseudo_rho_product  # noqa: E402

__all__ = [
    "Dataset",
    "EmpiricalMarginal",
    "ObservedColumn",
    "empirical_quantile",
    "load_csv",
    "normal_scores",
    "write_csv",
    "PosteriorSamples",
    "read_posterior",
    "write_posterior",
    "LatentState",
    "McmcConfig",
    "PriorSpec",
    "gibbs_scan",
    "initialize_latent",
    "run_chain",
    "run_chains",
    "autocorrelation",
    "correlation_quantiles",
    "dependence_graph",
    "effective_sample_size",
    "regression_coefficients",
    "summarize",
    "conditional_table",
    "sample_predictive",
    "BiasScenario",
    "bias_study",
    "pseudo_rho_correlation",
    "pseudo_rho_product",
]
