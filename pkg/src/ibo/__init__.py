"""
Cost-aware multi-fidelity Bayesian optimization with importance-sampled SGD.
"""

from .errors import (AcquisitionError, ConfigError, DatasetError, GPFitError, IBOError,
                     KernelError, McmcError, ProblemError, ReportingError, RunAbortedError,
                     TraceIOError, TrainingError)
from .kernels import KernelKind, KernelSpec, kernel_cost, kernel_objective
from .gp import GPEnsemble, GPModel, gp_fit, gp_posterior, log_marginal_likelihood
from .mcmc import fit_ensemble, sample_hyperparams_mcmc
from .acquisition import (PminEstimate, RepresenterSet, acquisition_ibo, entropy,
                          estimate_pmin, expected_entropy_reduction, maximize_acquisition,
                          select_representers)
from .engine import incumbent, initialize, propose, run_bo
from .design import latin_hypercube
from .config_parser import parse_config, serialize_config
from .summary import SummaryTable, summarize

__version__ = "1.0.0"

__all__ = [
    # Errors
    'IBOError',
    'KernelError',
    'GPFitError',
    'McmcError',
    'AcquisitionError',
    'TrainingError',
    'ProblemError',
    'DatasetError',
    'ConfigError',
    'TraceIOError',
    'ReportingError',
    'RunAbortedError',

    # GP
    'KernelKind',
    'KernelSpec',
    'kernel_objective',
    'kernel_cost',
    'GPModel',
    'GPEnsemble',
    'gp_fit',
    'gp_posterior',
    'log_marginal_likelihood',
    'sample_hyperparams_mcmc',
    'fit_ensemble',

    # Acquisition
    'RepresenterSet',
    'PminEstimate',
    'select_representers',
    'estimate_pmin',
    'entropy',
    'expected_entropy_reduction',
    'acquisition_ibo',
    'maximize_acquisition',

    # Engine
    'latin_hypercube',
    'initialize',
    'propose',
    'incumbent',
    'run_bo',

    # Reporting
    'parse_config',
    'serialize_config',
    'SummaryTable',
    'summarize',
]
