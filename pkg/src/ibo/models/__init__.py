"""
Core data models for the IBO tuner.
"""

from .search_space import ConfigPoint, Dimension, DimKind, Scale, SearchSpace, as_matrix
from .observation import (EvalResult, Observation, TaskSemantics, TARGET_TASK,
                          check_task, denormalize_task, fraction_from_task,
                          presample_factor_from_task, task_from_fraction,
                          task_from_presample_factor)
from .trace_model import SCHEMA_VERSION, TIMING_FIELDS, TraceRecord
from .config_model import (AcquisitionConfig, BudgetMode, ExperimentConfig,
                           HyperPriors, InitScheme, McmcConfig, PriorSpec,
                           RunConfig, Strategy, StrategyKind, TrainerDefaults)

__all__ = [
    # Search space
    'ConfigPoint',
    'Dimension',
    'DimKind',
    'Scale',
    'SearchSpace',
    'as_matrix',

    # Observations
    'EvalResult',
    'Observation',
    'TaskSemantics',
    'TARGET_TASK',
    'check_task',
    'denormalize_task',
    'fraction_from_task',
    'presample_factor_from_task',
    'task_from_fraction',
    'task_from_presample_factor',

    # Trace
    'SCHEMA_VERSION',
    'TIMING_FIELDS',
    'TraceRecord',

    # Config
    'AcquisitionConfig',
    'BudgetMode',
    'ExperimentConfig',
    'HyperPriors',
    'InitScheme',
    'McmcConfig',
    'PriorSpec',
    'RunConfig',
    'Strategy',
    'StrategyKind',
    'TrainerDefaults',
]
