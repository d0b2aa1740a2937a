"""Export budget planning for the data-stealing attack."""

from .budget import (
    MB,
    ExportPlan,
    StrategyCosts,
    best_strategy,
    crossover_budget,
    export_size,
    load_strategies,
    max_images,
    plan_export,
    with_preshared_decoder,
    with_quantized_decoder,
)
from .exceptions import BudgetOverflowError, StrategyFormatError
from .table4 import (
    Table4Row,
    brats_strategies,
    fl_budget_check,
    lits_strategies,
    table4_reproduction,
)

__all__ = [
    "BudgetOverflowError",
    "ExportPlan",
    "MB",
    "StrategyCosts",
    "StrategyFormatError",
    "Table4Row",
    "best_strategy",
    "brats_strategies",
    "crossover_budget",
    "export_size",
    "fl_budget_check",
    "lits_strategies",
    "load_strategies",
    "max_images",
    "plan_export",
    "table4_reproduction",
    "with_preshared_decoder",
    "with_quantized_decoder",
]
