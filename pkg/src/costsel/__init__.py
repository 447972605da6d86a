"""Cost-sensitive forward feature selection and a Monte-Carlo study of
how the benefit-cost ratio trades relevant features for cheap noise."""

__version__ = "0.1.0"

from .criteria import (  # noqa: E402
    AdaptedBCR,
    BenefitCostRatio,
    CostVector,
    PlainGain,
    WeightedSum,
    epsilon_floor,
    log_rescale,
    score,
)
from .experiment import Outcome, run_grid, run_replicate, run_setting  # noqa: E402
from .model import Dataset, FittedLinearModel, Role, delta_rmse, fit_ols, predict, rmse  # noqa: E402
from .selection import StepResult, select_step, sfs  # noqa: E402
from .simgen import RngStream, SimConfig, draw_dataset, relevant_cost_vector  # noqa: E402

__all__ = [
    "AdaptedBCR", "BenefitCostRatio", "CostVector", "PlainGain", "WeightedSum",
    "epsilon_floor", "log_rescale", "score",
    "Outcome", "run_grid", "run_replicate", "run_setting",
    "Dataset", "FittedLinearModel", "Role", "delta_rmse", "fit_ols", "predict", "rmse",
    "StepResult", "select_step", "sfs",
    "RngStream", "SimConfig", "draw_dataset", "relevant_cost_vector",
]
