"""Curriculum-ordered maximum-entropy policy learning in a square room."""

from ._core import (
    CurirlError,
    DemoSet,
    EnvironmentConfig,
    EvaluationSummary,
    LossBreakdown,
    PolicyModel,
    Position,
    TrainResult,
    Trajectory,
    entropy,
    evaluate_loss,
    evaluate_policy,
    gradient_check,
    init_model,
    load_checkpoint,
    load_demo_set,
    order_demonstrations,
    save_checkpoint,
    softmax,
    synth_demos,
    train,
    visitation_frequencies,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
