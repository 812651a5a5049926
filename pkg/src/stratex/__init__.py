"""Strategy extraction from agent trajectories in symbolic grid games."""

from .align import AlignParams, align_weighted, build_matrix, classic_sw, traceback
from .core import Event, EventSpec, Step, Strategy, Trajectory, events_of, is_subtrajectory, satisfies
from .envs import default_config, make_env, vocabulary
from .harness import ExperimentConfig, export_report, run_experiment
from .pipeline import discover, likelihoods, run_pipeline

__version__ = "0.1.0"

__all__ = ["AlignParams", "Event", "EventSpec", "ExperimentConfig", "Step", "Strategy", "Trajectory",
           "align_weighted", "build_matrix", "classic_sw", "default_config", "discover", "events_of",
           "export_report", "is_subtrajectory", "likelihoods", "make_env", "run_experiment", "run_pipeline",
           "satisfies", "traceback", "vocabulary"]
