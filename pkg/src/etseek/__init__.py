"""Event-triggered extremum seeking on a scalar quadratic map.

Simulates the discrete-time seeking loop with a static relative-error
trigger, its averaged counterpart, and the analysis checks (gradient
expansion, Lyapunov decay, convergence envelopes) that tie the two together.
"""

from etseek._backend import backend_name
from etseek.analysis import (
    DecayReport,
    EnvelopeCheck,
    EnvelopeReport,
    EventStats,
    ExpansionTerms,
    check_decay,
    convergence_envelopes,
    decay_rate,
    event_statistics,
    gradient_expansion,
    lyapunov_sequence,
    truncated_gradient,
)
from etseek.average import (
    AvgRecord,
    AvgState,
    AvgTrajectory,
    ZenoEstimate,
    avg_run,
    avg_step,
    closed_form_between_events,
    coefficients,
    min_inter_event_estimate,
)
from etseek.cli import ConfigError, ExperimentConfig, parse_config, run_experiment, sweep
from etseek.escore import (
    EventEntry,
    EventLog,
    LoopSpec,
    MapSpec,
    SimState,
    StepRecord,
    Trajectory,
    demodulate,
    dither,
    eval_map,
    initial_state,
    integrate,
    run,
    step,
)
from etseek.trigger import (
    AssumptionReport,
    TriggerSpec,
    measurement_error,
    should_trigger,
    validate_assumption,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionReport",
    "AvgRecord",
    "AvgState",
    "AvgTrajectory",
    "ConfigError",
    "DecayReport",
    "EnvelopeCheck",
    "EnvelopeReport",
    "EventEntry",
    "EventLog",
    "EventStats",
    "ExpansionTerms",
    "ExperimentConfig",
    "LoopSpec",
    "MapSpec",
    "SimState",
    "StepRecord",
    "Trajectory",
    "TriggerSpec",
    "ZenoEstimate",
    "avg_run",
    "avg_step",
    "backend_name",
    "check_decay",
    "closed_form_between_events",
    "coefficients",
    "convergence_envelopes",
    "decay_rate",
    "demodulate",
    "dither",
    "eval_map",
    "event_statistics",
    "gradient_expansion",
    "initial_state",
    "integrate",
    "lyapunov_sequence",
    "measurement_error",
    "min_inter_event_estimate",
    "parse_config",
    "run",
    "run_experiment",
    "should_trigger",
    "step",
    "sweep",
    "truncated_gradient",
    "validate_assumption",
    "__version__",
]
