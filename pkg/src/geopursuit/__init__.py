"""geopursuit: discrete-time pursuit-evasion on geodesic metric spaces.

The pursuer re-aims along canonical geodesics at fixed correction
moments and wins (captures within radius epsilon) on compact spaces
satisfying the betweenness property; the package simulates the game,
verifies the metric properties involved at desk scale, and validates the
structural features of the resulting trajectories.
"""

from .core import (
    GeodesicPath,
    MembershipError,
    ParameterRangeError,
    Point,
    PursuitError,
    Space,
    SpaceDescriptor,
    SpaceMismatchError,
    ValidationError,
    between,
    betweenness_defect,
)
from .spaces import (
    ChebyshevDiskSpace,
    CircleSpace,
    EuclideanDiskSpace,
    EuclideanPlaneSpace,
    MetricTreeSpace,
    load_tree_edges,
    make_space,
)
from .engine import (
    Captured,
    Evaded,
    GameConfig,
    Moment,
    MotionLeg,
    Outcome,
    Trace,
    default_horizon_steps,
    distance_profile,
    lion_step,
    predict_lion,
    random_start_pair,
    run_game,
    sweep_capture_time,
)
from .strategies import (
    CircleRunner,
    EvaderStrategy,
    GreedyMaxDistance,
    RadialFlee,
    Scripted,
    Stationary,
    evader_move,
    make_evader,
)
from .properties import (
    PropertyReport,
    Quadruple,
    Violation,
    check_between_transitivity,
    check_betweenness,
    check_metric_convexity,
    check_ptolemy,
    midpoint_convexity_margin,
    search_ptolemy_violation,
)
from .diagnostics import (
    GoodCurveReport,
    LionGeodesyReport,
    MonotoneReport,
    RoundRecord,
    StepClassification,
    check_distance_monotone,
    check_lion_geodesic,
    classify_constant_step,
    detect_rounds,
    most_revisited_center,
    rho,
    validate_good_curve,
)
from .config import ConfigError, ExperimentConfig, parse_config
from .presets import DEMO_TREE_EDGES, PRESET_IDS, run_preset

__version__ = "0.1.0"
