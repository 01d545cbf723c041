"""System-level simulator for power-domain NOMA at large cluster sizes.

Core pieces: reproducible Rayleigh channel draws (`channel`), NOMA power
allocation and SIC feasibility (`allocation`), achievable-rate formulas for
SISO / MIMO / CoMP / cooperative NOMA (`rates`), Monte Carlo estimators for
outage capacity and diversity order (`montecarlo`), and a config-driven
experiment layer with CLI and HTTP front ends.
"""

from .allocation import PowerAllocation, SicConstraint, SicVerdict, geometric_fractions, validate_sic_gaps
from .channel import FadingConfig, LinkGain, LinkGains, TopologyConfig, draw_fading, draw_fading_block, realize_links, realize_links_block
from .experiment import ConfigError, ExperimentConfig, SweepSpec, build_plan, build_scenario, emit_curve, parse_config, run_experiment
from .montecarlo import (
    DiversityOrderEstimate,
    EstimationError,
    OutageCurve,
    OutagePoint,
    TrialPlan,
    empirical_quantile,
    estimate_diversity_order,
    outage_capacity,
    outage_curve,
    outage_probability,
    required_power_db,
    run_trials,
)
from .rates import (
    CompTopology,
    CoopCluster,
    OrderedCluster,
    coop_effective_gain,
    order_by_gain,
    rate_comp_all,
    rate_comp_center,
    rate_comp_edge,
    rate_coop_noma,
    rate_mimo_noma,
    rate_oma_baseline,
    rate_siso_noma,
    zf_residual_ici,
)
from .scenarios import CompScenario, CoopScenario, MimoScenario, SisoScenario

__version__ = "0.1.0"
