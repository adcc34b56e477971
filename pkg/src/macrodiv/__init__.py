"""Rate analysis for multi-transmitter downlinks over intermittent block
fading: closed-form ergodic/outage capacities, Monte Carlo estimators for
the practical transmission schemes, and the worst-case analysis under
coarse time synchronization."""

from .channel import (
    BlockageParams,
    ChannelConfig,
    ChannelState,
    RngStream,
    alpha_ccdf,
    alpha_pmf,
    effective_scalar_channel,
    sample_states,
    sample_stationary_state,
    stationary_blockage_prob,
    step_blockage,
)
from .closed_forms import (
    OutageSolution,
    async_capacity_limit,
    async_effective_snr,
    async_outage_limit,
    ergodic_capacity,
    outage_capacity,
    rbar_closed,
    ring_expectation,
    ts_ergodic_rate,
    two_tx_alamouti_rate,
)
from .experiments import (
    CcdfRow,
    ResultRow,
    SweepConfig,
    emit,
    emit_text,
    parse_rows,
    run_ccdf,
    run_sweep,
)
from .ofdm import (
    DelayProfile,
    HoeffdingReport,
    OfdmConfig,
    WorstCaseDeltaReport,
    async_phase_div_outage,
    hoeffding_check,
    ncjt_async_ergodic,
    pulse_autocorr,
    rate_at_delays,
    subcarrier_gain,
    verify_worst_case_delta,
    worst_case_capacity,
    worst_case_outage,
)
from .schemes import (
    SCHEME_KINDS,
    AlamoutiCheck,
    InstantRateSample,
    RateEstimate,
    SchemeSpec,
    alamouti_symbol_check,
    ccdf_points,
    conditional_rate_samples,
    ergodic_estimate,
    inst_rate,
    outage_from_samples,
    rate_samples,
    rbar2_mc,
    rbar_mc,
    rbar_out,
)

__version__ = "0.1.0"
