"""Coupled-line wave transfer matrices, balanced DC-blocker modeling, and
Through-Line de-embedding."""

from .calibration import (
    CalStandardSet,
    ErrorBox,
    deembed,
    extract_error_box,
    synth_cal_data,
)
from .coupled import (
    CapacitancePerLength,
    CoupledSectionSpec,
    capacitance_from_cr,
    cr_from_even_odd,
    d_imag_from_capacitance,
    d_imag_from_cr,
    electrical_length,
    even_odd_from_cr,
    is_involutory,
    m_total,
    m_total_discrete_oracle,
    section_m,
)
from .dcblocker import (
    DcBlockerParams,
    PRESETS,
    SweepResult,
    TABLE1,
    TABLE2,
    bandwidth_metric,
    build_path_m,
    common_mode_s,
    diff_mode_s,
    single_stage_contour,
    sweep,
)
from .fileio import (
    TouchstoneNetwork,
    parse_design_config,
    parse_touchstone,
    write_sweep_csv,
    write_touchstone,
)
from .network import (
    FourPortM,
    FourPortS,
    TwoPortS,
    TwoPortT,
    cascade,
    cascade_t,
    ideal_inverter,
    line_t,
    m_delay,
    m_line_pair,
    reduce_open_2_3,
    reduction_to_s,
    renormalize,
    rotate_m,
    s4_from_m,
    s_from_t,
    series_pair_oracle,
    t_from_s,
)

__version__ = "0.1.0"
