"""Grid laboratory for maximal operators, oscillation seminorms and
Muckenhoupt-type weight constants, with an empirical inequality harness."""

from .grid import (
    GridCube,
    GridError,
    GridFunction,
    PrefixTable,
    WeightedMeasure,
    enumerate_cubes,
    read_grid,
    triple,
    write_grid,
)
from .operators import (
    DegenerateInputError,
    MaximalField,
    local_maximal,
    maximal,
    maximal_naive,
    nonlocal_bound_probe,
    sharp_maximal,
    sharp_maximal_naive,
    weak_l1_quasinorm,
)
from .oscillation import (
    SeminormReport,
    WeightConstants,
    a1_constant,
    blo_seminorm,
    blo_w_seminorm,
    bmo_seminorm,
    coifman_rochberg,
    exp_weight,
    fujii_wilson,
    llogl_ratio,
    log_plus_transform,
    reverse_holder_check,
)
from .verify import (
    CalibrationRun,
    RatioFields,
    RatioRecord,
    StaleCalibrationError,
    TailProfile,
    char_lower_bound,
    gamma_growth_check,
    good_lambda,
    layer_cake_lp,
    local_pnorm_ratio,
    pnorm_ratio,
    tail_profile,
    x_estimate,
)

__version__ = "0.1.0"

__all__ = [
    "CalibrationRun",
    "DegenerateInputError",
    "GridCube",
    "GridError",
    "GridFunction",
    "MaximalField",
    "PrefixTable",
    "RatioFields",
    "RatioRecord",
    "SeminormReport",
    "StaleCalibrationError",
    "TailProfile",
    "WeightConstants",
    "WeightedMeasure",
    "a1_constant",
    "blo_seminorm",
    "blo_w_seminorm",
    "bmo_seminorm",
    "char_lower_bound",
    "coifman_rochberg",
    "enumerate_cubes",
    "exp_weight",
    "fujii_wilson",
    "gamma_growth_check",
    "good_lambda",
    "layer_cake_lp",
    "llogl_ratio",
    "local_maximal",
    "local_pnorm_ratio",
    "log_plus_transform",
    "maximal",
    "maximal_naive",
    "nonlocal_bound_probe",
    "pnorm_ratio",
    "read_grid",
    "reverse_holder_check",
    "sharp_maximal",
    "sharp_maximal_naive",
    "tail_profile",
    "triple",
    "weak_l1_quasinorm",
    "write_grid",
    "x_estimate",
]
