"""Grushin-type metrics ds / d_E(., Y)^beta on R^n."""

from ._core import (
    DimensionError,
    DistanceBracket,
    GrushinError,
    NumericalError,
    PreconditionError,
    ResourceLimit,
    Space,
    SpecError,
    UnsupportedDimension,
    __version__,
    admissible_a,
    annulus_sample,
    chart_constants,
    chart_length_check,
    check_curvature,
    check_holder,
    check_quasisymmetry,
    cone_length_check,
    cone_map,
    decompose,
    distance,
    distance_to_singular,
    estimate_doubling,
    eta_control,
    gaussian_curvature,
    grushin_chart,
    grushin_chart_inverse,
    holder_constant_uniform,
    lower_bound,
    measure_distortion,
    nondoubling_balls,
    path_length,
    refine,
    snowflake_parameter,
)


def space(dimension, beta, singular, lo, hi, resolution=0.02, seed=1):
    """Space from Python values; `singular` is a list of primitive dicts."""
    import json

    return Space.from_json(
        json.dumps(
            {
                "dimension": dimension,
                "beta": beta,
                "singular": singular,
                "bbox": {"lo": list(lo), "hi": list(hi)},
                "solver": {"resolution": resolution, "seed": seed},
            }
        )
    )
