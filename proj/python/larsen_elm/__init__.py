"""Selective ensembles of randomized networks with variable filtering.

Thin re-export of the compiled extension.  Everything lives in ``_core``;
this package exists so the module can be imported by its public name.
"""

from larsen_elm._core import (  # noqa: F401
    ClosedFormWeights,
    Dataset,
    ElmConfig,
    ElmModel,
    EnsembleModel,
    GaConfig,
    GaResult,
    GasenResult,
    LarsPath,
    LarsStep,
    LarsenConfig,
    NoiseProfile,
    StandardizeStats,
    StandardizedPair,
    VariableSelection,
    bag_sample,
    blend_noise,
    correlation_matrix,
    cumulative_correlation,
    default_spec_json,
    derive_seed,
    elm_from_json,
    elm_hidden_matrix,
    elm_predict,
    elm_train,
    ensemble_error,
    ensemble_from_json,
    ga_evolve,
    gasen_select,
    gasen_select_predictions,
    gen_two_sines,
    larsen_fit,
    larsen_predict,
    load_csv,
    lstsq,
    mrsr_path,
    normalize_weights,
    optimal_weights_closed_form,
    pseudoinverse,
    run_experiment_json,
    save_csv,
    select_variables,
    seven_sigmas,
    split,
    split_at,
    standardize,
    ten_sigmas,
)

__all__ = [name for name in dir() if not name.startswith("_")]
