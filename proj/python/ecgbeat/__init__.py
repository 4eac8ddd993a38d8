"""ECG heartbeat classification: preprocessing, image encoders, SMOTE and tree ensembles."""

from ._ecgbeat import (
    BEAT_LENGTH,
    FEATURE_DIM,
    IMAGE_SIDE,
    GbdtParams,
    IoError,
    Model,
    ParseError,
    RfParams,
    ValidationError,
    balance,
    bandpass_filter,
    butterworth_bandpass_sos,
    encode_beat,
    extract_features,
    fit_gbdt,
    fit_random_forest,
    gasf,
    macro_metrics,
    mtf,
    normalize_beat,
    paa,
    recurrence,
    resample,
    smote,
    synth_record,
)

__version__ = "0.1.0"

__all__ = [
    "BEAT_LENGTH",
    "FEATURE_DIM",
    "IMAGE_SIDE",
    "GbdtParams",
    "IoError",
    "Model",
    "ParseError",
    "RfParams",
    "ValidationError",
    "balance",
    "bandpass_filter",
    "butterworth_bandpass_sos",
    "encode_beat",
    "extract_features",
    "fit_gbdt",
    "fit_random_forest",
    "gasf",
    "macro_metrics",
    "mtf",
    "normalize_beat",
    "paa",
    "recurrence",
    "resample",
    "smote",
    "synth_record",
]
