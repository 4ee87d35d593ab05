"""Indoor light classification, spectrum reconstruction, and PV energy estimation."""

from .classes import (
    ARTIFICIAL_CLASSES,
    BASE_TAXONOMY,
    CANONICAL_ORDER,
    EXTENDED_TAXONOMY,
    LightClass,
    NATURAL_CLASSES,
    NATURAL_SUBCLASSES,
    class_from_id,
    is_artificial,
    is_natural,
    taxonomy_classes,
)
from .classifiers import (
    METHODS,
    METHOD_NAMES,
    ClassifierMethod,
    TrainedClassifier,
    load_model,
    method_by_name,
    predict,
    predict_batch,
    save_model,
    train,
)
from .errors import (
    CannotSize,
    ConfigError,
    ConverterRangeExceeded,
    DegenerateSpectrum,
    DegenerateTraining,
    EmptyResult,
    InputError,
    InvalidChannelValue,
    InvalidFold,
    InvalidGrid,
    InvalidTimeline,
    LuxHarvestError,
    MissingCorrection,
    MissingReference,
    NumericalError,
    NumericalFailure,
    OutOfRange,
    ParseError,
    ShapeMismatch,
    StageError,
    TaxonomyError,
    UnknownClass,
)
from .defaults import (
    default_chain,
    default_converter,
    default_library,
    default_scenario,
    default_training_dataset,
    init_workdir,
    office_scenario,
    switching_scenario,
)
from .evaluation import (
    CVResult,
    HoldoutResult,
    SurfaceGrid,
    SweepReport,
    cross_validate,
    decision_surface,
    evaluate_holdout,
    read_sweep_csv,
    surface_to_csv,
    sweep,
    write_sweep_csv,
)
from .features import (
    ALL_CONFIG_LETTERS,
    NORMALIZATIONS,
    FeatureConfig,
    FeatureVector,
    LabeledDataset,
    available_configs,
    config_is_valid,
    extract,
    extract_matrix,
    feature_config,
    kfold_split,
    make_training_dataset,
    normalized_difference,
)
from .pipeline import (
    DEFAULT_CLASSIFIER,
    DayEnergy,
    EvaluationReport,
    PipelineConfig,
    SwitchEvent,
    SwitchingSummary,
    class_family,
    daily_energy_wh,
    load_pipeline_config,
    run_pipeline,
    switching_ratio,
)
from .pv import (
    EnergyEstimate,
    HarvestChain,
    MppPoint,
    PVConverter,
    SizingRecommendation,
    chain_output,
    estimate_energy,
    j_at,
    jsc,
    load_converter,
    mpp,
    pmic_efficiency,
    read_chain_json,
    recommend_area,
    voc,
)
from .reconstruct import (
    ConstantCorrection,
    LuxCorrection,
    PolynomialCorrection,
    ReferenceLibrary,
    STRONG_DAYLIGHT_MIN_LUX,
    classify_natural_subclass,
    correct_lux,
    correct_lux_detailed,
    fit_natural_correction,
    fit_twin_corrections,
    read_library,
    reconstruct,
    twin_reference_library,
    write_library,
)
from .report import report
from .spectral import (
    LUMINOUS_EFFICACY_LM_PER_W,
    SPD,
    PhotopicCurve,
    illuminance,
    integrate,
    mix,
    photopic_curve,
    read_spd_csv,
    resample,
    scale_to_lux,
    write_spd_csv,
)
from .twin import (
    ChannelResponsivity,
    PseudoSpectrum,
    Scenario,
    SensorTwin,
    Source,
    SourceProfile,
    Timeline,
    channel_value,
    default_twin,
    reference_spd,
    scenario_from_json,
    scenario_to_json,
    sense,
    simulate_day,
)

__version__ = "0.1.0"
