"""b-value seismicity features and a small backpropagation network for
short-term earthquake occurrence forecasting."""

from .catalog import Catalog, CatalogFilter, EarthquakeEvent, filter_catalog, parse_catalog, read_catalog
from .errors import (
    BValNetError,
    CatalogParseError,
    DegenerateWindowError,
    InsufficientDataError,
    ModelFormatError,
    ValidationError,
)
from .evaluation import ConfusionMatrix, MetricsReport, ThresholdPolicy, classify, metrics, render_report
from .mlp import Network, NetworkConfig, Normalizer, TrainParams, forward, gradients, init_network, predict, train
from .seismicity import (
    PRESETS,
    BValueSeries,
    Dataset,
    FeatureVector,
    RegionConfig,
    augment_dataset,
    b_series,
    build_dataset,
    delta_features,
    estimate_b,
    max_prior_week,
    prob_m6,
    target,
)
from .synthcat import OmoriParams, SynthParams, gen_catalog, yearly_stats

__version__ = "0.1.0"
