"""Label-free structure scores for dense self-supervised representations."""

from .clustering import ClusterAssignment, assign, kmeans
from .correlation import TauReport, kendall_tau, tau_pvalue
from .dimensionality import ErankReport, effective_rank, m_dim
from .dse import (CheckpointSeries, ComponentRecord, MetricConfig, dse_components,
                  dse_series, lambda_from_series)
from .errors import (ClusterError, ConfigError, DataError, DimensionError, DSEError,
                     DSEWarning, FormatError, IoError, LengthError, SampleError,
                     SeriesError)
from .selection import SelectionResult, local_maxima, select_top
from .separability import (SeparabilityConfig, SeparabilityStats, class_separability,
                           inter_distance, intra_radius)
from .tensor_io import (EmbeddingBatch, RepresentationMatrix, flatten_all,
                        load_embeddings, sample_independent, save_embeddings)

__version__ = "0.1.0"
