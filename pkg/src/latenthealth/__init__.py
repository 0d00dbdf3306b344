"""Zero-shot bearing condition monitoring with a beta-VAE latent-distance health index.

The VAE is trained on normal and degraded vibration windows only. A window's
health index is the distance of its latent mean from the normal reference
mean; two max-distance thresholds split the index into normal, degraded and
severe, so severe faults are caught without ever being seen in training.
"""

from .data import (CONDITIONS, IMS_SET2_PLAN, LabelPlan, NormStats, RawRecording, SignalWindow,
                   add_awgn, load_ims_files, segment, synth_generate, synth_run)
from .errors import (ArchitectureError, ContaminationError, DataError, DegenerateThresholdError,
                     ShapeError)
from .health import (METRICS, HealthRecord, Monitor, ReferenceMean, ThresholdSet, classify,
                     distance, fit_thresholds, health_index, reference_mean, score_run_to_failure)
from .pipeline import Dataset, dataset_from_recordings, dataset_from_windows, synthetic_dataset
from .vae import (LatentCode, TrainConfig, VaeArch, VaeParams, encode, kl_divergence,
                  load_checkpoint, save_checkpoint, train)

__version__ = "0.1.0"
