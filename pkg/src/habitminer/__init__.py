"""Habit extraction from smart-home appliance usage logs."""
from .clustering import (
    AgglomerativeParams,
    DbscanParams,
    KMeansParams,
    Linkage,
    agglomerative,
    dbscan,
    euclidean,
    kmeans,
)
from .habits import extract_habits, format_report, parse_report
from .ingest import IngestConfig, parse_event_log, parse_power_csv, read_intervals_csv, write_intervals_csv
from .model import (
    NOISE,
    ActivityInterval,
    Clustering,
    ClusterQuality,
    HabitProfile,
    Method,
    PipelineResult,
    PointSet,
    normalize_interval,
)
from .pipeline import PipelineConfig, dbscan_fallback, profile_activity, sweep_partitional, validate_noise
from .quality import elbow_eps, noise_metric, silhouette_score
from .synth import PlantedCluster, PlantedSpec, generate

__version__ = "0.1.0"
