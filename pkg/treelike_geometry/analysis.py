"""Run the configured analyses and assemble reports; shared by the CLI and the explorer."""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from treelike_geometry.callbacks.base import AnalysisCallbackHandler, notify
from treelike_geometry.cluster_validity import kmeans
from treelike_geometry.config import AnalysisSettings, ClusterSettings, SynthSettings
from treelike_geometry.core_types import DistanceMatrix, EmbeddingSet, SEED_LIMIT
from treelike_geometry.distances import build_distance_matrix
from treelike_geometry.errors import GeometryError
from treelike_geometry.hyperbolicity import PAPER_SLACK_NOTE, exact_delta, sample_delta
from treelike_geometry.neighbor_joining import nj_scores
from treelike_geometry.preprocess import pca_fit_transform, rescale_to_ball
from treelike_geometry.report import (
    GeometryReport,
    InputDescriptor,
    PcaRecord,
    PreprocessRecord,
    RescaleRecord,
    SpaceSummary,
    SyntheticTable,
)
from treelike_geometry.synthetic import SyntheticSpec, space_distance_matrix
from treelike_geometry.ultrametricity import exact_ultrametricity, sample_ultrametricity

logger = logging.getLogger(__name__)

Callbacks = Sequence[AnalysisCallbackHandler] | None

TABLE_SPACES = ("sphere", "dense_graph", "poincare_disk")


def preprocess(
    embeddings: EmbeddingSet, settings: AnalysisSettings, *, pad: bool = False
) -> tuple[EmbeddingSet, PreprocessRecord, list[str]]:
    """Optional PCA, then rescaling into the ball when the metric is Poincaré."""
    notes: list[str] = []
    pca = PcaRecord()
    if settings.pca_variance is not None:
        embeddings, model = pca_fit_transform(embeddings, settings.pca_variance)
        pca = PcaRecord(
            enabled=True,
            variance_target=settings.pca_variance,
            out_dim=model.out_dim,
            retained_fraction=model.retained_fraction,
        )
        notes.append("PCA is applied before distance construction for either metric")

    rescale = RescaleRecord()
    if settings.metric == "poincare":
        embeddings, scalar = rescale_to_ball(embeddings, settings.ball_norm)
        rescale = RescaleRecord(enabled=True, scalar=scalar, target_max_norm=settings.ball_norm)
        notes.append(f"embeddings scaled by {scalar!r} so the largest norm is {settings.ball_norm!r}")
    return embeddings, PreprocessRecord(pad=pad, pca=pca, rescale=rescale), notes


def _run(analysis: str, callbacks: Callbacks, fn):
    try:
        return fn()
    except GeometryError as error:
        notify(callbacks, "on_analysis_error", analysis, str(error))
        raise


def analyze_matrix(
    matrix: DistanceMatrix, settings: AnalysisSettings, callbacks: Callbacks = None
) -> dict[str, object]:
    """Statistics for every analysis named in ``settings.analyses``, keyed by name."""
    common = {"workers": settings.workers, "block_size": settings.block_size, "callbacks": callbacks}
    results: dict[str, object] = {}
    if "delta" in settings.analyses:
        if settings.exact:
            results["delta"] = _run(
                "delta", callbacks, lambda: exact_delta(matrix, settings.formula, **common)
            )
        else:
            results["delta"] = _run(
                "delta",
                callbacks,
                lambda: sample_delta(matrix, settings.samples, settings.seed, settings.formula, **common),
            )
    if "ultra" in settings.analyses:
        if settings.exact:
            results["ultra"] = _run(
                "ultra", callbacks, lambda: exact_ultrametricity(matrix, settings.epsilon, **common)
            )
        else:
            results["ultra"] = _run(
                "ultra",
                callbacks,
                lambda: sample_ultrametricity(
                    matrix, settings.samples, settings.epsilon, settings.seed, **common
                ),
            )
    if "nj" in settings.analyses:
        results["nj"] = _run("nj", callbacks, lambda: nj_scores(matrix, callbacks=callbacks))
    return results


def _formula_notes(settings: AnalysisSettings) -> list[str]:
    return [PAPER_SLACK_NOTE] if "delta" in settings.analyses and settings.formula == "paper_slack" else []


def analyze_distance_matrix(
    matrix: DistanceMatrix,
    descriptor: InputDescriptor,
    settings: AnalysisSettings,
    callbacks: Callbacks = None,
) -> GeometryReport:
    notes = _formula_notes(settings)
    if descriptor.symmetrized:
        notes.append("asymmetric input replaced by (D + D^T) / 2")
    return GeometryReport(
        input=descriptor,
        metric="external",
        notes=notes,
        **analyze_matrix(matrix, settings, callbacks),
    )


def analyze_embeddings(
    embeddings: EmbeddingSet,
    descriptor: InputDescriptor,
    settings: AnalysisSettings,
    *,
    pad: bool = False,
    callbacks: Callbacks = None,
) -> GeometryReport:
    prepared, record, notes = preprocess(embeddings, settings, pad=pad)
    matrix = build_distance_matrix(prepared, settings.metric)
    return GeometryReport(
        input=descriptor,
        preprocessing=record,
        metric=settings.metric,
        notes=notes + _formula_notes(settings),
        **analyze_matrix(matrix, settings, callbacks),
    )


def cluster_embeddings(
    embeddings: EmbeddingSet,
    descriptor: InputDescriptor,
    settings: AnalysisSettings,
    cluster_settings: ClusterSettings,
    *,
    pad: bool = False,
    callbacks: Callbacks = None,
) -> GeometryReport:
    """k-means on the preprocessed embeddings; silhouette uses the configured metric."""
    prepared, record, notes = preprocess(embeddings, settings, pad=pad)
    result = _run(
        "cluster",
        callbacks,
        lambda: kmeans(
            prepared,
            cluster_settings.k,
            cluster_settings.seed,
            cluster_settings.max_iter,
            cluster_settings.tol,
            silhouette_matrix=build_distance_matrix(prepared, settings.metric),
            callbacks=callbacks,
        ),
    )
    return GeometryReport(
        input=descriptor, preprocessing=record, metric=settings.metric, cluster=result, notes=notes
    )


def table_seeds(settings: SynthSettings) -> list[int]:
    return [(settings.seed + offset) % SEED_LIMIT for offset in range(settings.seeds)]


def synthetic_table(
    settings: SynthSettings,
    *,
    workers: int = 1,
    block_size: int = 8192,
    callbacks: Callbacks = None,
) -> SyntheticTable:
    """Exact four-point δ_avg of sphere, dense-graph and disk spaces over consecutive seeds."""
    seeds = table_seeds(settings)
    summaries = []
    for space in TABLE_SPACES:
        values = []
        for seed in seeds:
            spec = SyntheticSpec(kind=space, n=settings.n, dim=settings.dim, p=settings.p, seed=seed)
            stats = exact_delta(
                space_distance_matrix(spec),
                "four_point",
                workers=workers,
                block_size=block_size,
                callbacks=callbacks,
            )
            values.append(stats.delta_avg)
        summaries.append(
            SpaceSummary(
                space=space,
                delta_avg_mean=float(np.mean(values)),
                delta_avg_std=float(np.std(values)),
                delta_avg_per_seed=values,
            )
        )
        logger.info("%s: mean delta_avg %.6g", space, summaries[-1].delta_avg_mean)

    means = {summary.space: summary.delta_avg_mean for summary in summaries}
    return SyntheticTable(
        n=settings.n,
        dim=settings.dim,
        p=settings.p,
        seeds=seeds,
        spaces=summaries,
        poincare_smallest=means["poincare_disk"] <= min(means["sphere"], means["dense_graph"]),
    )
