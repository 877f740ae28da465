import json
import tempfile
from pathlib import Path
from typing import Any

import pandas as pd
import streamlit as st

from treelike_geometry.analysis import analyze_distance_matrix, analyze_embeddings, synthetic_table
from treelike_geometry.callbacks import (
    AnalysisCallbackHandler,
    CapturingCallbackHandler,
    playback_callbacks,
)
from treelike_geometry.cli_io import load_distance_matrix, load_embeddings
from treelike_geometry.config import AnalysisSettings, SynthSettings
from treelike_geometry.errors import GeometryError
from treelike_geometry.report import GeometryReport, InputDescriptor, dumps_report

DEFAULTS = AnalysisSettings()
SYNTH_DEFAULTS = SynthSettings()


class StatusHandler(AnalysisCallbackHandler):
    """One ``st.status`` box per analysis, updated as blocks finish."""

    def __init__(self, container: st.delta_generator.DeltaGenerator):
        self.container = container
        self.boxes: dict[str, Any] = {}
        self.bars: dict[str, Any] = {}

    def on_analysis_start(self, analysis: str, params: dict[str, Any]) -> None:
        box = self.container.status(f"{analysis} running", expanded=False)
        box.write(params)
        self.boxes[analysis] = box
        self.bars[analysis] = box.progress(0.0)

    def on_analysis_progress(self, analysis: str, done: int, total: int) -> None:
        if analysis in self.bars and total:
            self.bars[analysis].progress(min(done / total, 1.0), text=f"{done}/{total}")

    def on_analysis_end(self, analysis: str, result: dict[str, Any]) -> None:
        if analysis in self.boxes:
            self.boxes[analysis].update(label=f"{analysis} done", state="complete")

    def on_analysis_error(self, analysis: str, error: str) -> None:
        if analysis in self.boxes:
            self.boxes[analysis].update(label=f"{analysis} failed: {error}", state="error")


@st.cache_data(ttl="2h")
def load_upload(name: str, data: bytes, is_matrix: bool, header: bool, pad: bool, force: bool):
    with tempfile.TemporaryDirectory() as directory:
        path = Path(directory) / name
        path.write_bytes(data)
        file_format = "raw_f64" if path.suffix == ".bin" else "csv"
        if is_matrix:
            return load_distance_matrix(path, file_format, force=force)
        return load_embeddings(path, file_format, header=header, pad=pad), False


def stats_frame(report: GeometryReport) -> pd.DataFrame:
    rows = {}
    for name in ("delta", "ultra", "nj"):
        stats = getattr(report, name)
        if stats is not None:
            rows[name] = stats.model_dump(exclude_none=True)
    return pd.DataFrame.from_dict(rows, orient="index").T


st.set_page_config(page_title="Tree-likeness explorer", page_icon="🌳", layout="wide")
st.title("🌳 Tree-likeness explorer")

with st.sidebar:
    metric = st.selectbox("Metric", ("euclidean", "poincare"))
    analyses = st.multiselect("Analyses", ("delta", "ultra", "nj"), default=list(DEFAULTS.analyses))
    exact = st.checkbox("Exact enumeration", help="Only practical for small inputs")
    samples = st.number_input("Samples", min_value=1, value=DEFAULTS.samples, step=10_000)
    seed = st.number_input("Seed", min_value=0, value=DEFAULTS.seed)
    formula = st.selectbox("δ formula", ("four_point", "paper_slack"))
    use_pca = st.checkbox("PCA")
    pca_variance = st.slider("PCA variance", 0.5, 1.0, 0.99, disabled=not use_pca)
    ball_norm = st.slider("Ball norm", 0.05, 0.99, DEFAULTS.ball_norm)

analyze_tab, table_tab, replay_tab = st.tabs(["Analyze", "Synthetic spaces", "Replay"])

with analyze_tab:
    uploaded_file = st.file_uploader("Upload embeddings or a distance matrix", type=["csv", "bin"])
    is_matrix = st.checkbox("File is a distance matrix")
    header = st.checkbox("CSV has a header row")
    pad = st.checkbox("Zero-pad ragged rows")
    force = st.checkbox("Symmetrize asymmetric matrix", disabled=not is_matrix)

    if uploaded_file and st.button("Run analyses", type="primary"):
        settings = AnalysisSettings(
            samples=int(samples),
            seed=int(seed),
            metric=metric,
            analyses=tuple(analyses),
            formula=formula,
            exact=exact,
            ball_norm=ball_norm,
            pca_variance=pca_variance if use_pca else None,
        )
        capture = CapturingCallbackHandler()
        handlers = [capture, StatusHandler(st.container())]
        try:
            file_format = "raw_f64" if uploaded_file.name.endswith(".bin") else "csv"
            loaded, symmetrized = load_upload(
                uploaded_file.name, uploaded_file.getvalue(), is_matrix, header, pad, force
            )
            if is_matrix:
                descriptor = InputDescriptor(
                    path=uploaded_file.name,
                    format=file_format,
                    kind="distance_matrix",
                    n=loaded.n,
                    symmetrized=symmetrized,
                )
                report = analyze_distance_matrix(loaded, descriptor, settings, handlers)
            else:
                descriptor = InputDescriptor(
                    path=uploaded_file.name, format=file_format, n=loaded.n, dim=loaded.dim
                )
                report = analyze_embeddings(loaded, descriptor, settings, pad=pad, callbacks=handlers)
        except GeometryError as error:
            st.error(f"{error.category}: {error}")
            st.stop()

        report = report.model_copy(update={"timings": capture.timings()})
        st.dataframe(stats_frame(report))
        for note in report.notes:
            st.caption(note)
        st.download_button("Download report", dumps_report(report), file_name="report.json")
        st.download_button(
            "Download event log", json.dumps(capture.records, indent=1), file_name="events.json"
        )

with table_tab:
    with st.form(key="table"):
        n = st.number_input("Points per space", min_value=4, value=SYNTH_DEFAULTS.n, key="table_n")
        dim = st.number_input("Sphere dimension", min_value=2, value=SYNTH_DEFAULTS.dim, key="table_dim")
        p = st.slider("Edge probability", 0.05, 1.0, SYNTH_DEFAULTS.p)
        seeds = st.number_input("Seeds", min_value=1, value=SYNTH_DEFAULTS.seeds, key="table_seeds")
        submit_clicked = st.form_submit_button("Build table")

    if submit_clicked:
        table_settings = SynthSettings(n=int(n), dim=int(dim), p=p, seeds=int(seeds), seed=int(seed))
        with st.spinner("Enumerating quadruples..."):
            table = synthetic_table(table_settings, workers=DEFAULTS.workers)
        st.table(
            pd.DataFrame(
                {
                    "space": [s.space for s in table.spaces],
                    "δ avg": [f"{s.delta_avg_mean:.4f} ± {s.delta_avg_std:.4f}" for s in table.spaces],
                }
            )
        )
        st.write(f"Poincaré disk has the smallest δ: **{table.poincare_smallest}**")

with replay_tab:
    recording = st.file_uploader("Event log (JSON)", type=["json"])
    max_pause = st.slider("Max pause (s)", 0.0, 2.0, 0.5)
    if recording and st.button("Replay"):
        records = json.loads(recording.getvalue())
        results = playback_callbacks([StatusHandler(st.container())], records, max_pause_time=max_pause)
        st.json(results)
