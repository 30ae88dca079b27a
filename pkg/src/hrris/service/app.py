"""FastAPI application exposing defaults, validation, evaluation, and sweeps.

Sweeps run on a background thread, one directory per job under the
application's working directory, and are observed by polling the job id.
The registry is in-memory: jobs do not survive a process restart, though a
resubmitted identical config resumes from the partial CSV left on disk.
"""

from __future__ import annotations

import tempfile
import threading
from dataclasses import asdict
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from .. import __version__
from ..ao import monte_carlo
from ..config import ExperimentConfig, default_config, parse_config, serialize_config
from ..errors import HrrisError, ParseError
from ..experiments import ao_settings, benchmark_cell, build_grid, run_experiment
from .schemas import (
    ConfigRequest,
    DefaultsResponse,
    EvaluateRequest,
    EvaluateResponse,
    ExperimentRequest,
    JobStatus,
    ResultRowModel,
    SchemeRates,
    ValidationReport,
)


class _Job:
    """Mutable record of one background sweep; guarded by the registry lock."""

    def __init__(self, job_id: str, config: ExperimentConfig) -> None:
        self.id = job_id
        self.config = config
        self.status = "queued"
        self.detail: str | None = None
        self.rows: list[ResultRowModel] | None = None
        self.csv_text: str | None = None


class _Registry:
    def __init__(self, workdir: Path) -> None:
        self.workdir = workdir
        self.lock = threading.Lock()
        self.jobs: dict[str, _Job] = {}
        self._counter = 0

    def create(self, config: ExperimentConfig) -> _Job:
        with self.lock:
            self._counter += 1
            job = _Job(f"job-{self._counter}", config)
            self.jobs[job.id] = job
            return job

    def get(self, job_id: str) -> _Job:
        with self.lock:
            job = self.jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        return job

    def snapshot(self, job: _Job) -> JobStatus:
        with self.lock:
            return JobStatus(
                id=job.id,
                status=job.status,
                experiment=job.config.experiment,
                detail=job.detail,
                rows=job.rows,
            )


def _execute(registry: _Registry, job: _Job, threads: int) -> None:
    with registry.lock:
        job.status = "running"
    try:
        output = run_experiment(job.config, out_dir=registry.workdir / job.id, threads=threads)
        rows = [ResultRowModel(**asdict(row)) for row in output.rows]
        csv_text = output.csv_path.read_text(encoding="utf-8")
    except Exception as exc:  # any failure must land in the job record
        with registry.lock:
            job.status = "error"
            job.detail = str(exc)
        return
    with registry.lock:
        job.status = "done"
        job.rows = rows
        job.csv_text = csv_text


def create_app(workdir: str | Path | None = None) -> FastAPI:
    """Application factory; ``workdir`` receives one directory per sweep job."""
    root = Path(workdir) if workdir is not None else Path(tempfile.mkdtemp(prefix="hrris-"))
    root.mkdir(parents=True, exist_ok=True)
    registry = _Registry(root)
    app = FastAPI(title="hrris", version=__version__)
    app.state.registry = registry

    @app.get("/defaults", response_model=DefaultsResponse)
    def defaults() -> DefaultsResponse:
        return DefaultsResponse(config=serialize_config(default_config()))

    @app.post("/config/validate", response_model=ValidationReport)
    def validate(request: ConfigRequest) -> ValidationReport:
        try:
            config = parse_config(request.config)
            cells = build_grid(config)
        except ParseError as exc:
            return ValidationReport(valid=False, error=str(exc), line=exc.line, key=exc.key)
        except HrrisError as exc:
            return ValidationReport(valid=False, error=str(exc))
        return ValidationReport(
            valid=True,
            experiment=config.experiment,
            cells=len(cells),
            trials_per_cell=config.n_trials,
        )

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate(request: EvaluateRequest) -> EvaluateResponse:
        """Run the benchmark schemes once, on trial ``trial``'s channel draw."""
        try:
            config = parse_config(request.config)
        except ParseError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        cell = benchmark_cell(config)
        try:
            result = monte_carlo(
                cell.scenario,
                list(cell.schemes),
                n_trials=1,
                base_seed=config.seed ^ request.trial,
                settings=ao_settings(config),
            )
        except HrrisError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        rates = [
            SchemeRates(
                scheme=label,
                legitimate=float(result.legitimate[i, 0]),
                eavesdropper=float(result.eavesdropper[i, 0]),
                secrecy=float(result.secrecy[i, 0]),
                rounds=int(result.rounds[i, 0]),
            )
            for i, label in enumerate(cell.labels)
        ]
        return EvaluateResponse(
            trial=request.trial, transmit_power_dbm=cell.sweep_value, results=rates
        )

    @app.post("/experiments", response_model=JobStatus, status_code=202)
    def submit(request: ExperimentRequest) -> JobStatus:
        try:
            config = parse_config(request.config)
            build_grid(config)  # surface config-level defects before queueing
        except HrrisError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        job = registry.create(config)
        worker = threading.Thread(
            target=_execute, args=(registry, job, request.threads), name=job.id, daemon=True
        )
        worker.start()
        return registry.snapshot(job)

    @app.get("/experiments/{job_id}", response_model=JobStatus)
    def job_status(job_id: str) -> JobStatus:
        return registry.snapshot(registry.get(job_id))

    @app.get("/experiments/{job_id}/csv")
    def job_csv(job_id: str) -> PlainTextResponse:
        job = registry.get(job_id)
        with registry.lock:
            status, text = job.status, job.csv_text
        if status != "done":
            raise HTTPException(status_code=409, detail=f"job {job_id} is {status}, not done")
        return PlainTextResponse(text, media_type="text/csv")

    return app
