"""Request and response bodies for the HTTP service.

Every endpoint that accepts a configuration takes it as the same flat
``key = value`` text the command-line tools read, so a document can move
between a file on disk and a request body without translation.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class ConfigRequest(BaseModel):
    """A configuration document; the empty string means the defaults."""

    config: str = ""


class ValidationReport(BaseModel):
    """Verdict on a submitted configuration.

    ``line`` and ``key`` locate the first defect when ``valid`` is false and
    the defect is attributable to a single line or key.
    """

    valid: bool
    experiment: str | None = None
    cells: int | None = None
    trials_per_cell: int | None = None
    error: str | None = None
    line: int | None = None
    key: str | None = None


class DefaultsResponse(BaseModel):
    config: str


class EvaluateRequest(BaseModel):
    """One optimization trial at the config's fixed transmit power."""

    config: str = ""
    trial: int = Field(default=0, ge=0)


class SchemeRates(BaseModel):
    scheme: str
    legitimate: float
    eavesdropper: float
    secrecy: float
    rounds: int


class EvaluateResponse(BaseModel):
    trial: int
    transmit_power_dbm: float
    results: list[SchemeRates]


class ExperimentRequest(BaseModel):
    config: str = ""
    threads: int = Field(default=1, ge=1)


class ResultRowModel(BaseModel):
    """One summary row, mirroring a line of the result CSV."""

    scheme: str
    sweep_var: str
    sweep_value: float
    mean_cs: float
    std_cs: float
    n_trials: int
    seed: int


class JobStatus(BaseModel):
    """State of a background sweep: queued, running, done, or error."""

    id: str
    status: str
    experiment: str
    detail: str | None = None
    rows: list[ResultRowModel] | None = None
