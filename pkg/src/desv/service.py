"""HTTP service exposing the verification engine.

One stateless endpoint per operation; every request carries the model
document inline, so any number of clients can verify concurrently against
one long-running process.  All engine operations are pure, which makes the
service safe without any locking.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import api

app = FastAPI(
    title="desv",
    description=(
        "Verification of labeled finite-state automata: strong detectability, "
        "diagnosability, predictability, and eight flavors of state-based "
        "opacity, with machine-checkable witnesses for every violation."
    ),
    version="0.1.0",
)


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: dict = Field(description="model document (states, events, transitions)")
    property: str = Field(description=f"one of {', '.join(api.PROPERTIES)}")
    k: int | None = Field(default=None, description="delay bound for kso / skso")
    strict: bool = Field(default=True, description="reject unknown document fields")


class VerifyResponse(BaseModel):
    format_version: str
    property: str
    parameters: dict
    holds: bool
    witness: dict | None
    stats: dict


class BuildRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: dict
    artifact: str = Field(description=f"one of {', '.join(api.ARTIFACTS)}")
    fault: str | None = Field(
        default=None, description="fault event for the legacy products"
    )
    strict: bool = True


class BuildResponse(BaseModel):
    format_version: str
    artifact: str
    dot: str
    stats: dict


class OracleRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: dict
    property: str
    bound: int = Field(ge=1, description="maximum explored observation length")
    k: int | None = None
    strict: bool = True


class OracleResponse(BaseModel):
    format_version: str
    property: str
    bound: int
    found: bool
    counterexample: dict | None


class GenerateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    states: int = Field(ge=1)
    events: int = Field(ge=0)
    seed: int = 0
    live: bool = False
    divergence_free: bool = False
    observable_fraction: float = Field(default=0.6, ge=0.0, le=1.0)
    transition_density: float = Field(default=0.5, ge=0.0)
    initial_count: int = Field(default=1, ge=0)
    secret_density: float = Field(default=0.25, ge=0.0, le=1.0)
    fault_density: float = Field(default=0.2, ge=0.0, le=1.0)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/verify", response_model=VerifyResponse)
def verify(request: VerifyRequest):
    try:
        return api.verify_document(
            request.model, request.property, request.k, strict=request.strict
        )
    except api.RequestError as err:
        raise HTTPException(status_code=400, detail=str(err))


@app.post("/build", response_model=BuildResponse)
def build(request: BuildRequest):
    try:
        return api.build_document(
            request.model, request.artifact, request.fault, strict=request.strict
        )
    except api.RequestError as err:
        raise HTTPException(status_code=400, detail=str(err))


@app.post("/oracle", response_model=OracleResponse)
def oracle(request: OracleRequest):
    try:
        return api.oracle_document(
            request.model,
            request.property,
            request.bound,
            request.k,
            strict=request.strict,
        )
    except api.RequestError as err:
        raise HTTPException(status_code=400, detail=str(err))


@app.post("/generate")
def generate(request: GenerateRequest) -> dict:
    try:
        return api.generate_document(
            states=request.states,
            events=request.events,
            seed=request.seed,
            live=request.live,
            divergence_free=request.divergence_free,
            observable_fraction=request.observable_fraction,
            transition_density=request.transition_density,
            initial_count=request.initial_count,
            secret_density=request.secret_density,
            fault_density=request.fault_density,
        )
    except api.RequestError as err:
        raise HTTPException(status_code=400, detail=str(err))
