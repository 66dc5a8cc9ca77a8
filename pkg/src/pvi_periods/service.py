"""HTTP service exposing the verification suites and the sweep.

POST endpoints accept one JSON configuration each (complex scalars as
"a+bi" wire strings or plain numbers) and return the full report payload;
the CLI is a thin client of this app.  Configuration problems map to 422,
quadrature/series non-convergence to 500 with kind "non-convergence";
per-point poles and domain errors never abort a run — they come back as
skipped or failing records inside the report.
"""

from __future__ import annotations

from typing import Any, Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__, suites
from .errors import DomainError, NumericsError, PoleEncountered
from .numerics import QuadratureSpec
from .reference import set_theta_cap
from .reporting import Report, parse_complex

app = FastAPI(
    title="pvi-periods",
    version=__version__,
    description=(
        "Verification suites for the algebro-geometric solutions of "
        "rank-two triangular Schlesinger systems and their Painleve VI "
        "reductions."
    ),
)


# ---------------------------------------------------------------------------
# Request models

ComplexLike = float | int | str


class BaseRequest(BaseModel):
    """Knobs shared by every run; unknown fields are rejected."""

    model_config = ConfigDict(extra="forbid")

    tol: float | None = Field(default=None, gt=0)
    quad_order: int = Field(default=12, ge=2)
    quad_panels: int = Field(default=8, ge=1)
    theta_cap: int = Field(default=64, ge=8)

    def quad(self):
        return QuadratureSpec(order=self.quad_order, panels=self.quad_panels)


class CurveRequest(BaseRequest):
    genus: int = Field(default=1, ge=1)
    branch_points: list[ComplexLike] | None = None
    n: int = -1
    cycle: list[ComplexLike] | None = None
    seed: int = Field(default=0, ge=0)
    h: float = Field(default=1e-5, gt=0)


class SchlesingerRequest(CurveRequest):
    pass


class TauRequest(CurveRequest):
    pass


class PviRequest(BaseRequest):
    family: Literal["case1", "case2"] = "case1"
    n: int | None = None
    c1: ComplexLike = 1.0
    c2: ComplexLike = 0.0
    x_grid: str = "0.05:0.95:19"


class ReferenceRequest(BaseRequest):
    c1: ComplexLike = 0.3
    c2: ComplexLike = 0.1
    p: ComplexLike = 0.17
    q: ComplexLike = 0.29
    x_grid: str = "0.2:0.7:3"
    tol_kk: float | None = Field(default=None, gt=0)


class SweepRequest(BaseRequest):
    family: Literal["case1", "case2", "picard-okamoto", "hitchin", "kk"]
    n: int | None = None
    c1: ComplexLike = 1.0
    c2: ComplexLike = 0.0
    p: ComplexLike = 0.17
    q: ComplexLike = 0.29
    x_grid: str


# ---------------------------------------------------------------------------
# Response models


class RecordModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    check_id: str
    inputs: dict[str, Any]
    residual: float | str | None
    tol: float
    passed: bool = Field(alias="pass")
    notes: list[str]


class SummaryModel(BaseModel):
    total: int
    passed: int
    failed: int
    skipped: int


class ReportModel(BaseModel):
    config: dict[str, Any]
    records: list[RecordModel]
    summary: SummaryModel


class SweepModel(BaseModel):
    config: dict[str, Any]
    rows: list[list[float | str]]
    notes: list[str]


# ---------------------------------------------------------------------------
# Helpers


def _parse_grid(spec):
    parts = str(spec).split(":")
    if len(parts) != 3:
        raise DomainError(f"x grid must be start:stop:count, got {spec!r}")
    start, stop = parse_complex(parts[0]), parse_complex(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise DomainError(f"grid count must be an integer, got {parts[2]!r}") from None
    return suites.grid_points(start, stop, count)


def _complex_list(values):
    return None if values is None else [parse_complex(v) for v in values]


def _run(command, request, suite_call):
    config = {"command": command, **request.model_dump()}
    previous_cap = set_theta_cap(request.theta_cap)
    try:
        result = suite_call()
    except (DomainError, ValueError) as exc:
        raise HTTPException(status_code=422, detail={"kind": "usage", "message": str(exc)})
    except (NumericsError, PoleEncountered) as exc:
        raise HTTPException(
            status_code=500, detail={"kind": "non-convergence", "message": str(exc)}
        )
    finally:
        set_theta_cap(previous_cap)
    return config, result


# ---------------------------------------------------------------------------
# Endpoints


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/verify/schlesinger", response_model=ReportModel)
def verify_schlesinger(request: SchlesingerRequest):
    config, records = _run(
        "verify-schlesinger",
        request,
        lambda: suites.schlesinger_suite(
            genus=request.genus,
            branch_points=_complex_list(request.branch_points),
            n=request.n,
            cycle=_complex_list(request.cycle),
            seed=request.seed,
            tol=request.tol or 1e-6,
            quad=request.quad(),
            h=request.h,
        ),
    )
    return Report(config, records).payload()


@app.post("/verify/tau", response_model=ReportModel)
def verify_tau(request: TauRequest):
    config, records = _run(
        "verify-tau",
        request,
        lambda: suites.tau_suite(
            genus=request.genus,
            branch_points=_complex_list(request.branch_points),
            n=request.n,
            cycle=_complex_list(request.cycle),
            seed=request.seed,
            tol=request.tol or 1e-6,
            quad=request.quad(),
            h=request.h,
        ),
    )
    return Report(config, records).payload()


@app.post("/verify/pvi", response_model=ReportModel)
def verify_pvi(request: PviRequest):
    config, records = _run(
        "verify-pvi",
        request,
        lambda: suites.pvi_suite(
            request.family,
            n=request.n,
            c1=parse_complex(request.c1),
            c2=parse_complex(request.c2),
            xs=_parse_grid(request.x_grid),
            tol=request.tol or 1e-6,
            quad=request.quad(),
        ),
    )
    return Report(config, records).payload()


@app.post("/verify/reference", response_model=ReportModel)
def verify_reference(request: ReferenceRequest):
    config, records = _run(
        "verify-reference",
        request,
        lambda: suites.reference_suite(
            xs=_parse_grid(request.x_grid),
            c1=parse_complex(request.c1),
            c2=parse_complex(request.c2),
            p=parse_complex(request.p),
            q=parse_complex(request.q),
            tol=request.tol or 1e-5,
            tol_kk=request.tol_kk or 1e-4,
            quad=request.quad(),
        ),
    )
    return Report(config, records).payload()


@app.post("/sweep", response_model=SweepModel)
def sweep(request: SweepRequest):
    config, (rows, notes) = _run(
        "sweep",
        request,
        lambda: suites.sweep_rows(
            request.family,
            n=request.n,
            c1=parse_complex(request.c1),
            c2=parse_complex(request.c2),
            p=parse_complex(request.p),
            q=parse_complex(request.q),
            xs=_parse_grid(request.x_grid),
            quad=request.quad(),
        ),
    )
    return {"config": config, "rows": rows, "notes": notes}


def main(argv=None):
    """Serve the app (uvicorn); the CLI talks to it in-process instead."""
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(prog="pvi-periods-serve", description=main.__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args(argv)
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
