"""HTTP service exposing the core operations.

The CLI talks to this app in-process by default; `fracorder serve` runs it
under uvicorn for remote use.  Library errors map to HTTP 400 with the
exception class name, so clients see module error names verbatim.
"""

from __future__ import annotations

import os

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import cylinder as cyl
from ..errors import FracOrderError
from ..estimators import ObservationSeries
from ..experiment import config_from_dict, run_experiment
from ..fractional_calculus import graded_grid, verify_equation
from ..mittag_leffler import MLQuery, ml
from ..spectral import (
    make_decay_report,
    model_from_dict,
    model_to_dict,
    solve_forward,
    solve_forward_log,
)
from . import schemas as S
from ..experiment import _run_method


def create_app() -> FastAPI:
    app = FastAPI(title="fracorder", version="1.0")

    @app.exception_handler(FracOrderError)
    async def _lib_error(request: Request, exc: FracOrderError):
        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=400, content={"error": "ValueError", "detail": str(exc)}
        )

    @app.post("/ml", response_model=S.MLResponse)
    def ml_endpoint(req: S.MLRequest):
        v = ml(MLQuery(req.rho, req.mu, req.z))
        return S.MLResponse(
            value=v.value, log_abs=v.log_abs, sign=v.sign,
            est_rel_error=v.est_rel_error, regime=v.regime,
        )

    @app.post("/eigs", response_model=S.EigsResponse)
    def eigs_endpoint(req: S.EigsRequest):
        pairs = [cyl.sturm_negative_eig(req.H, req.h)]
        pairs += cyl.sturm_positive_eigs(req.H, req.h, req.count - 1) if req.count > 1 else []
        rows = [
            S.EigRow(index=e.index, kind=e.kind, s=e.s, nu=e.nu, M=e.M,
                     residual=e.residual(req.H, req.h))
            for e in pairs
        ]
        return S.EigsResponse(rows=rows)

    @app.post("/model/build", response_model=S.BuildResponse)
    def build_endpoint(req: S.BuildRequest):
        from ..experiment import PhiSpec

        cfg = cyl.CylinderConfig(**req.cylinder.model_dump())
        phi = PhiSpec(**req.phi.model_dump()).build(cfg)
        model = cyl.build_model(cfg, phi, [tuple(p) for p in req.points], kind=req.kind)
        rep = model.decay_report or make_decay_report(model.coeff_matrix)
        return S.BuildResponse(
            model=model_to_dict(model),
            lambda1=float(model.lambdas[0]),
            n_modes=len(model.modes),
            n_negative=model.n_negative,
            decay=S.DecaySummary(**rep.__dict__),
        )

    @app.post("/solve", response_model=S.SolveResponse)
    def solve_endpoint(req: S.SolveRequest):
        model = model_from_dict(req.model)
        signs, logs, values = [], [], []
        for t in req.times:
            sg, la = solve_forward_log(model, req.rho, req.point_index, float(t))
            signs.append(int(sg))
            logs.append(float(la))
            if not req.log_scale:
                values.append(solve_forward(model, req.rho, req.point_index, float(t)))
        return S.SolveResponse(
            times=list(req.times), signs=signs, log_abs=logs,
            values=None if req.log_scale else values,
        )

    @app.post("/verify", response_model=S.VerifyResponse)
    def verify_endpoint(req: S.VerifyRequest):
        model = model_from_dict(req.model)
        rep = verify_equation(
            model, req.rho, req.point_index,
            times=graded_grid(req.t_max, req.n_nodes, req.rho),
            t_window=(req.t_lo, None),
        )
        return S.VerifyResponse(
            max_residual=rep.max_residual, ic_residual=rep.ic_residual,
            n_nodes=rep.n_nodes, t_window=rep.t_window,
        )

    @app.post("/estimate", response_model=S.EstimateResponse)
    def estimate_endpoint(req: S.EstimateRequest):
        sp = req.series
        series = ObservationSeries(
            sp.point_label, np.array(sp.times), np.array(sp.signs, dtype=np.int8),
            np.array(sp.log_abs), sp.noise_level,
        )
        if req.method in ("lemma1_slope", "thm1_direct") and req.lambda1 is None:
            raise ValueError(f"method {req.method} requires lambda1")
        if req.method == "hatano_small_t" and req.phi_at_point is None:
            raise ValueError("hatano_small_t requires phi_at_point")
        est = _run_method(req.method, series, req.lambda1 or 0.0,
                          req.phi_at_point or 0.0)
        return S.EstimateResponse(
            rho_hat=est.rho_hat, method=est.method, window=est.window,
            residual=est.residual, sequence=[float(x) for x in est.sequence],
        )

    @app.post("/experiment", response_model=S.ExperimentResponse)
    def experiment_endpoint(req: S.ExperimentRequest):
        cfg = config_from_dict(req.config)
        code = run_experiment(cfg)
        return S.ExperimentResponse(
            exit_code=code,
            results_csv=os.path.join(cfg.output_dir, "results.csv"),
            output_dir=cfg.output_dir,
        )

    return app
