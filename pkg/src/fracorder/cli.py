"""Command-line front-end.

A thin HTTP client over the service app: by default the requests are served
in-process (no network); pass --server URL to talk to a running instance.
Output is CSV with a versioned header comment.  Exit codes: 0 success,
1 numerical/tolerance failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx

from .experiment import CSV_HEADER, fmt_float

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # in-process: drive the ASGI app directly, no network involved
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    from .service import create_app

    return TestClient(create_app())


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    r = client.post(path, json=payload)
    if r.status_code >= 400:
        try:
            body = r.json()
            msg = f"{body.get('error', r.status_code)}: {body.get('detail', '')}"
        except Exception:
            msg = r.text
        print(f"error: {msg}", file=sys.stderr)
        raise SystemExit(EXIT_FAILURE)
    return r.json()


def _emit(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows: list[list], header: list[str]) -> list[str]:
    lines = [CSV_HEADER, ",".join(header)]
    for row in rows:
        lines.append(",".join(
            fmt_float(v) if isinstance(v, float) else str(v) for v in row
        ))
    return lines


def cmd_ml(args, client) -> int:
    body = _post(client, "/ml", {"rho": args.rho, "mu": args.mu, "z": args.z})
    if args.log_scale:
        _emit(_csv([[body["sign"], body["log_abs"], body["est_rel_error"], body["regime"]]],
                   ["sign", "log_abs", "est_rel_error", "regime"]), args.out)
    else:
        _emit([fmt_float(body["value"])], args.out)
    return EXIT_OK


def cmd_eigs(args, client) -> int:
    body = _post(client, "/eigs", {"H": args.H, "h": args.h, "count": args.count})
    rows = [[r["index"], r["kind"], r["s"], r["nu"], r["M"], r["residual"]]
            for r in body["rows"]]
    _emit(_csv(rows, ["index", "kind", "s", "nu", "M", "residual"]), args.out)
    return EXIT_OK


def _load_json_arg(maybe_path_or_json: str) -> dict:
    if maybe_path_or_json.lstrip().startswith("{"):
        return json.loads(maybe_path_or_json)
    with open(maybe_path_or_json) as fh:
        return json.load(fh)


def cmd_build(args, client) -> int:
    payload = {}
    if args.config:
        payload = _load_json_arg(args.config)
    body = _post(client, "/model/build", payload)
    with open(args.model_out, "w") as fh:
        json.dump(body["model"], fh, indent=1)
    print(f"model written to {args.model_out}: {body['n_modes']} modes, "
          f"lambda1 = {fmt_float(body['lambda1'])}, "
          f"{body['n_negative']} negative", file=sys.stderr)
    return EXIT_OK


def _read_times(args) -> list[float]:
    import numpy as np

    if args.spacing == "log":
        return list(np.geomspace(args.t_min, args.t_max, args.count))
    return list(np.linspace(args.t_min, args.t_max, args.count))


def cmd_solve(args, client) -> int:
    model = _load_json_arg(args.model)
    body = _post(client, "/solve", {
        "model": model, "rho": args.rho, "point_index": args.point,
        "times": _read_times(args), "log_scale": args.log_scale,
    })
    if args.log_scale:
        rows = [[t, s, la] for t, s, la in
                zip(body["times"], body["signs"], body["log_abs"])]
        _emit(_csv(rows, ["t", "sign", "log_abs_u"]), args.out)
    else:
        rows = [[t, v] for t, v in zip(body["times"], body["values"])]
        _emit(_csv(rows, ["t", "u"]), args.out)
    return EXIT_OK


def cmd_verify(args, client) -> int:
    model = _load_json_arg(args.model)
    body = _post(client, "/verify", {
        "model": model, "rho": args.rho, "point_index": args.point,
        "n_nodes": args.nodes, "t_max": args.t_max, "t_lo": args.t_lo,
    })
    rows = [[body["max_residual"], body["ic_residual"], body["n_nodes"],
             body["t_window"][0], body["t_window"][1]]]
    _emit(_csv(rows, ["max_residual", "ic_residual", "n_nodes", "t_lo", "t_hi"]),
          args.out)
    return EXIT_OK if body["max_residual"] <= args.tol else EXIT_FAILURE


def _read_series_csv(path: str) -> dict:
    times, signs, logs = [], [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("t,"):
                continue
            t, s, la = line.split(",")[:3]
            times.append(float(t))
            signs.append(int(float(s)))
            logs.append(float(la))
    return {"times": times, "signs": signs, "log_abs": logs}


def cmd_estimate(args, client) -> int:
    payload = {
        "method": args.method,
        "series": _read_series_csv(args.infile),
        "lambda1": args.lambda1,
        "phi_at_point": args.phi_at_point,
    }
    body = _post(client, "/estimate", payload)
    rows = [[body["rho_hat"], body["method"], body["window"][0],
             body["window"][1], body["residual"]]]
    _emit(_csv(rows, ["rho_hat", "method", "window_lo", "window_hi", "residual"]),
          args.out)
    return EXIT_OK


def cmd_experiment(args, client) -> int:
    cfg = _load_json_arg(args.config)
    body = _post(client, "/experiment", {"config": cfg})
    print(f"results: {body['results_csv']}", file=sys.stderr)
    return EXIT_OK if body["exit_code"] == 0 else EXIT_FAILURE


def cmd_serve(args, client) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracorder")
    p.add_argument("--server", default=None,
                   help="base URL of a running service (default: in-process)")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("ml", help="evaluate the two-parameter ML function")
    q.add_argument("--rho", type=float, required=True)
    q.add_argument("--mu", type=float, required=True)
    q.add_argument("--z", type=float, required=True)
    q.add_argument("--log-scale", action="store_true")
    q.add_argument("--out")
    q.set_defaults(func=cmd_ml)

    q = sub.add_parser("eigs", help="vertical eigenvalue table")
    q.add_argument("--H", type=float, default=1.0)
    q.add_argument("--h", type=float, default=1.0)
    q.add_argument("--count", type=int, default=5)
    q.add_argument("--out")
    q.set_defaults(func=cmd_eigs)

    q = sub.add_parser("build", help="assemble a cylinder model file")
    q.add_argument("--config", help="JSON file or inline JSON (build request)")
    q.add_argument("--model-out", default="model.json")
    q.set_defaults(func=cmd_build)

    q = sub.add_parser("solve", help="forward-solve a model over a time grid")
    q.add_argument("--model", required=True, help="model JSON file")
    q.add_argument("--rho", type=float, required=True)
    q.add_argument("--point", type=int, default=0)
    q.add_argument("--t-min", type=float, default=1.0)
    q.add_argument("--t-max", type=float, default=50.0)
    q.add_argument("--count", type=int, default=60)
    q.add_argument("--spacing", choices=("linear", "log"), default="log")
    q.add_argument("--log-scale", action="store_true")
    q.add_argument("--out")
    q.set_defaults(func=cmd_solve)

    q = sub.add_parser("verify", help="equation residual via quadrature oracles")
    q.add_argument("--model", required=True)
    q.add_argument("--rho", type=float, required=True)
    q.add_argument("--point", type=int, default=0)
    q.add_argument("--nodes", type=int, default=2048)
    q.add_argument("--t-max", type=float, default=2.0)
    q.add_argument("--t-lo", type=float, default=0.1)
    q.add_argument("--tol", type=float, default=1e-3)
    q.add_argument("--out")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("estimate", help="recover the order from a series CSV")
    q.add_argument("--method", required=True,
                   choices=("lemma1_slope", "thm1_direct",
                            "hatano_large_t", "hatano_small_t"))
    q.add_argument("--lambda1", type=float)
    q.add_argument("--phi-at-point", type=float)
    q.add_argument("--in", dest="infile", required=True,
                   help="series CSV (t, sign, log_abs_u)")
    q.add_argument("--out")
    q.set_defaults(func=cmd_estimate)

    q = sub.add_parser("experiment", help="run a synthesize-and-recover sweep")
    q.add_argument("--config", required=True)
    q.set_defaults(func=cmd_experiment)

    q = sub.add_parser("serve", help="run the HTTP service")
    q.add_argument("--host", default="127.0.0.1")
    q.add_argument("--port", type=int, default=8000)
    q.set_defaults(func=cmd_serve)

    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    client = None if args.command == "serve" else _client(args.server)
    try:
        return args.func(args, client)
    except SystemExit as exc:
        return int(exc.code or 0)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if client is not None:
            client.close()


if __name__ == "__main__":
    sys.exit(main())
