"""Command-line client for the level-curve service.

The CLI speaks HTTP to the service; without ``--server`` it mounts the
application in-process, so no running server is needed.  Machine-readable
results go to stdout, diagnostics to stderr.  Exit status: 0 on success,
1 for a verified negative (an equivalence that is false), 2 on failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_FAILURE = 2


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=3600.0)
    # mount the application in-process so the CLI works without a server
    import warnings

    from .service import app

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    return TestClient(app, base_url="http://service")


def _read_json(path: str):
    text = sys.stdin.read() if path == "-" else open(path).read()
    return json.loads(text)


def _read_poly(path: str):
    data = _read_json(path)
    if isinstance(data, dict) and "coeffs" in data:
        return data["coeffs"]
    return data


def _emit(payload, out: str | None, as_text=False):
    text = payload if as_text else json.dumps(payload)
    if out and out != "-":
        with open(out, "w") as fh:
            fh.write(text)
            if not as_text:
                fh.write("\n")
    else:
        print(text)


def _call(client, path, payload):
    resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        print(f"error: {detail}", file=sys.stderr)
        raise SystemExit(EXIT_FAILURE)
    return resp


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="levelcurves",
        description="critical level-curve configurations of polynomial tracts",
    )
    parser.add_argument("--server", help="URL of a running service (default: in-process)")
    parser.add_argument("--tol", type=float, default=1e-12, help="numerical tolerance")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument(
        "--format", choices=("json", "svg"), default="json", help="output format"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="number of configurations for a generic vector")
    p.add_argument("n", type=int)

    p = sub.add_parser("enumerate", help="all configurations for a generic vector")
    p.add_argument("n", type=int, nargs="?")
    p.add_argument("--values", help="JSON file with explicit [re,im] values")

    p = sub.add_parser("extract", help="configuration of a polynomial tract")
    p.add_argument("poly", help="polynomial JSON file ('-' for stdin)")
    p.add_argument("--no-normalize", action="store_true")

    p = sub.add_parser("realize", help="polynomial with a given configuration")
    p.add_argument("config", help="configuration JSON file ('-' for stdin)")
    p.add_argument("--starts", type=int, default=400)

    p = sub.add_parser("perturb", help="reduce the degeneracy of a configuration")
    p.add_argument("config")
    p.add_argument("--nu", type=float, required=True)

    p = sub.add_parser("equiv", help="decide conformal equivalence of two tracts")
    p.add_argument("poly_a")
    p.add_argument("poly_b")

    p = sub.add_parser("trace", help="trace level curves of a polynomial")
    p.add_argument("poly")
    p.add_argument("--levels", type=float, nargs="*", default=[])

    p = sub.add_parser("render", help="SVG drawing of level curves")
    p.add_argument("poly")
    p.add_argument("--levels", type=float, nargs="+", required=True)
    p.add_argument("--gradients", action="store_true")

    p = sub.add_parser("check-bocher", help="randomized critical-point location suite")
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--max-degree", type=int, default=6)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    with _client(args.server) as client:
        if args.command == "count":
            resp = _call(client, "/count", {"n": args.n})
            _emit({"n": args.n, "count": resp.json()["count"]}, args.out)
            return EXIT_OK

        if args.command == "enumerate":
            payload = {"seed": args.seed}
            if args.values:
                payload["values"] = _read_json(args.values)
            elif args.n is not None:
                payload["n"] = args.n
            else:
                parser.error("enumerate needs n or --values")
            resp = _call(client, "/enumerate", payload)
            _emit(resp.json(), args.out)
            return EXIT_OK

        if args.command == "extract":
            resp = _call(
                client,
                "/extract",
                {
                    "coeffs": _read_poly(args.poly),
                    "normalize": not args.no_normalize,
                    "tol": args.tol,
                },
            )
            body = resp.json()
            print(
                f"canonical code {body['canonical_code']}, "
                f"scale {body['scale_applied']:g}",
                file=sys.stderr,
            )
            _emit(body["configuration"], args.out)
            return EXIT_OK

        if args.command == "realize":
            resp = _call(
                client,
                "/realize",
                {
                    "configuration": _read_json(args.config),
                    "seed": args.seed,
                    "n_starts": args.starts,
                    "tol": args.tol,
                },
            )
            body = resp.json()
            print(
                f"verified after {body['candidates_tried']} candidates",
                file=sys.stderr,
            )
            _emit(body["coeffs"], args.out)
            return EXIT_OK

        if args.command == "perturb":
            resp = _call(
                client,
                "/perturb",
                {"configuration": _read_json(args.config), "nu": args.nu},
            )
            body = resp.json()
            print(
                f"degeneracy degree {body['degree_before']} -> {body['degree_after']}, "
                f"value shift {body['value_shift']:.3e}",
                file=sys.stderr,
            )
            _emit(body["configuration"], args.out)
            return EXIT_OK

        if args.command == "equiv":
            resp = _call(
                client,
                "/equiv",
                {"poly_a": _read_poly(args.poly_a), "poly_b": _read_poly(args.poly_b)},
            )
            body = resp.json()
            _emit(body["equivalent"], args.out)
            return EXIT_OK if body["equivalent"] else EXIT_NEGATIVE

        if args.command == "trace":
            resp = _call(
                client,
                "/trace",
                {"coeffs": _read_poly(args.poly), "levels": args.levels},
            )
            _emit(resp.json(), args.out)
            return EXIT_OK

        if args.command == "render":
            resp = _call(
                client,
                "/render",
                {
                    "coeffs": _read_poly(args.poly),
                    "levels": args.levels,
                    "show_gradients": args.gradients,
                },
            )
            _emit(resp.text, args.out, as_text=True)
            return EXIT_OK

        if args.command == "check-bocher":
            resp = _call(
                client,
                "/check-bocher",
                {
                    "instances": args.instances,
                    "seed": args.seed,
                    "max_degree": args.max_degree,
                },
            )
            body = resp.json()
            _emit(body, args.out)
            return EXIT_OK if body["failures"] == 0 and body["hull_failures"] == 0 else EXIT_NEGATIVE

    parser.error(f"unknown command {args.command}")


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
