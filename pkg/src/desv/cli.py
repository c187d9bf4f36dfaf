"""Command-line front end.

A thin client over the same handlers the HTTP service uses; everything runs
in-process, so no server is needed.  Exit codes: 0 when the property holds
or the artifact was built, 1 when the property fails (witness on stdout),
2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import api

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_ERROR = 2


def _read_model(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as err:
        raise api.RequestError(f"cannot read {path}: {err.strerror}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise api.RequestError(
            f"{path}: line {err.lineno}, column {err.colno}: {err.msg}"
        )


def _emit_json(document) -> None:
    sys.stdout.write(json.dumps(document, indent=2, ensure_ascii=False) + "\n")


def _print_witness(witness: dict) -> None:
    print("witness:")
    if "observation" in witness and witness["observation"] is not None:
        print(f"  observation: {' '.join(witness['observation']) or '(empty)'}")
    if witness.get("split") is not None:
        print(f"  split after symbol: {witness['split']}")
    if witness.get("secret_state") is not None:
        print(f"  secret state: {witness['secret_state']}")
    if witness.get("violating_state") is not None:
        print(f"  violating state: {witness['violating_state']}")
    if witness.get("pump_count") is not None:
        print(f"  checked with pump count: {witness['pump_count']}")
    if witness.get("fault_transition") is not None:
        ft = witness["fault_transition"]
        print(f"  imminent fault: {ft['from']} -{ft['event']}-> {ft['to']}")
    run = witness.get("run")
    if run:
        print("  product run:")
        for step in run:
            print(f"    {step['from']} -{step['event']}-> {step['to']}")
    if witness.get("left_projection") is not None:
        print(f"  left projection : {' '.join(witness['left_projection']) or '(empty)'}")
        print(f"  right projection: {' '.join(witness['right_projection']) or '(empty)'}")
    for key in ("continuation_path", "continuation_cycle"):
        steps = witness.get(key)
        if steps:
            print(f"  {key.replace('_', ' ')}:")
            for step in steps:
                print(f"    {step['from']} -{step['event']}-> {step['to']}")


def _cmd_verify(args) -> int:
    data = _read_model(args.model)
    properties = list(api.PROPERTIES) if args.all_properties else [args.property]
    if args.all_properties:
        if args.k is None:
            properties = [p for p in properties if p not in ("kso", "skso")]
    elif args.property is None:
        raise api.RequestError("--property is required (or use --all-properties)")
    documents = []
    for prop in properties:
        k = args.k if prop in ("kso", "skso") else None
        started = time.perf_counter()
        document = api.verify_document(data, prop, k, strict=not args.lenient)
        elapsed = time.perf_counter() - started
        documents.append((document, elapsed))
    if args.json:
        if args.all_properties:
            _emit_json({"verdicts": [doc for doc, _t in documents]})
        else:
            _emit_json(documents[0][0])
    else:
        for document, elapsed in documents:
            outcome = "holds" if document["holds"] else "FAILS"
            extra = ""
            if document["parameters"]:
                extra = (
                    f" (k={document['parameters']['k']},"
                    f" effective k={document['parameters']['effective_k']})"
                )
            print(f"{document['property']}{extra}: {outcome}  [{elapsed * 1000:.1f} ms]")
            if not document["holds"]:
                _print_witness(document["witness"])
    failed = any(not doc["holds"] for doc, _t in documents)
    return EXIT_FAILS if failed else EXIT_HOLDS


def _cmd_build(args) -> int:
    data = _read_model(args.model)
    document = api.build_document(data, args.artifact, args.fault, strict=not args.lenient)
    with open(args.output, "w", encoding="utf-8") as handle:
        handle.write(document["dot"])
    stats = document["stats"]
    print(
        f"wrote {args.artifact} ({stats['states']} states, "
        f"{stats['transitions']} transitions) to {args.output}"
    )
    return EXIT_HOLDS


def _cmd_oracle(args) -> int:
    data = _read_model(args.model)
    document = api.oracle_document(
        data, args.property, args.bound, args.k, strict=not args.lenient
    )
    if args.json:
        _emit_json(document)
    else:
        if document["found"]:
            print(f"{args.property}: counterexample found within bound {args.bound}")
            counterexample = document["counterexample"]
            for key, value in counterexample.items():
                if key == "property":
                    continue
                print(f"  {key}: {value}")
        else:
            print(
                f"{args.property}: no counterexample within bound {args.bound} "
                f"(evidence, not proof)"
            )
    return EXIT_FAILS if document["found"] else EXIT_HOLDS


def _cmd_gen(args) -> int:
    document = api.generate_document(
        states=args.states,
        events=args.events,
        seed=args.seed,
        live=args.live,
        divergence_free=args.divergence_free,
        observable_fraction=args.obs_fraction,
        transition_density=args.density,
        initial_count=args.initials,
        secret_density=args.secret_density,
        fault_density=args.fault_density,
    )
    text = json.dumps(document, indent=2, ensure_ascii=False) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_HOLDS


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_HOLDS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="desv",
        description=(
            "Verify inference and concealment properties of labeled "
            "finite-state automata."
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="decide a property of a model")
    verify.add_argument("model", help="path to a model document (JSON)")
    verify.add_argument("--property", choices=api.PROPERTIES)
    verify.add_argument("--k", type=int, help="delay bound for kso / skso")
    verify.add_argument("--json", action="store_true", help="emit a verdict document")
    verify.add_argument(
        "--all-properties",
        action="store_true",
        help="run every property the model's annotations support",
    )
    verify.add_argument(
        "--lenient", action="store_true", help="ignore unknown document fields"
    )
    verify.set_defaults(handler=_cmd_verify)

    build = commands.add_parser("build", help="build and export a derived automaton")
    build.add_argument("model")
    build.add_argument("--artifact", required=True, choices=api.ARTIFACTS)
    build.add_argument("--fault", help="fault event for the legacy products")
    build.add_argument("-o", "--output", required=True, help="output DOT path")
    build.add_argument("--lenient", action="store_true")
    build.set_defaults(handler=_cmd_build)

    oracle = commands.add_parser(
        "oracle", help="search the raw definition for a counterexample"
    )
    oracle.add_argument("model")
    oracle.add_argument("--property", required=True, choices=api.PROPERTIES)
    oracle.add_argument("--bound", type=int, required=True)
    oracle.add_argument("--k", type=int)
    oracle.add_argument("--json", action="store_true")
    oracle.add_argument("--lenient", action="store_true")
    oracle.set_defaults(handler=_cmd_oracle)

    gen = commands.add_parser("gen", help="generate a reproducible random model")
    gen.add_argument("--states", type=int, required=True)
    gen.add_argument("--events", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--live", action="store_true")
    gen.add_argument("--divergence-free", action="store_true")
    gen.add_argument("--obs-fraction", type=float, default=0.6)
    gen.add_argument("--density", type=float, default=0.5)
    gen.add_argument("--initials", type=int, default=1)
    gen.add_argument("--secret-density", type=float, default=0.25)
    gen.add_argument("--fault-density", type=float, default=0.2)
    gen.add_argument("-o", "--output")
    gen.set_defaults(handler=_cmd_gen)

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_ERROR if err.code not in (0, None) else 0
    try:
        return args.handler(args)
    except api.RequestError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
