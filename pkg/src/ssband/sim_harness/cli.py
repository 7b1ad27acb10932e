"""Command line entry point.

Exit status is 0 on success, 2 for configuration errors and 3 when the
basis fails the unique-maximum gate. Errors are also printed to stderr as a
JSON object and, when the output directory is known, written to
``error.json`` there.
"""
import argparse
import json
import logging
import os
import sys
import time

from ..errors import Assumption2Failed, ConfigError, SsbandError
from ..wavelet_core import standard_profile, verify_assumption2
from .config import SCHEMA, load_config
from .experiments import run_experiment

COMMANDS = {"basis-info": None, "coverage": "coverage", "exactness": "exactness",
            "rates": "rates", "smoothness": "smoothness", "gumbel": "gumbel",
            "testing-bound": "testing_bound", "adversarial": "adversarial"}

log = logging.getLogger("ssband")


def _error(status, kind, message, out_dir=None):
    payload = {"status": status, "error": kind, "message": message}
    text = json.dumps(payload)
    print(text, file=sys.stderr)
    if out_dir:
        try:
            os.makedirs(out_dir, exist_ok=True)
            with open(os.path.join(out_dir, "error.json"), "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError:
            pass
    return status


def _experiment_parser(command):
    p = argparse.ArgumentParser(prog="ssband %s" % command)
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("-v", "--verbose", action="store_true")
    for key, (_, default, text) in SCHEMA.items():
        if key == "experiment":
            continue
        p.add_argument("--" + key, dest=key, default=None, metavar="VALUE",
                       help="%s (default %s)" % (text, default))
    return p


def _basis_info(argv):
    p = argparse.ArgumentParser(prog="ssband basis-info")
    p.add_argument("--family", default="daubechies")
    p.add_argument("--N", type=int, default=6)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--upsilon_reading", default="root")
    args = p.parse_args(argv)
    profile = standard_profile(args.family, args.N, args.depth, None,
                               args.upsilon_reading)
    report = verify_assumption2(profile)
    info = {"family": args.family, "N": args.N, "t0": profile.t0,
            "sigma2_max": profile.sigma2_max,
            "sigma2_curvature": profile.sigma2_curvature,
            "upsilon": profile.upsilon, "upsilon_reading": profile.upsilon_reading,
            "tau": profile.tau, "j0": profile.j0,
            "assumption2": report.to_dict()}
    print(json.dumps(info, indent=2))
    return 0


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] not in COMMANDS:
        got = argv[0] if argv else ""
        return _error(2, "ConfigError", "unknown subcommand %r; expected one of %s"
                      % (got, ", ".join(COMMANDS)))
    command, rest = argv[0], argv[1:]
    try:
        if command == "basis-info":
            return _basis_info(rest)
        parser = _experiment_parser(command)
        parser.__class__ = _Parser
        args = parser.parse_args(rest)
    except _ArgumentError as exc:
        return _error(2, "ConfigError", str(exc))
    except SsbandError as exc:
        return _error(2, type(exc).__name__, str(exc))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(message)s")
    overrides = {k: getattr(args, k) for k in SCHEMA if k != "experiment"}
    overrides["experiment"] = COMMANDS[command]
    out_dir = args.output_dir
    try:
        config = load_config(args.config, overrides)
        out_dir = config.output_dir
        start = time.time()
        report = run_experiment(config)
        report.write(config, config.output_dir)
        log.info("%s finished in %.1f s", command, time.time() - start)
    except Assumption2Failed as exc:
        return _error(3, "Assumption2Failed", str(exc), out_dir)
    except (ConfigError, ValueError) as exc:
        return _error(2, type(exc).__name__, str(exc), out_dir)
    print(json.dumps({"status": 0, "output_dir": config.output_dir,
                      "aggregates": report.report_dict(config)["aggregates"]},
                     indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
