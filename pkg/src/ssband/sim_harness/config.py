"""Experiment configuration: key=value files, CLI overrides and the seed variable."""
import math
import os
from dataclasses import dataclass

from ..errors import ConfigError

EXPERIMENTS = ("coverage", "exactness", "rates", "smoothness", "gumbel",
               "testing_bound", "adversarial")
MODELS = ("white_noise", "density", "regression")
BAND_KINDS = ("adaptive", "exact")
SOURCES = ("pi_sample", "prop1", "minimax_pair", "adversarial_c1", "custom_file")
SEED_ENV = "SSBAND_SEED"


def _int(text):
    text = text.strip()
    if "^" in text:
        base, power = text.split("^")
        return int(base) ** int(power)
    return int(text)


def _int_list(text):
    return [_int(t) for t in text.split(",") if t.strip()]


def _float_list(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _optional_float(text):
    return None if text.strip().lower() in ("", "none", "default") else float(text)


def _choice(options):
    def parse(text):
        text = text.strip()
        if text not in options:
            raise ValueError("expected one of %s" % ", ".join(options))
        return text
    return parse


# key -> (parser, default, help)
SCHEMA = {
    "experiment": (_choice(EXPERIMENTS), "coverage", "experiment to run"),
    "model": (_choice(MODELS), "white_noise", "observation model"),
    "band_kind": (_choice(BAND_KINDS), "adaptive", "band construction"),
    "function_source": (_choice(SOURCES), "pi_sample", "how the true function is made"),
    "function_file": (str, "", "CoefficientField JSON for function_source=custom_file"),
    "s": (float, 1.0, "smoothness of the function class"),
    "M": (float, 1.0, "norm bound of the function class"),
    "epsilon": (float, 0.5, "self-similarity fraction"),
    "rho": (int, 2, "self-similarity window factor"),
    "s_max": (_optional_float, None, "largest smoothness searched (default N - 1/2)"),
    "s_min": (_optional_float, None, "smallest smoothness searched (mode default)"),
    "gamma": (float, 0.05, "nominal non-coverage"),
    "lam": (float, 2.0, "Lepskii threshold multiplier"),
    "nu": (_optional_float, None, "Lepskii log power (mode default)"),
    "delta": (float, 0.5, "bias threshold inflation"),
    "family": (_choice(("daubechies", "symlet", "haar-test")), "daubechies",
               "wavelet family (haar-test only exercises the gate)"),
    "N": (int, 6, "vanishing moments"),
    "depth": (int, 12, "cascade depth of the sampled basis"),
    "upsilon_reading": (_choice(("root", "square", "root-curvature")), "root",
                        "reading of the second-order Gumbel constant"),
    "j0": (int, 0, "coarsest level"),
    "jmin_floor": (int, 0, "lower bound on j_min(n)"),
    "n_grid": (_int_list, [2 ** 10, 2 ** 12, 2 ** 14, 2 ** 16], "sample sizes"),
    "replicates": (int, 500, "replicates per sample size"),
    "seed": (int, 20240601, "master seed"),
    "workers": (int, 1, "worker processes"),
    "output_dir": (str, "ssband_out", "where reports are written"),
    "sigma": (float, 1.0, "regression noise level"),
    "density_floor": (float, 0.2, "lower bound of generated densities"),
    "storage_extra": (int, 0, "stored levels beyond log2(n) - 1 (white noise, density)"),
    "band_grid": (int, 10, "grid depth of band.csv"),
    "levels": (_int_list, [10], "Gumbel resolution levels"),
    "a_scale": (float, 1.1, "multiplier on a(j) in the Gumbel negative control"),
    "mu": (float, math.sqrt(math.log(2.0)), "testing-bound signal size"),
    "xi": (float, 0.0, "testing-bound nuisance radius"),
    "n_hypotheses": (int, 100, "testing-bound alternatives"),
    "thresholds": (_float_list, [0.25, 0.5, 1.0, 2.0, 4.0], "likelihood-ratio thresholds"),
    "mc_tolerance": (float, 0.05, "Monte Carlo slack in the testing-bound check"),
    "adv_m": (int, 3, "number of adversarial fields"),
    "adv_J": (int, 14, "storage of adversarial fields"),
    "adv_s_min": (float, 0.5, "lower smoothness of the adversarial sequence"),
    "adv_start": (int, 12, "level where the adversarial window factor starts growing"),
    "pair_level": (int, 6, "level of the minimax perturbation"),
    "pair_shift": (int, 6, "shift of the minimax perturbation"),
    "pair_member": (int, 1, "0 for f0, 1 for the perturbed member"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved configuration; ``values`` maps every schema key to a parsed value."""
    values: dict

    def __getattr__(self, key):
        try:
            return self.__dict__["values"][key]
        except KeyError:
            raise AttributeError(key) from None

    def replace(self, **kw):
        v = dict(self.values)
        for k, val in kw.items():
            if k not in SCHEMA:
                raise ConfigError("unknown key %r" % k)
            v[k] = val
        return validate(v)

    def to_dict(self):
        return dict(self.values)


def parse_lines(text):
    """Parse ``key=value`` lines into raw strings; ``#`` starts a comment."""
    out = {}
    for number, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("line %d: expected key=value" % number)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError("line %d: unknown key %r" % (number, key))
        out[key] = value
    return out


def _parse_value(key, raw):
    if not isinstance(raw, str):
        return raw
    try:
        return SCHEMA[key][0](raw)
    except ValueError as exc:
        raise ConfigError("bad value for %s: %r (%s)" % (key, raw, exc)) from None


def validate(values):
    v = dict(values)
    if v["replicates"] < 1:
        raise ConfigError("replicates must be at least 1")
    grid = v["n_grid"]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("n_grid must be nonempty and increasing")
    if any(n < 16 for n in grid):
        raise ConfigError("sample sizes must be at least 16")
    if v["workers"] < 1:
        raise ConfigError("workers must be at least 1")
    if v["function_source"] == "custom_file" and not v["function_file"]:
        raise ConfigError("function_source=custom_file needs function_file")
    return ExperimentConfig(v)


def load_config(path=None, overrides=None, environ=None):
    """Defaults, then the file at ``path``, then ``SSBAND_SEED``, then ``overrides``."""
    environ = os.environ if environ is None else environ
    raw = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                raw.update(parse_lines(fh.read()))
        except OSError as exc:
            raise ConfigError("cannot read config %s: %s" % (path, exc.strerror)) from None
    if environ.get(SEED_ENV):
        raw["seed"] = environ[SEED_ENV]
    for key, value in (overrides or {}).items():
        if key not in SCHEMA:
            raise ConfigError("unknown key %r" % key)
        if value is not None:
            raw[key] = value
    values = {k: entry[1] for k, entry in SCHEMA.items()}
    for key, value in raw.items():
        values[key] = _parse_value(key, value)
    return validate(values)
