"""Command-line front end.

Exit codes: 0 success, 1 a verification verdict failed, 2 invalid input, 3 a numerical
stage failed (the stage is named on stderr).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .geometry import (BoundaryField, FieldError, HermitianTorusMetric, InteriorField,
                       MissingDataError, Variant)
from .heat_coefficients import (BoundaryCondition, OperatorData, UnsupportedOrderError,
                                a2_form_laplacians, heat_coefficient, kaehler_decide)
from .model_spectra import (hermitian_torus_box0, hermitian_torus_delta0, operator_compare,
                            read_spectrum, write_spectrum)
from .models import SpectrumParams, UnsupportedModelError, default_window, get_model
from .psi import PsiExpressionError
from .trace_fit import (InvalidComparisonError, fit_spectrum, geometric_grid,
                        verify_against_formula)

COMMANDS = ("coeff", "spectrum", "fit", "verify", "kaehler", "compare")
INPUT_ERRORS = (FieldError, MissingDataError, PsiExpressionError, UnsupportedModelError,
                UnsupportedOrderError, InvalidComparisonError, FileNotFoundError,
                json.JSONDecodeError, KeyError)


class ConfigError(Exception):
    pass


class StageError(Exception):
    def __init__(self, stage: str, exc: BaseException):
        super().__init__(f"stage '{stage}' failed: {type(exc).__name__}: {exc}")
        self.stage = stage


@contextlib.contextmanager
def stage(name: str):
    try:
        yield
    except INPUT_ERRORS as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    except Exception as exc:  # everything else is a numerical failure
        raise StageError(name, exc) from exc


@dataclass
class JobConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    output: Optional[str] = None


def parse_orders(text: str) -> list[int]:
    """``"0..3"`` -> ``[0, 1, 2, 3]``; ``"0,2"`` -> ``[0, 2]``."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split(".."))
            orders = list(range(lo, hi + 1))
        else:
            orders = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad order range {text!r}") from None
    if not orders or min(orders) < 0:
        raise argparse.ArgumentTypeError(f"bad order range {text!r}")
    return orders


def parse_window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"t-window must be 'tmin,tmax', got {text!r}") from None
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError("t-window needs 0 < tmin < tmax")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heatspec", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model", help="built-in model name")
    p.add_argument("--bc", default="dirichlet", choices=("dirichlet", "neumann", "robin"))
    p.add_argument("--robin-s", type=float, default=0.0, help="constant Robin endomorphism S")
    p.add_argument("--n", "--orders", dest="orders", type=parse_orders, default=None,
                   help="orders, e.g. 0..3 or 0,2")
    p.add_argument("--count", type=int, help="number of modes")
    p.add_argument("--l-max", type=int, help="sphere degree cutoff")
    p.add_argument("--N", type=int, help="mesh: grid points per axis (torus) or cells (interval)")
    p.add_argument("--psi", default="sin(x1)", help="psi(x1, y1) for the Hermitian torus")
    p.add_argument("--variant", default="standard", choices=[v.value for v in Variant])
    p.add_argument("--orientation", type=int, default=1, choices=(1, -1))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--interior", help="interior field JSON")
    p.add_argument("--boundary", help="boundary field JSON")
    p.add_argument("--spectrum", help="spectrum CSV (sidecar JSON alongside)")
    p.add_argument("--t-window", type=parse_window)
    p.add_argument("--n-max", type=int, help="highest fitted order")
    p.add_argument("--tolerance", type=float, help="relative tolerance for verdicts")
    p.add_argument("--resolution", type=int, default=32, help="quadrature points for K integrals")
    p.add_argument("--out", help="output path prefix")
    return p


def config_from_args(args: argparse.Namespace) -> JobConfig:
    inputs = {k: getattr(args, k) for k in ("interior", "boundary", "spectrum")
              if getattr(args, k)}
    for name, path in inputs.items():
        if not Path(path).is_file():
            raise ConfigError(f"--{name}: no such file {path}")
    params = {k: v for k, v in vars(args).items()
              if k not in ("command", "out", *inputs) and v is not None}
    cfg = JobConfig(args.command, inputs, params, args.out)
    _validate(cfg)
    return cfg


def _validate(cfg: JobConfig) -> None:
    p = cfg.params
    needs_model = {"spectrum", "verify"}
    if cfg.command in needs_model and "model" not in p:
        raise ConfigError(f"{cfg.command} needs --model")
    if cfg.command == "coeff" and "model" not in p and "interior" not in cfg.inputs:
        raise ConfigError("coeff needs --model or --interior")
    if cfg.command == "fit" and "model" not in p and "spectrum" not in cfg.inputs:
        raise ConfigError("fit needs --model or --spectrum")
    if "model" in p:
        model = get_model_checked(p["model"])
        if model.name == "hermitian-torus" and cfg.command not in ("kaehler", "compare"):
            raise ConfigError("the hermitian-torus model is only available to kaehler/compare")
    for key in ("count", "l_max", "N", "trials", "resolution", "n_max"):
        if key in p and p[key] < (0 if key in ("l_max", "n_max") else 1):
            raise ConfigError(f"--{key.replace('_', '-')} must be positive")
    if cfg.command in ("kaehler", "compare") and p.get("N", 16) < 8:
        raise ConfigError("--N must be at least 8")


def get_model_checked(name):
    try:
        return get_model(name)
    except UnsupportedModelError as exc:
        raise ConfigError(str(exc)) from exc


# commands -----------------------------------------------------------------------------


def _bc(cfg: JobConfig) -> BoundaryCondition:
    return BoundaryCondition.parse(cfg.params.get("bc", "dirichlet"), cfg.params.get("robin_s", 0.0))


def _geometry(cfg: JobConfig):
    if "interior" in cfg.inputs:
        interior = InteriorField.load(cfg.inputs["interior"])
        boundary = BoundaryField.load(cfg.inputs["boundary"]) if "boundary" in cfg.inputs else None
        return interior, boundary
    model = get_model_checked(cfg.params["model"])
    model.check_bc(_bc(cfg))
    return model.interior(), model.boundary()


def _reports(cfg: JobConfig, orders):
    interior, boundary = _geometry(cfg)
    op = OperatorData.scalar_laplacian(interior.dimension)
    return [heat_coefficient(n, interior, boundary, op, _bc(cfg)) for n in orders]


def _spectrum(cfg: JobConfig):
    if "spectrum" in cfg.inputs:
        return read_spectrum(cfg.inputs["spectrum"])
    model = get_model_checked(cfg.params["model"])
    bc = _bc(cfg)
    model.check_bc(bc)
    params = SpectrumParams(cfg.params.get("count"), cfg.params.get("l_max"), cfg.params.get("N"))
    return model.spectrum(bc, params)


def _fit(cfg: JobConfig, s, n_max_default: int = 4):
    p = cfg.params
    if "t_window" in p:
        window = p["t_window"]
    elif "model" in p and "spectrum" not in cfg.inputs:
        window = default_window(get_model_checked(p["model"]), s)
    else:
        window = (30.0 / s.lambda_max, 0.05)
    n_max = p.get("n_max", n_max_default)
    return fit_spectrum(s, n_max, geometric_grid(*window))


def cmd_coeff(cfg: JobConfig) -> tuple[dict, bool]:
    orders = cfg.params.get("orders") or [0, 1, 2]
    with stage("coefficients"):
        reps = _reports(cfg, orders)
    return {"coefficients": [r.to_json() for r in reps]}, True


def cmd_spectrum(cfg: JobConfig) -> tuple[dict, bool]:
    with stage("spectrum"):
        s = _spectrum(cfg)
    out = {"spectrum": s.metadata(), "count": s.count, "lambda_max": s.lambda_max,
           "lowest": s.expanded()[:10].tolist(), "weyl_ratio": s.weyl_ratio()}
    if cfg.output:
        csv_path, side = write_spectrum(s, f"{cfg.output}.spectrum.csv")
        out["files"] = [str(csv_path), str(side)]
    return out, True


def cmd_fit(cfg: JobConfig) -> tuple[dict, bool]:
    with stage("spectrum"):
        s = _spectrum(cfg)
    n_default = get_model_checked(cfg.params["model"]).fit_n_max if "model" in cfg.params else 4
    with stage("fit"):
        fit = _fit(cfg, s, n_default)
    if cfg.output:
        fit.write_csv(f"{cfg.output}.fit.csv")
    return {"fit": fit.to_json()}, fit.converged


def cmd_verify(cfg: JobConfig) -> tuple[dict, bool]:
    model = get_model_checked(cfg.params["model"])
    orders = cfg.params.get("orders") or [0, 1, 2]
    with stage("coefficients"):
        reps = _reports(cfg, orders)
    with stage("spectrum"):
        s = _spectrum(cfg)
    with stage("fit"):
        fit = _fit(cfg, s, max(model.fit_n_max, max(orders) + 1))
    with stage("verify"):
        ok, verdicts = verify_against_formula(fit, reps, cfg.params.get("tolerance", 2e-3))
    for v in verdicts:
        print(v.line(), file=sys.stderr)
    if cfg.output:
        fit.write_csv(f"{cfg.output}.fit.csv")
    return {"verdicts": [asdict(v) for v in verdicts], "passed": ok,
            "fit": fit.to_json()}, ok


def _metric(cfg: JobConfig) -> HermitianTorusMetric:
    return HermitianTorusMetric.from_expression(cfg.params.get("psi", "sin(x1)"),
                                                cfg.params.get("variant", "standard"))


def _compare(cfg: JobConfig, metric: HermitianTorusMetric) -> dict:
    N = cfg.params.get("N", 16)
    A = hermitian_torus_delta0(metric, N)
    B = hermitian_torus_box0(metric, N).scaled(2)
    res = operator_compare(A, B, cfg.params.get("trials", 8), cfg.params.get("seed", 0))
    res["per_mesh"] = [list(x) for x in res["per_mesh"]]
    res["status"] = "converging" if res["ratio"] <= 0.35 else "non-vanishing"
    return res


def cmd_compare(cfg: JobConfig) -> tuple[dict, bool]:
    with stage("parse psi"):
        metric = _metric(cfg)
    with stage("operator comparison"):
        res = _compare(cfg, metric)
    ok = True
    if "tolerance" in cfg.params:
        ok = res["rel_diff"] <= cfg.params["tolerance"]
    return {"delta_vs_2box": res, "passed": ok}, ok


def cmd_kaehler(cfg: JobConfig) -> tuple[dict, bool]:
    with stage("parse psi"):
        metric = _metric(cfg)
    with stage("torsion integrals"):
        K = metric.integrate_k(cfg.params.get("resolution", 32), cfg.params.get("orientation", 1))
        vol = metric.volume(cfg.params.get("resolution", 32))
    with stage("a2 comparison"):
        a2 = a2_form_laplacians(3, 0.0, K, 0.0)
        scale = max(abs(K.K1), abs(K.K2), abs(K.K3), 1e-12 * vol) * (4 * math.pi) ** -3
        rtol = cfg.params.get("tolerance", 1e-6)
        eq0 = abs(a2.box0 - a2.delta0) <= rtol * scale
        eq1 = abs(a2.box1 - a2.delta1) <= rtol * scale
        verdict = kaehler_decide(3, eq0, eq1, K, volume=vol)
    with stage("operator comparison"):
        cmp = _compare(cfg, metric)
    # K2 = |d Omega|^2 / 2 >= 0 pointwise, so a positive integral rules out Kaehler directly
    result = {
        "psi": metric.psi.text, "variant": metric.variant.value,
        "kaehler": False if K.K2 > 1e-12 * vol else verdict.is_kaehler,
        "decision": verdict.decision.value, "reason": verdict.reason,
        "int_K1": K.K1, "int_K2": K.K2, "int_K3": K.K3, "volume": vol,
        "a2_equal_p0": eq0, "a2_equal_p1": eq1,
        "delta_vs_2box": cmp,
    }
    return result, True


HANDLERS = {"coeff": cmd_coeff, "spectrum": cmd_spectrum, "fit": cmd_fit,
            "verify": cmd_verify, "kaehler": cmd_kaehler, "compare": cmd_compare}


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def run(cfg: JobConfig) -> int:
    if cfg.output:
        Path(cfg.output).parent.mkdir(parents=True, exist_ok=True)
    try:
        result, ok = HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"heatspec: error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"heatspec: numerical failure: {exc}", file=sys.stderr)
        return 3
    report = {"command": cfg.command, "params": cfg.params, "inputs": cfg.inputs,
              "result": result, "ok": bool(ok)}
    text = json.dumps(report, indent=2, default=_jsonable)
    if cfg.output:
        Path(f"{cfg.output}.report.json").write_text(text + "\n")
    print(text)
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"heatspec: error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
