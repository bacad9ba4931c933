"""Batch runner: ``qpurify {reconstruct,montecarlo,entropy-sweep,kraus-audit}``.

Every number written out comes from a library call; this module only parses
configuration, loops over samples and serialises.  Floats are written with 17
significant digits so output files round-trip exactly.

Exit codes: 0 ok, 1 invariant violations, 2 configuration error,
3 inconsistent measurement record.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .analysis import (
    TAU_INEQ,
    TAU_MC_GRID,
    TAU_MC_POINT,
    HaarSampler,
    analytic_from_record,
    check_chain,
    empirical_fidelities,
    haar_pure,
    phase_average_adjudication,
    random_density,
)
from .core import (
    DensityMatrix,
    PureState,
    eigenvalues_from_determinant,
    entropy_determinant_derivative,
    entropy_from_determinant,
    von_neumann_entropy,
)
from .errors import ConfigError, InconsistentRecord, QPurifyError
from .kraus import (
    PurificationBasis,
    apply_channel,
    dilation_unitary,
    entropy_audit,
    kraus_from_unitary,
    purifying_channel,
)
from .purification import decompose, purify_a, purify_b
from .reconstruction import (
    MeasurementRecord,
    canonical_axes,
    compatible_initial_states,
    maxent_state,
    probabilities_from_state,
    unbiased_state,
)

COMMANDS = ("reconstruct", "montecarlo", "entropy-sweep", "kraus-audit")
FORMATS = ("json", "csv")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_INCONSISTENT = 3

FD_STEP = 1e-6
FD_REL_TOL = 1e-4
DEFAULT_DET_GRID = tuple(round(0.01 * i, 2) for i in range(1, 25)) + (0.25,)


@dataclass
class ExperimentConfig:
    command: str
    k: int = 2
    probs: list | None = None
    psi: list | None = None
    samples: int = 1000
    seed: int = 0
    phase_grid: int = 64
    output_path: str | None = None
    format: str = "json"
    basis: str = "computational"
    det_grid: list | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError("command", f"must be one of {COMMANDS}")
        if self.k not in (1, 2, 3):
            raise ConfigError("k", "must be 1, 2 or 3")
        if self.format not in FORMATS:
            raise ConfigError("format", f"must be one of {FORMATS}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be an integer in [0, 2**64)")
        if self.samples < 1:
            raise ConfigError("samples", "must be >= 1")
        if self.phase_grid < 8:
            raise ConfigError("phase_grid", "must be >= 8")
        if self.basis not in ("computational", "eigen"):
            raise ConfigError("basis", "must be 'computational' or 'eigen'")
        if self.command == "reconstruct":
            if (self.probs is None) == (self.psi is None):
                raise ConfigError("probs/psi", "reconstruct needs exactly one of probs or psi")
            if self.probs is not None and len(self.probs) != self.k:
                raise ConfigError("probs", f"expected {self.k} values for k={self.k}")
        if self.psi is not None and len(self.psi) != 4:
            raise ConfigError("psi", "expected 4 numbers: re(alpha) im(alpha) re(beta) im(beta)")
        if self.det_grid is not None:
            for d in self.det_grid:
                if not 0.0 < d <= 0.25:
                    raise ConfigError("det_grid", f"value {d!r} outside (0, 1/4]")
        return self

    def state(self) -> PureState:
        re_a, im_a, re_b, im_b = (float(x) for x in self.psi)
        try:
            return PureState([complex(re_a, im_a), complex(re_b, im_b)], normalize=True)
        except QPurifyError as exc:
            raise ConfigError("psi", str(exc)) from exc

    def echo(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.pop("output_path")
        return d


@dataclass
class ResultRecord:
    command: str
    config: dict
    result: dict
    violations: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)

    @property
    def total_violations(self) -> int:
        return sum(int(v) for v in self.violations.values())

    def to_dict(self) -> dict:
        return {
            "library": "qpurify",
            "version": __version__,
            "command": self.command,
            "seed": self.config.get("seed"),
            "config": self.config,
            "violations": self.violations,
            "total_violations": self.total_violations,
            "result": self.result,
        }


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def _encode(obj, indent=0) -> str:
    # json.dumps offers no float format hook, so the tree is walked here
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number, bool)) for v in obj):
            return "[" + ", ".join(_encode(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_json(record: ResultRecord) -> str:
    return _encode(record.to_dict()) + "\n"


def dumps_csv(record: ResultRecord) -> str:
    rows = record.rows or [_flatten(record.result)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0].keys())
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(row.get(h)) for h in header])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return _fmt_float(float(v))
    if v is None:
        return ""
    return str(v)


def _flatten(d, prefix="") -> dict:
    out = {}
    for key, v in d.items():
        name = f"{prefix}{key}"
        if isinstance(v, dict):
            out.update(_flatten(v, name + "."))
        elif isinstance(v, (list, tuple)):
            out[name] = " ".join(_csv_cell(x) for x in v)
        else:
            out[name] = v
    return out


def matrix_entries(m) -> list:
    """Row-major entries as ``[re, im]`` pairs."""
    return [[float(z.real), float(z.imag)] for z in np.asarray(m).reshape(-1)]


def vector_entries(psi: PureState) -> list:
    return [[float(z.real), float(z.imag)] for z in psi.amplitudes]


# --- commands ---------------------------------------------------------------


def run_reconstruct(cfg: ExperimentConfig) -> ResultRecord:
    """Reconstruct, purify and score a single measurement record."""
    cfg.validate()
    if cfg.psi is not None:
        psi = cfg.state()
        rec = probabilities_from_state(psi, canonical_axes(cfg.k))
    else:
        try:
            rec = MeasurementRecord.from_probs(cfg.probs)
        except ValueError as exc:
            raise ConfigError("probs", str(exc)) from exc
        cands = compatible_initial_states(rec)
        psi = cands.state(0.0) if cfg.k == 1 else cands[0]
    unb = unbiased_state(rec)
    mx = maxent_state(rec)
    state_a = purify_a(decompose(unb), 0.0)
    b = purify_b(unb)
    analytic = analytic_from_record(rec)
    empirical = empirical_fidelities(psi, cfg.k, cfg.phase_grid)
    diffs = {
        name: abs(getattr(empirical, name) - getattr(analytic, name))
        for name in ("f_mixed", "f_protocol_a_avg", "f_protocol_b", "f_maxent")
    }
    violations = {
        "analytic_vs_empirical": sum(d > TAU_MC_GRID for d in diffs.values()),
        "protocol_b_below_mixed": int(empirical.f_protocol_b < empirical.f_mixed - TAU_INEQ),
    }
    result = {
        "axes": list(rec.axes),
        "probs": list(rec.probs),
        "initial_state": vector_entries(psi),
        "rho_unbiased": matrix_entries(unb),
        "rho_maxent": matrix_entries(mx),
        "protocol_a_phase": 0.0,
        "protocol_a_phase_grid": cfg.phase_grid,
        "rho_protocol_a": matrix_entries(state_a.projector()),
        "protocol_b_state": vector_entries(b.state),
        "rho_protocol_b": matrix_entries(b.state.projector()),
        "analytic": analytic.as_dict(),
        "empirical": empirical.as_dict(),
        "analytic_empirical_diff": diffs,
    }
    if cfg.k == 2:
        result["phase_average"] = phase_average_adjudication(psi, cfg.phase_grid)
    return ResultRecord("reconstruct", cfg.echo(), result, violations)


def _summary(values) -> dict:
    arr = np.asarray(values, dtype=float)
    return {
        "min": float(arr.min()),
        "mean": float(arr.mean()),
        "max": float(arr.max()),
        "std": float(arr.std()),
    }


REPORT_FIELDS = (
    "f_mixed",
    "f_protocol_a_avg",
    "f_protocol_b",
    "f_maxent",
    "f_maxent_protocol_a_avg",
    "f_maxent_protocol_b",
    "mixed_purified_overlap",
)


def run_montecarlo(cfg: ExperimentConfig) -> ResultRecord:
    """Haar sweep comparing analytic and empirical fidelities."""
    cfg.validate()
    rows = []
    chain = None
    violations = {"analytic_vs_empirical": 0, "protocol_b_below_mixed": 0}
    for i in range(cfg.samples):
        psi = haar_pure(HaarSampler(cfg.seed, i))
        emp = empirical_fidelities(psi, cfg.k, cfg.phase_grid)
        ana = analytic_from_record(probabilities_from_state(psi, canonical_axes(cfg.k)))
        worst = max(abs(getattr(emp, f) - getattr(ana, f)) for f in REPORT_FIELDS)
        violations["analytic_vs_empirical"] += int(worst > TAU_MC_GRID)
        violations["protocol_b_below_mixed"] += int(emp.f_protocol_b < emp.f_mixed - TAU_INEQ)
        if cfg.k == 2:
            chain = check_chain(emp, chain)
        row = {"index": i, "alpha_re": psi.alpha.real, "alpha_im": psi.alpha.imag,
               "beta_re": psi.beta.real, "beta_im": psi.beta.imag, "bloch_norm": emp.bloch_norm}
        row.update({f: getattr(emp, f) for f in REPORT_FIELDS})
        row["max_analytic_diff"] = worst
        rows.append(row)
    result = {"samples": cfg.samples}
    result.update({f: _summary([r[f] for r in rows]) for f in REPORT_FIELDS})
    result["max_analytic_diff"] = max(r["max_analytic_diff"] for r in rows)
    if chain is not None:
        result["inequality_chain"] = {name: asdict(s) for name, s in chain.items()}
        violations["inequality_chain"] = sum(s.violations for s in chain.values())
    if cfg.k == 3:
        violations["constant_f_mixed"] = int(result["f_mixed"]["std"] >= TAU_MC_POINT)
    return ResultRecord("montecarlo", cfg.echo(), result, violations, rows)


def run_entropy_sweep(cfg: ExperimentConfig) -> ResultRecord:
    """Entropy as a function of the determinant, with finite-difference check."""
    cfg.validate()
    grid = cfg.det_grid or DEFAULT_DET_GRID
    rows = []
    for det in sorted(grid):
        lam = eigenvalues_from_determinant(det)
        s = von_neumann_entropy(DensityMatrix(np.diag(lam).astype(complex)))
        deriv = entropy_determinant_derivative(det)
        if det + FD_STEP <= 0.25:
            fd = (entropy_from_determinant(det + FD_STEP) - entropy_from_determinant(det - FD_STEP)) / (2 * FD_STEP)
        else:
            # one-sided at the maximally mixed endpoint
            fd = (entropy_from_determinant(det) - entropy_from_determinant(det - FD_STEP)) / FD_STEP
        rel = abs(fd - deriv) / abs(deriv)
        rows.append({"determinant": det, "lambda_plus": lam[0], "lambda_minus": lam[1],
                     "entropy": s, "derivative": deriv, "finite_difference": fd,
                     "relative_error": rel, "derivative_ok": rel <= FD_REL_TOL and deriv >= 0})
    entropies = [r["entropy"] for r in rows]
    violations = {
        "derivative_mismatch": sum(not r["derivative_ok"] for r in rows),
        "entropy_not_monotone": sum(b < a - TAU_INEQ for a, b in zip(entropies, entropies[1:])),
    }
    result = {"grid_points": len(rows), "rows": rows,
              "note": "determinant 0 excluded: derivative diverges there"}
    return ResultRecord("entropy-sweep", cfg.echo(), result, violations, rows)


def _audit_one(pb: PurificationBasis, rho0: DensityMatrix) -> dict:
    audit = entropy_audit(pb, rho0)
    ch = purifying_channel(pb)
    u = dilation_unitary(pb)
    extracted = kraus_from_unitary(u)
    target = pb.target.projector()
    row = audit.as_dict()
    row.update({
        "unitarity_residual": float(np.max(np.abs(u.conj().T @ u - np.eye(4)))),
        "kraus_extraction_residual": max(
            float(np.max(np.abs(a - b))) for a, b in zip(extracted.operators, ch.operators)
        ),
        "completeness_residual": ch.completeness_residual(),
        "channel_output_residual": float(np.max(np.abs(np.asarray(apply_channel(ch, rho0)) - target))),
        "entropy_swap_residual": abs(audit.s_env_after_unitary - audit.s_before),
    })
    return row


def _audit_violations(rows) -> dict:
    return {
        "entropy_decrease": sum(not r["entropy_ok"] for r in rows),
        "determinant_decrease": sum(not r["determinant_ok"] for r in rows),
        "entropy_swap": sum(r["entropy_swap_residual"] > 1e-10 for r in rows),
        "unitary_entropy": sum(abs(r["s_after_unitary"] - r["s_before"]) > 1e-10 for r in rows),
        "dilation": sum(
            max(r["unitarity_residual"], r["kraus_extraction_residual"],
                r["completeness_residual"], r["channel_output_residual"]) > 1e-12
            for r in rows
        ),
        "factorization": sum(r["factorization_residual"] > 1e-10 for r in rows),
        "equality_mismatch": sum(
            (abs(r["entropy_increase"]) <= 1e-10) != r["basis_diagonalizes"] for r in rows
        ),
    }


def run_kraus_audit(cfg: ExperimentConfig) -> ResultRecord:
    """Entropy audit plus dilation checks on a given or random inputs.

    With ``psi`` the input is ``|psi><psi|`` purified to ``|0>`` in the chosen
    basis; otherwise ``samples`` random (basis, state, target) triples are used.
    """
    cfg.validate()
    rows = []
    if cfg.psi is not None:
        psi = cfg.state()
        rho0 = psi.density()
        target = PureState([1.0, 0.0])
        pb = (PurificationBasis.eigenbasis(rho0, target) if cfg.basis == "eigen"
              else PurificationBasis.computational(target))
        rows.append({"index": 0, **_audit_one(pb, rho0)})
    else:
        for i in range(cfg.samples):
            rho0 = random_density(HaarSampler(cfg.seed, i))
            b0 = haar_pure(HaarSampler(cfg.seed, i, stream=1))
            target = haar_pure(HaarSampler(cfg.seed, i, stream=2))
            pb = (PurificationBasis.eigenbasis(rho0, target) if cfg.basis == "eigen"
                  else PurificationBasis(b0, b0.orthogonal(), target))
            rows.append({"index": i, **_audit_one(pb, rho0)})
    violations = _audit_violations(rows)
    inc = [r["entropy_increase"] for r in rows]
    result = {
        "samples": len(rows),
        "entropy_increase": _summary(inc),
        "max_unitarity_residual": max(r["unitarity_residual"] for r in rows),
        "max_kraus_extraction_residual": max(r["kraus_extraction_residual"] for r in rows),
        "max_channel_output_residual": max(r["channel_output_residual"] for r in rows),
        "max_entropy_swap_residual": max(r["entropy_swap_residual"] for r in rows),
    }
    if len(rows) == 1:
        result["audit"] = rows[0]
    return ResultRecord("kraus-audit", cfg.echo(), result, violations, rows)


RUNNERS = {
    "reconstruct": run_reconstruct,
    "montecarlo": run_montecarlo,
    "entropy-sweep": run_entropy_sweep,
    "kraus-audit": run_kraus_audit,
}


# --- argument handling ------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpurify", description="Qubit purification and reconstruction experiments."
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON file with ExperimentConfig fields")
    parser.add_argument("--k", type=int)
    parser.add_argument("--probs", type=float, nargs="+")
    parser.add_argument("--psi", type=float, nargs=4, metavar=("RE_A", "IM_A", "RE_B", "IM_B"))
    parser.add_argument("--samples", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--phase-grid", type=int, dest="phase_grid")
    parser.add_argument("--basis", choices=("computational", "eigen"))
    parser.add_argument("--det-grid", type=float, nargs="+", dest="det_grid")
    parser.add_argument("--out", dest="output_path")
    parser.add_argument("--format", choices=FORMATS)
    return parser


def config_from_args(argv=None) -> ExperimentConfig:
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from exc
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError("config", f"unknown fields {sorted(unknown)}")
    for key, v in vars(args).items():
        if key != "config" and v is not None:
            values[key] = v
    values["command"] = args.command
    return ExperimentConfig(**values)


def write_record(record: ResultRecord, cfg: ExperimentConfig):
    text = dumps_json(record) if cfg.format == "json" else dumps_csv(record)
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        record = RUNNERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InconsistentRecord as exc:
        print(f"inconsistent record: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    write_record(record, cfg)
    return EXIT_VIOLATION if record.total_violations else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
