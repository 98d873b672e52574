"""Experiment configuration, end-to-end pipelines, and dataset emission.

Configs are flat snake_case JSON; unknown keys are a hard error, since
config drift is the main reproducibility hazard. Field CSVs carry a
`# l=<eval_l> t=<t> model=<name>` header and full double precision via
shortest round-trip formatting, so re-running a config reproduces files
byte for byte.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .dynamics import FlowSpec, generator_matrix, vector_field
from .features import VonMisesParams, von_mises_eval, von_mises_fourier
from .lattice import build_lattice
from .predict import (EvalGrid, classical_predict, fock_predict, make_context,
                      qm_predict, true_predict)
from .rkha import RkhaParams, markov_check, subconvolutivity_constant
from .spectrum import SchemeKind, eigendecompose, eigenfunction_values

MODELS = ("true", "classical", "qm", "fock")


@dataclass
class ExperimentConfig:
    system: str = "rotation"
    alpha: float = math.sqrt(30.0)
    p: float = 0.75
    tau: float = 1e-3
    z: float = 0.1
    scheme: str = "resolvent"
    J: int = 16
    n_eig: int = 64
    d: int = 16
    kappa_obs: list = field(default_factory=lambda: [1.0, 6.0])
    mu_obs: list = field(default_factory=lambda: [0.0, 0.0])
    kappa_eval: float = 200.0
    n: int = 4
    l: int = 128
    eval_l: int = 64
    times: list = field(default_factory=lambda: [0.0, 1.0, 2.0, 4.0])
    out_dir: str = "out"
    seed: int = 0
    classical_projection: str = "alg2"
    eig_fields: list = field(default_factory=list)
    c1: float = 4.0
    c2: float = 0.02
    eps0: float = 1.0

    def __post_init__(self) -> None:
        if self.system not in ("rotation", "stepanoff"):
            raise ValueError(f"unknown system {self.system!r}")
        if self.scheme not in ("resolvent", "compact"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        m = (2 * self.J + 1) ** 2
        if not 2 * self.d + 1 <= self.n_eig + 1 <= m:
            raise ValueError(f"need 2d <= n_eig <= m-1 (d={self.d}, n_eig={self.n_eig}, m={m})")
        if self.l <= 0 or self.l % 4 != 0:
            raise ValueError(f"sampling grid side must be a positive multiple of 4, got {self.l}")
        if not all(math.isfinite(t) for t in self.times):
            raise ValueError("times must be finite")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            raw = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    def scheme_kind(self) -> SchemeKind:
        z = self.z if self.scheme == "resolvent" else None
        return SchemeKind(self.scheme, z)

    def flow(self) -> FlowSpec:
        return FlowSpec(self.system, self.alpha)


def _fmt(v: float) -> str:
    return repr(float(v))


def _write_field_csv(path: Path, field2d: np.ndarray, l: int, t: float, model: str) -> None:
    """eval_l rows of eval_l values; row = theta2 index, column = theta1 index."""
    lines = [f"# l={l} t={t:g} model={model}"]
    grid = field2d.reshape(l, l).T  # [a,b] -> row b, column a
    for row in grid:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _parallel_chunks(fn, X: np.ndarray, workers: int | None = None):
    """Apply fn to fixed slices of X, optionally in parallel; order-stable."""
    if workers is None:
        workers = int(os.environ.get("KTN_THREADS", "0")) or (os.cpu_count() or 1)
    chunks = np.array_split(np.arange(len(X)), max(1, min(workers * 4, len(X))))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda idx: fn(X[idx]), chunks))
    return np.concatenate(parts)


def _observable(cfg: ExperimentConfig):
    p = VonMisesParams(mu=tuple(cfg.mu_obs), kappa=tuple(cfg.kappa_obs))
    return lambda x: von_mises_eval(p, x)


def _basis(cfg: ExperimentConfig, d: int, lat=None):
    lat = lat or build_lattice(2, cfg.J)
    params = RkhaParams(p=cfg.p, tau=cfg.tau)
    return eigendecompose(cfg.flow(), params, lat, cfg.scheme_kind(), cfg.n_eig, d)


def run_spectrum(cfg: ExperimentConfig, out_dir=None):
    """Eigendecomposition with n_eig/2 frequency pairs; emits spectrum.csv,
    a vector-field sample for plotting, and any requested eigenfunction fields."""
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    basis = _basis(cfg, d=cfg.n_eig // 2)

    lines = ["index,omega,dirichlet_energy"]
    for k in range(len(basis.omega)):
        lines.append(f"{k},{_fmt(basis.omega[k])},{_fmt(basis.E[k])}")
    (out / "spectrum.csv").write_text("\n".join(lines) + "\n")

    g = 24
    theta = 2.0 * np.pi * np.arange(g) / g
    mesh = np.stack(np.meshgrid(theta, theta, indexing="ij"), axis=-1).reshape(-1, 2)
    vel = vector_field(cfg.flow(), mesh)
    vlines = ["theta1,theta2,v1,v2"]
    for pt, v in zip(mesh, vel):
        vlines.append(",".join(_fmt(u) for u in (*pt, *v)))
    (out / "vectorfield.csv").write_text("\n".join(vlines) + "\n")

    if cfg.eig_fields:
        nodes = EvalGrid(cfg.eval_l, 2).nodes
        zeta = eigenfunction_values(basis, nodes)
        for k in cfg.eig_fields:
            _write_field_csv(out / f"eigenfunction_{k}.csv", np.real(zeta[:, k]),
                             cfg.eval_l, 0.0, f"eig{k}")
    return basis


def run_prediction(cfg: ExperimentConfig, out_dir=None) -> dict:
    """All four models on the evaluation grid for every requested time.

    Emits field and error CSVs per (model, t) and a summary.json with
    l2/linf of (model - true) and the field minimum per entry. Grid points
    with an annihilated feature state are recorded as missing values.
    """
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lat = build_lattice(2, cfg.J)
    basis = _basis(cfg, d=cfg.d, lat=lat)
    f = _observable(cfg)
    ctx = make_context(basis, EvalGrid(cfg.l, 2), f, cfg.kappa_eval, cfg.n)
    f_hat = von_mises_fourier(VonMisesParams(tuple(cfg.mu_obs), tuple(cfg.kappa_obs)), lat)
    X = EvalGrid(cfg.eval_l, 2).nodes

    summary: dict = {}
    for t in cfg.times:
        fields_t = {
            "true": _parallel_chunks(lambda pts, _t=t: true_predict(cfg.flow(), f, _t, pts), X),
            "classical": classical_predict(basis, f_hat, t, X,
                                           projection=cfg.classical_projection),
            "qm": qm_predict(ctx, t, X, on_degenerate="nan"),
            "fock": fock_predict(ctx, t, X, on_degenerate="nan"),
        }
        for model, vals in fields_t.items():
            _write_field_csv(out / f"field_{model}_t{t:g}.csv", vals, cfg.eval_l, t, model)
            if model != "true":
                diff = vals - fields_t["true"]
                _write_field_csv(out / f"error_{model}_t{t:g}.csv", diff, cfg.eval_l, t, model)
            finite = np.isfinite(vals)
            diff = (vals - fields_t["true"])[finite & np.isfinite(fields_t["true"])]
            summary.setdefault(model, {})[f"{t:g}"] = {
                "l2": float(np.sqrt(np.mean(diff ** 2))),
                "linf": float(np.max(np.abs(diff))),
                "min": float(np.min(vals[finite])),
            }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def run_convergence(cfg: ExperimentConfig, out_dir=None) -> list:
    """Fock prediction on the circle rotation against a quadrature reference.

    For each eps in {eps0, eps0/2, eps0/4}: n = ceil(c1/eps), tau = c2 eps^2;
    the reference expectation pairs the evolved observable with the squared
    feature density sigma_{theta, 2 kappa}. Emits convergence.csv.
    """
    if cfg.system != "rotation":
        raise ValueError("convergence study is defined for the circle rotation")
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    d = 2
    lat = build_lattice(1, max(8, cfg.J // 4))
    flow = FlowSpec("rotation", cfg.alpha)
    kappa = cfg.kappa_eval
    obs = VonMisesParams(mu=(cfg.mu_obs[0],), kappa=(cfg.kappa_obs[0],))
    f = lambda x: von_mises_eval(obs, x)

    theta_eval = 2.0 * np.pi * np.arange(32) / 32.0
    phi = 2.0 * np.pi * np.arange(8192) / 8192.0
    state = VonMisesParams(mu=(0.0,), kappa=(2.0 * kappa,))
    sigma2 = von_mises_eval(state, phi)

    rows = []
    for k in range(3):
        eps = cfg.eps0 / 2 ** k
        n = math.ceil(cfg.c1 / eps)
        tau = cfg.c2 * eps * eps
        params = RkhaParams(p=cfg.p, tau=tau)
        basis = eigendecompose(flow, params, lat, SchemeKind("compact"), 2 * d, d)
        ctx = make_context(basis, EvalGrid(cfg.l, 1), f, kappa, n)
        err = 0.0
        for t in cfg.times:
            pred = fock_predict(ctx, t, theta_eval[:, None])
            ref = np.array([np.mean(f(th + cfg.alpha * t + phi) * sigma2)
                            for th in theta_eval])
            err = max(err, float(np.max(np.abs(pred - ref))))
        rows.append((eps, n, tau, err))

    lines = ["eps,n,tau,max_error"]
    for eps, n, tau, err in rows:
        lines.append(f"{_fmt(eps)},{n},{_fmt(tau)},{_fmt(err)}")
    (out / "convergence.csv").write_text("\n".join(lines) + "\n")
    return rows


def _quadrature_generator(flow: FlowSpec, lat, g: int) -> np.ndarray:
    """Independent g x g trapezoid quadrature of <phi_r, V.grad phi_s>."""
    theta = 2.0 * np.pi * np.arange(g) / g
    mesh = np.stack(np.meshgrid(theta, theta, indexing="ij"), axis=-1).reshape(-1, 2)
    vel = vector_field(flow, mesh)
    ix = lat.index_array.astype(float)
    phases = np.exp(1j * mesh @ ix.T)                       # (g^2, m)
    W = 1j * (vel @ ix.T) * phases                          # V.grad phi_s on the grid
    return (phases.conj().T @ W) / (g * g)


def run_check(cfg: ExperimentConfig) -> dict:
    """Markov, subconvolutivity, and generator-oracle report."""
    params = RkhaParams(p=cfg.p, tau=cfg.tau)
    lat = build_lattice(2, min(cfg.J, 16))
    mk = markov_check(params, lat, g=4 * lat.J)
    sub = {J: subconvolutivity_constant(params, build_lattice(2, J)) for J in (4, 8, 16)}
    oracle_lat = build_lattice(2, 4)
    A = generator_matrix(cfg.flow(), oracle_lat).toarray()
    Q = _quadrature_generator(cfg.flow(), oracle_lat, g=32)
    gen_err = float(np.max(np.abs(A - Q)))
    report = {
        "markov_min": mk["min"],
        "markov_mean": mk["mean"],
        "subconvolutivity": {str(J): c for J, c in sub.items()},
        "generator_oracle_max_err": gen_err,
        "ok": bool(abs(mk["mean"] - 1.0) <= 1e-10 and gen_err <= 1e-10
                   and all(np.isfinite(c) for c in sub.values())),
    }
    return report
