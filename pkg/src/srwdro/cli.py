"""Command-line interface.

Subcommands: gen-data, train, eval, sweep, oracle-check, certify, metrics.
Any training flag may also come from a flat `key = value` config file
(--config); explicit command-line flags win. Exit codes: 0 success,
1 configuration error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import datasets
from .adversary import AttackConfig
from .certificates import (CertificateInputs, certificate_probability,
                           covering_number_greedy, feasibility_monte_carlo,
                           write_certificate_report)
from .core import AmbiguityParams, DiscreteDistribution
from .dro_oracle import (FiniteInstance, dual_value, export_oracle_csv,
                         sr_loss_exact)
from .exceptions import ConfigError, NumericError, SrwdroError
from .harness import (TrainConfig, evaluate, load_config_file, load_model,
                      make_dataset, run_experiment, save_model, train)
from .metrics import (CostMatrix, kl_divergence, lp_metric, tv_distance,
                      wasserstein_p)

_BOOL = {"true": True, "1": True, "yes": True,
         "false": False, "0": False, "no": False}

_CONFIG_FIELDS = {f.name: f for f in dataclasses.fields(TrainConfig)}


def _coerce(name, value):
    f = _CONFIG_FIELDS[name]
    if f.type in ("int", int):
        return int(value)
    if f.type in ("float", float):
        return float(value)
    if f.type in ("tuple", tuple):
        return tuple(int(v) for v in str(value).split(",") if v != "")
    if f.type in ("bool", bool):
        return _BOOL[str(value).lower()]
    return value


def _add_train_flags(parser):
    parser.add_argument("--config", help="flat key = value config file")
    for f in dataclasses.fields(TrainConfig):
        parser.add_argument(f"--{f.name.replace('_', '-')}",
                            dest=f.name, default=None)


def _build_config(args) -> TrainConfig:
    values = {}
    if args.config:
        for key, raw in load_config_file(args.config).items():
            if key not in _CONFIG_FIELDS:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = _coerce(key, raw)
    for name in _CONFIG_FIELDS:
        raw = getattr(args, name, None)
        if raw is not None:
            values[name] = _coerce(name, raw)
    return TrainConfig(**values).validate()


def _load_or_make(cfg: TrainConfig, data_path, test_path):
    if data_path:
        data = datasets.read_csv(data_path)
        test = datasets.read_csv(test_path) if test_path else data
        return data, test
    return make_dataset(cfg)


def _cmd_gen_data(args):
    data = datasets.make_synthetic(args.kind, args.n, args.noise, args.seed)
    if args.label_noise > 0:
        data = datasets.flip_labels(data, args.label_noise, args.seed + 20_000)
    datasets.write_csv(data, args.out)
    print(f"wrote {len(data)} samples to {args.out}")


def _cmd_train(args):
    cfg = _build_config(args)
    data, test = _load_or_make(cfg, args.data, args.test)
    model, history = train(cfg, data, test)
    os.makedirs(args.out_dir, exist_ok=True)
    history.to_csv(os.path.join(args.out_dir, "history.csv"))
    save_model(os.path.join(args.out_dir, "model.bin"), model)
    rob = history.column("test_robust_acc") if history.rows else np.array([0.0])
    summary = {
        "config": dataclasses.asdict(cfg),
        "best_epoch": history.best_epoch,
        "final": {
            "test_nat_acc": float(history.column("test_nat_acc")[-1]),
            "test_robust_acc": float(rob[-1]),
        } if history.rows else {},
        "best_robust_acc": float(rob.max()) if history.rows else None,
    }
    with open(os.path.join(args.out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, default=str)
    print(json.dumps(summary["final"]))


def _cmd_eval(args):
    model = load_model(args.model)
    data = datasets.read_csv(args.data)
    attack = None
    if args.eps > 0:
        attack = AttackConfig(args.eps, args.k, args.eps / 4, args.norm,
                              True, args.seed)
    acc, loss = evaluate(model, data, attack)
    print(json.dumps({"accuracy": acc, "mean_loss": loss,
                      "attacked": attack is not None}))


def _cmd_sweep(args):
    base = _build_config(args)
    gammas = [float(g) for g in args.gammas.split(",")]
    seeds = [int(s) for s in args.seeds.split(",")]
    configs = [dataclasses.replace(base, gamma=g) for g in gammas]
    os.makedirs(args.out_dir, exist_ok=True)
    rows, aggregates = run_experiment(configs, seeds, args.out_dir)
    failures = [r for r in rows if r["error"]]
    for agg, g in zip(aggregates, gammas):
        print(f"gamma={g}: diff = {agg['diff_mean']:.4f} "
              f"+/- {agg['diff_std']:.4f} over {agg['runs']} seeds")
    if failures:
        print(f"{len(failures)} runs failed; see summary.json", file=sys.stderr)


def _cmd_oracle_check(args):
    rng = np.random.default_rng(args.seed)
    records = []
    for i in range(args.instances):
        pts = rng.uniform(0, 1, (args.m, 2))
        cost = CostMatrix.from_points(pts, norm="linf")
        losses = rng.uniform(0, 1, args.m)
        w = rng.dirichlet(np.ones(args.m))
        base = DiscreteDistribution(list(range(args.m)), w)
        params = AmbiguityParams(args.eps, args.gamma, p=args.p)
        inst = FiniteInstance(cost, losses, base, params)
        primal = sr_loss_exact(inst, args.grid_res)
        dual = dual_value(inst)
        gap = dual - primal
        records.append((inst, primal))
        print(f"instance {i}: enumeration={primal:.6f} dual={dual:.6f} "
              f"gap={gap:+.2e}")
    if args.csv:
        export_oracle_csv(args.csv, records)
        print(f"wrote {args.csv}")


def _cmd_certify(args):
    rng = np.random.default_rng(args.seed)
    pts = rng.uniform(0, 1, (args.space_size, 2))
    cost = CostMatrix.from_points(pts, norm="linf")
    diam = cost.diameter
    delta = (args.eps / (diam + 1)) ** args.p
    m_cover = covering_number_greedy(pts, delta, cost)
    c = CertificateInputs(args.n, args.gamma, args.eps, diam, args.p, m_cover)
    raw, clamped, vacuous = certificate_probability(c)
    row = {"n": args.n, "eps": args.eps, "gamma": args.gamma, "p": args.p,
           "m_cover": m_cover, "bound": clamped, "trials": args.trials}
    print(f"diam={diam:.4f} delta={delta:.6f} m_cover={m_cover} "
          f"bound={clamped:.6f} vacuous={vacuous}")
    if args.trials > 0:
        true = DiscreteDistribution(
            list(range(args.space_size)),
            np.full(args.space_size, 1.0 / args.space_size))
        freq = feasibility_monte_carlo(true, cost, args.n, args.eps,
                                       args.gamma, args.p, args.trials,
                                       args.seed)
        row["empirical_freq"] = freq
        print(f"empirical feasibility frequency: {freq:.4f}")
        if args.report:
            write_certificate_report(args.report, [row])
            print(f"wrote {args.report}")


def _parse_weights(text):
    return np.array([float(v) for v in text.split(",")])


def _cmd_metrics(args):
    mu = _parse_weights(args.mu)
    nu = _parse_weights(args.nu)
    cost = CostMatrix(np.array(
        [[float(v) for v in row.split(",")] for row in args.cost.split(";")]))
    out = {
        "wasserstein": wasserstein_p(mu, nu, cost, args.p),
        "kl": kl_divergence(mu, nu) if len(mu) == len(nu) else None,
        "tv": tv_distance(mu, nu) if len(mu) == len(nu) else None,
        "lp": lp_metric(mu, nu, cost),
    }
    print(json.dumps(out))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="srwdro",
        description="Statistically robust Wasserstein DRO toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="write a synthetic dataset CSV")
    g.add_argument("--kind", default="two_moons")
    g.add_argument("--n", type=int, default=400)
    g.add_argument("--noise", type=float, default=0.1)
    g.add_argument("--label-noise", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen_data)

    t = sub.add_parser("train", help="run one training configuration")
    _add_train_flags(t)
    t.add_argument("--data", help="training CSV (default: synthetic)")
    t.add_argument("--test", help="test CSV")
    t.add_argument("--out-dir", default="run")
    t.set_defaults(func=_cmd_train)

    e = sub.add_parser("eval", help="evaluate a checkpoint")
    e.add_argument("--model", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--eps", type=float, default=0.0)
    e.add_argument("--k", type=int, default=10)
    e.add_argument("--norm", default="linf")
    e.add_argument("--seed", type=int, default=0)
    e.set_defaults(func=_cmd_eval)

    s = sub.add_parser("sweep", help="gamma sweep over seeds")
    _add_train_flags(s)
    s.add_argument("--gammas", default="0,0.05,0.1,0.2")
    s.add_argument("--seeds", default="0,1,2")
    s.add_argument("--out-dir", default="sweep")
    s.set_defaults(func=_cmd_sweep)

    o = sub.add_parser("oracle-check",
                       help="enumeration vs dual on random finite instances")
    o.add_argument("--instances", type=int, default=5)
    o.add_argument("--m", type=int, default=3)
    o.add_argument("--eps", type=float, default=0.1)
    o.add_argument("--gamma", type=float, default=0.1)
    o.add_argument("--p", type=int, default=1)
    o.add_argument("--grid-res", type=int, default=60)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--csv", help="write regression-pin CSV")
    o.set_defaults(func=_cmd_oracle_check)

    c = sub.add_parser("certify", help="certificate bound and Monte Carlo check")
    c.add_argument("--n", type=int, default=50)
    c.add_argument("--eps", type=float, default=0.15)
    c.add_argument("--gamma", type=float, default=0.1)
    c.add_argument("--p", type=int, default=1)
    c.add_argument("--space-size", type=int, default=3)
    c.add_argument("--trials", type=int, default=0)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--report", help="write the CSV report here")
    c.set_defaults(func=_cmd_certify)

    m = sub.add_parser("metrics", help="distances between two weight vectors")
    m.add_argument("--mu", required=True, help="comma-separated weights")
    m.add_argument("--nu", required=True)
    m.add_argument("--cost", required=True,
                   help="rows separated by ';', entries by ','")
    m.add_argument("--p", type=int, default=1)
    m.set_defaults(func=_cmd_metrics)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NumericError, SrwdroError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
