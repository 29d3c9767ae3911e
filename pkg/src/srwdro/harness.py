"""Training loop, evaluation protocol, experiment sweeps and persistence.

One training iteration follows the alternating scheme: penalty-based
adversarial examples with the current multiplier, a multiplier update
driven by the mean soft distance, KL-constrained batch re-weighting, and
an SGD step (momentum + weight decay) on the weighted adversarial loss.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field, asdict

import numpy as np

from . import datasets
from .adversary import AttackConfig, dhat, pgd_attack, udr_attack
from .core import (Architecture, Dataset, ModelParams, Sample, _backprop,
                   init_params, model_loss, predict)
from .exceptions import ConfigError, NumericError
from .reweight import solve_weights

CHECKPOINT_MAGIC = b"SRWD"
CHECKPOINT_VERSION = 1


@dataclass
class TrainConfig:
    # data
    dataset: str = "two_moons"
    n_train: int = 400
    n_test: int = 400
    noise: float = 0.1
    label_noise: float = 0.0
    # model
    arch: str = "mlp1"
    hidden: int = 16
    activation: str = "tanh"
    # optimization (desk-scale defaults; the long 200/100/150 schedule of the
    # large-scale setup remains selectable)
    epochs: int = 60
    batch_size: int = 64
    lr: float = 0.1
    lr_decay: float = 0.1
    decay_epochs: tuple = (30, 45)
    momentum: float = 0.9
    weight_decay: float = 5e-4
    # ambiguity / attack
    eps: float = 0.1
    gamma: float = 0.1
    p: int = 1
    tau: float = 1.0
    M: float = 1e6
    attack_k: int = 10
    attack_eta: float = 0.025
    norm: str = "linf"
    eta_lambda: float = 0.01
    lambda_init: float = 1.0
    # evaluation attack
    eval_eps: float = 0.1
    eval_k: int = 10
    seed: int = 0

    def validate(self):
        if self.epochs < 0:
            raise ConfigError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if list(self.decay_epochs) != sorted(set(self.decay_epochs)):
            raise ConfigError("decay_epochs must be strictly increasing")
        if self.eps < 0 or self.gamma < 0 or self.tau <= 0:
            raise ConfigError("need eps >= 0, gamma >= 0, tau > 0")
        if self.lambda_init < 0 or self.eta_lambda < 0:
            raise ConfigError("lambda_init and eta_lambda must be >= 0")
        return self


HISTORY_COLUMNS = [
    "epoch", "train_nat_loss", "train_robust_loss", "test_nat_acc",
    "test_robust_acc", "lam", "mean_dhat", "min_weight", "max_weight",
]


@dataclass
class TrainHistory:
    rows: list = field(default_factory=list)

    def append(self, **kw):
        if kw["lam"] < 0:
            raise NumericError("negative multiplier recorded")
        self.rows.append([kw[c] for c in HISTORY_COLUMNS])

    def column(self, name):
        i = HISTORY_COLUMNS.index(name)
        return np.array([r[i] for r in self.rows])

    @property
    def best_epoch(self):
        if not self.rows:
            return -1
        return int(np.argmax(self.column("test_robust_acc")))

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(",".join(HISTORY_COLUMNS) + "\n")
            for row in self.rows:
                fh.write(",".join(
                    str(v) if i == 0 else repr(float(v))
                    for i, v in enumerate(row)) + "\n")


def _derived_seed(base, epoch, index):
    return (base * 1000003 + epoch * 7919 + index * 104729) % (2 ** 31)


def make_dataset(cfg: TrainConfig, seed_offset=0):
    """Train/test pair for the configured synthetic dataset."""
    train = datasets.make_synthetic(cfg.dataset, cfg.n_train, cfg.noise,
                                    cfg.seed + seed_offset)
    test = datasets.make_synthetic(cfg.dataset, cfg.n_test, cfg.noise,
                                   cfg.seed + seed_offset + 10_000)
    if cfg.label_noise > 0:
        train = datasets.flip_labels(train, cfg.label_noise,
                                     cfg.seed + seed_offset + 20_000)
    return train, test


def build_model(cfg: TrainConfig, dim, num_classes) -> ModelParams:
    arch = Architecture(cfg.arch, dim, num_classes,
                        hidden=cfg.hidden, activation=cfg.activation)
    return init_params(arch, cfg.seed)


def evaluate(model: ModelParams, data: Dataset, attack: AttackConfig | None = None):
    """(accuracy, mean loss); robust metrics when an attack is supplied."""
    correct = 0
    total_loss = 0.0
    for i, s in enumerate(data.samples):
        target = s
        if attack is not None and attack.eps > 0:
            cfg = AttackConfig(attack.eps, attack.K, attack.eta, attack.norm,
                               attack.random_start,
                               _derived_seed(attack.seed, 0, i),
                               attack.lam, attack.tau)
            target = pgd_attack(model, s, cfg, data.domain_box)
        correct += predict(model, target.x) == s.y
        total_loss += model_loss(model, target)
    n = len(data)
    return correct / n, total_loss / n


def train(config: TrainConfig, data: Dataset, test: Dataset):
    """Full training run; returns the final model and the per-epoch history."""
    config.validate()
    if data.dim != test.dim or data.num_classes != test.num_classes:
        raise ConfigError("train and test sets disagree on shape")
    model = build_model(config, data.dim, data.num_classes)
    history = TrainHistory()
    if config.epochs == 0:
        return model, history

    rng = np.random.default_rng(config.seed + 1)
    velocity = np.zeros_like(model.theta)
    lam = config.lambda_init
    lr = config.lr
    eval_atk = AttackConfig(config.eval_eps, config.eval_k,
                            config.eval_eps / 4 if config.eval_eps > 0 else 1e-3,
                            config.norm, True, config.seed + 5)
    n = len(data)
    q_cache = {}

    for epoch in range(config.epochs):
        if epoch in config.decay_epochs:
            lr *= config.lr_decay
        order = rng.permutation(n)
        robust_losses = []
        dhat_all = []
        wmin, wmax = np.inf, -np.inf
        for start in range(0, n, config.batch_size):
            batch = [data.samples[i] for i in order[start:start + config.batch_size]]
            adv = []
            for j, s in enumerate(batch):
                cfg = AttackConfig(config.eps, config.attack_k, config.attack_eta,
                                   config.norm, True,
                                   _derived_seed(config.seed, epoch, start + j),
                                   lam, config.tau)
                adv.append(udr_attack(model, s, cfg, data.domain_box))
            dh = [dhat(a.x, s.x, config.eps, config.tau, config.norm)
                  for a, s in zip(adv, batch)]
            dhat_all.extend(dh)
            lam = max(0.0, lam - config.eta_lambda * (config.eps - float(np.mean(dh))))

            losses = np.array([model_loss(model, a) for a in adv])
            nb = len(batch)
            if nb not in q_cache:
                q_cache[nb] = np.full(nb, 1.0 / nb)
            sol = solve_weights(losses, q_cache[nb], config.gamma)
            robust_losses.append(sol.value)
            wmin = min(wmin, sol.weights.min())
            wmax = max(wmax, sol.weights.max())

            grad = np.zeros_like(model.theta)
            for w, a in zip(sol.weights, adv):
                _, gt, _ = _backprop(model, a.x, a.y)
                grad += w * gt
            grad += config.weight_decay * model.theta
            velocity = config.momentum * velocity + grad
            model.theta = model.theta - lr * velocity

        nat_loss = float(np.mean([model_loss(model, s) for s in data.samples]))
        test_nat_acc, _ = evaluate(model, test)
        test_rob_acc, _ = evaluate(model, test, eval_atk)
        history.append(
            epoch=epoch,
            train_nat_loss=nat_loss,
            train_robust_loss=float(np.mean(robust_losses)),
            test_nat_acc=test_nat_acc,
            test_robust_acc=test_rob_acc,
            lam=lam,
            mean_dhat=float(np.mean(dhat_all)),
            min_weight=float(wmin),
            max_weight=float(wmax),
        )
    return model, history


def run_experiment(configs, seeds, outdir=None):
    """Train every config x seed, aggregate Nat / Final / Best / Diff.

    Returns (rows, aggregates); failures are recorded per run, not dropped.
    """
    import os
    rows = []
    for ci, base in enumerate(configs):
        for seed in seeds:
            cfg = TrainConfig(**{**asdict(base), "seed": seed})
            cfg.decay_epochs = tuple(cfg.decay_epochs)
            row = {"config": ci, "seed": seed, "error": ""}
            try:
                data, test = make_dataset(cfg)
                model, hist = train(cfg, data, test)
                rob = hist.column("test_robust_acc")
                row.update(
                    nat=float(hist.column("test_nat_acc")[-1]),
                    final_robust=float(rob[-1]),
                    best_robust=float(rob.max()),
                    diff=float(rob.max() - rob[-1]),
                    best_epoch=hist.best_epoch,
                )
                if outdir:
                    hist.to_csv(os.path.join(
                        outdir, f"curve_c{ci}_s{seed}.csv"))
            except Exception as exc:  # record, do not drop
                row["error"] = f"{type(exc).__name__}: {exc}"
            rows.append(row)

    aggregates = []
    for ci in range(len(configs)):
        ok = [r for r in rows if r["config"] == ci and not r["error"]]
        agg = {"config": ci, "runs": len(ok)}
        for key in ("nat", "final_robust", "best_robust", "diff"):
            vals = np.array([r[key] for r in ok])
            agg[f"{key}_mean"] = float(vals.mean()) if len(ok) else float("nan")
            # n-1 denominator, matching the repeated-seeds convention
            agg[f"{key}_std"] = (float(vals.std(ddof=1))
                                 if len(ok) > 1 else 0.0)
        aggregates.append(agg)

    if outdir:
        import os
        with open(os.path.join(outdir, "table.csv"), "w") as fh:
            cols = ["config", "runs", "nat_mean", "nat_std",
                    "final_robust_mean", "final_robust_std",
                    "best_robust_mean", "best_robust_std",
                    "diff_mean", "diff_std"]
            fh.write(",".join(cols) + "\n")
            for agg in aggregates:
                fh.write(",".join(str(agg[c]) for c in cols) + "\n")
        with open(os.path.join(outdir, "summary.json"), "w") as fh:
            json.dump({"configs": [asdict(c) for c in configs],
                       "seeds": list(seeds),
                       "runs": rows, "aggregates": aggregates}, fh, indent=2,
                      default=str)
    return rows, aggregates


def save_model(path, model: ModelParams):
    """Headered binary checkpoint: magic, version, arch descriptor, f64 params."""
    a = model.arch
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", CHECKPOINT_VERSION))
        kind = a.kind.encode()
        act = a.activation.encode()
        fh.write(struct.pack("<B", len(kind)) + kind)
        fh.write(struct.pack("<III", a.dim, a.num_classes, a.hidden))
        fh.write(struct.pack("<B", len(act)) + act)
        fh.write(struct.pack("<Q", model.theta.size))
        fh.write(model.theta.astype("<f8").tobytes())


def load_model(path) -> ModelParams:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != CHECKPOINT_MAGIC:
        raise ConfigError(f"{path}: not a model checkpoint")
    version, = struct.unpack("<I", raw[4:8])
    if version != CHECKPOINT_VERSION:
        raise ConfigError(f"{path}: unsupported checkpoint version {version}")
    o = 8
    klen = raw[o]; o += 1
    kind = raw[o:o + klen].decode(); o += klen
    dim, num_classes, hidden = struct.unpack("<III", raw[o:o + 12]); o += 12
    alen = raw[o]; o += 1
    act = raw[o:o + alen].decode(); o += alen
    count, = struct.unpack("<Q", raw[o:o + 8]); o += 8
    theta = np.frombuffer(raw[o:o + 8 * count], dtype="<f8").astype(float)
    arch = Architecture(kind, dim, num_classes, hidden=hidden, activation=act)
    return ModelParams(arch, theta)


def load_config_file(path) -> dict:
    """Flat `key = value` pairs, one per line, '#' comments."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key] = value
    return out
