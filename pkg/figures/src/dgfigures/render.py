"""Render paper-style figures from solver output files."""

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schemas import load_maxdt, load_table

KINDS = ("snapshot", "entropy", "violation", "convergence", "maxdt")

# fixed style: deterministic output, no timestamps or per-run metadata
_SAVE_KW = dict(dpi=150, metadata={"Software": "dgfigures"})


@dataclass
class FigureSpec:
    kind: str
    inputs: list
    output: str
    labels: list = field(default_factory=list)
    title: str = ""

    def label(self, i):
        if i < len(self.labels):
            return self.labels[i]
        return f"series {i + 1}" if len(self.inputs) > 1 else None


def _save(fig, path):
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def _render_snapshot(spec):
    fig, axes = plt.subplots(3, 1, figsize=(7, 8), sharex=True)
    for i, path in enumerate(spec.inputs):
        data = load_table(path, "snapshot")
        for ax, col, name in zip(axes, (1, 2, 3),
                                 ("density", "momentum density",
                                  "energy density")):
            ax.plot(data[:, 0], data[:, col], lw=0.9, label=spec.label(i))
            ax.set_ylabel(name)
    axes[-1].set_xlabel("x")
    if spec.labels:
        axes[0].legend(loc="best", fontsize=8)
    if spec.title:
        axes[0].set_title(spec.title)
    xlim = axes[0].get_xlim()
    _save(fig, spec.output)
    return {"xlim": xlim}


def _render_entropy(spec):
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for i, path in enumerate(spec.inputs):
        data = load_table(path, "entropy")
        ax.plot(data[:, 0], data[:, 1], lw=1.1, label=spec.label(i))
    ax.set_xlabel("t")
    ax.set_ylabel("total entropy")
    if spec.labels or len(spec.inputs) > 1:
        ax.legend(loc="best", fontsize=8)
    if spec.title:
        ax.set_title(spec.title)
    _save(fig, spec.output)
    return {}


def _render_violation(spec):
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    any_positive = False
    for i, path in enumerate(spec.inputs):
        data = load_table(path, "entropy")
        t = data[:, 0]
        v = data[:, 2]
        pos = v > 0.0
        any_positive |= bool(pos.any())
        ax.semilogy(t[pos], v[pos], ".", ms=3, label=spec.label(i))
    ax.set_xlabel("t")
    ax.set_ylabel("positive entropy violation")
    if not any_positive:
        ax.text(0.5, 0.5, "no positive violations", ha="center", va="center",
                transform=ax.transAxes, fontsize=9, color="gray")
    if spec.labels:
        ax.legend(loc="best", fontsize=8)
    if spec.title:
        ax.set_title(spec.title)
    _save(fig, spec.output)
    return {"any_positive": any_positive}


def fit_slope(n, err):
    """Least-squares order of err ~ C N^-q over the whole table."""
    return float(-np.polyfit(np.log(n), np.log(err), 1)[0])


def _render_convergence(spec):
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    slopes = {}
    for i, path in enumerate(spec.inputs):
        data = load_table(path, "convergence")
        n = data[:, 0]
        for col, name, marker in ((1, "L1", "o"), (2, "L2", "s")):
            label = name if not spec.label(i) else f"{spec.label(i)} {name}"
            ax.loglog(n, data[:, col], marker=marker, ms=4, lw=1.0,
                      label=label)
            slopes[label] = fit_slope(n, data[:, col])
    annotation = ", ".join(f"{k}: slope {v:.2f}" for k, v in slopes.items())
    ax.text(0.02, 0.04, annotation, transform=ax.transAxes, fontsize=8)
    ax.set_xlabel("cells N")
    ax.set_ylabel("error")
    ax.legend(loc="best", fontsize=8)
    if spec.title:
        ax.set_title(spec.title)
    _save(fig, spec.output)
    return {"slopes": slopes}


def _render_maxdt(spec):
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    names = []
    stable = []
    unstable = []
    for i, path in enumerate(spec.inputs):
        payload = load_maxdt(path)
        names.append(spec.label(i) or f"run {i + 1}")
        stable.append(payload["multiplier"] or 0.0)
        unstable.append(payload["unstable"] or 0.0)
    x = np.arange(len(names))
    ax.bar(x - 0.18, stable, width=0.36, label="largest stable")
    ax.bar(x + 0.18, unstable, width=0.36, label="first unstable")
    ax.set_xticks(x, names)
    ax.set_ylabel("CFL multiplier")
    ax.legend(loc="best", fontsize=8)
    if spec.title:
        ax.set_title(spec.title)
    _save(fig, spec.output)
    return {"stable": stable, "unstable": unstable}


_RENDERERS = {
    "snapshot": _render_snapshot,
    "entropy": _render_entropy,
    "violation": _render_violation,
    "convergence": _render_convergence,
    "maxdt": _render_maxdt,
}


def render(spec):
    """Write the figure for one spec; returns renderer metadata."""
    if spec.kind not in _RENDERERS:
        raise ValueError(f"unknown figure kind {spec.kind!r}; "
                         f"choose from {KINDS}")
    if not spec.inputs:
        raise ValueError("no input files given")
    return _RENDERERS[spec.kind](spec)
