"""Report types and machine-readable output (JSON, CSV, figures).

Every inequality checker returns an InequalityReport; the CLI `run`
subcommand collects them into a JSON report, a one-row-per-inequality CSV
summary, and a set of matplotlib figures rendered next to the CSV.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


@dataclass
class InequalityReport:
    """Verdict of one inequality sweep.

    ``max_violation`` is max over tested witnesses of (LHS - RHS) / scale
    with scale = 1 + |RHS|; positive values beyond ``tolerance`` mean the
    inequality failed.  ``worst_case`` records the witness that attained
    the maximum (function id, time, point index).
    """

    name: str
    params: dict
    witnesses: int
    max_violation: float
    worst_case: dict
    tolerance: float
    seed: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.max_violation <= self.tolerance

    def to_json(self):
        return {
            "name": self.name,
            "params": self.params,
            "witnesses": self.witnesses,
            "max_violation": self.max_violation,
            "worst_case": self.worst_case,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "passed": self.passed,
            "details": self.details,
        }


def relative_violation(lhs, rhs):
    """Normalized violation (LHS - RHS)/(1 + |RHS|); positive = violated."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    return (lhs - rhs) / (1.0 + np.abs(rhs))


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(path, reports):
    """One row per inequality: name, max_violation, tolerance, pass."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "max_violation", "tolerance", "pass"])
        for r in reports:
            writer.writerow(
                [
                    r.name,
                    f"{r.max_violation:.12g}",
                    f"{r.tolerance:.12g}",
                    str(r.passed).lower(),
                ]
            )


def write_spectrum_csv(path, eigenvalues):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "eigenvalue"])
        for i, ev in enumerate(eigenvalues):
            writer.writerow([i, f"{ev + 0.0:.12g}"])  # normalize -0.0


def render_violation_figure(path, reports):
    """Bar chart of normalized violations against their tolerances."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    names = [r.name for r in reports]
    viol = [r.max_violation for r in reports]
    tols = [r.tolerance for r in reports]
    pos = np.arange(len(names))
    colors = ["tab:green" if r.passed else "tab:red" for r in reports]
    ax.bar(pos, viol, color=colors)
    ax.plot(pos, tols, "k_", markersize=20, label="tolerance")
    ax.set_xticks(pos)
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("max normalized violation")
    ax.axhline(0.0, color="gray", lw=0.5)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_spectrum_figure(path, eigenvalues):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.arange(len(eigenvalues)), eigenvalues, ".", ms=4)
    ax.set_xlabel("index")
    ax.set_ylabel("eigenvalue of $-L$")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_diag_figure(path, ts, diag_max, bound):
    """Heat-kernel diagonal maximum against the ultracontractive bound."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(ts, diag_max, "o-", label="max diag p(x,x,t)")
    ax.loglog(ts, bound, "s--", label="bound")
    ax.set_xlabel("t")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def ensure_dir(path):
    if path:
        os.makedirs(path, exist_ok=True)
    return path
