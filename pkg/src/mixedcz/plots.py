"""SVG renderings of the CSV outputs (best effort, not part of the contract)."""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed ids and no timestamp make the SVG bytes reproducible
matplotlib.rcParams["svg.hashsalt"] = "mixedcz"


def _columns(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    cols = {}
    for k in rows[0] if rows else ():
        vals = [r[k] for r in rows]
        cols[k] = None if any(v == "" for v in vals) else [float(v) for v in vals]
    return cols


def _save(fig, out):
    fig.tight_layout()
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)


def trace_svg(csv_path, out, title=""):
    c = _columns(csv_path)
    fig, ax = plt.subplots(1, 3, figsize=(12, 3.6))
    ax[0].plot(c["y1"], c["T1"], lw=1)
    ax[0].set(xlabel="y1", ylabel="T1")
    ax[1].plot(c["y2"], c["T2"], lw=1)
    ax[1].set(xlabel="y2", ylabel="T2")
    if c.get("phi") is not None:
        ax[2].plot(c["t"], c["phi"], lw=1)
    ax[2].set(xlabel="t", ylabel="energy")
    fig.suptitle(title)
    _save(fig, out)


def ledger_svg(csv_path, out):
    c = _columns(csv_path)
    fig, ax = plt.subplots(1, 2, figsize=(9, 3.6))
    for k in ("E", "K", "F", "W"):
        if c.get(k) is not None:
            ax[0].plot(c["t"], c[k], label=k, lw=1)
    ax[0].legend()
    ax[0].set(xlabel="t", ylabel="energy")
    for k in ("max_gamma1", "max_gamma2"):
        ax[1].plot(c["t"], c[k], label=k, lw=1)
    ax[1].legend()
    ax[1].set(xlabel="t", ylabel="history")
    _save(fig, out)
