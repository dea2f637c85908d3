#!/usr/bin/env python3
"""Render publication-style figures from saccel experiment outputs.

Reads only the CSV files the experiment CLI writes and draws the six
standard plots; every reference line (pi*t, t/2, 1/2, the tail bound
curve) is computed from its closed form, never from the data columns.

    python3 figures/render.py --kind variance_growth \
        --in runs/brownian_single/variance_growth.csv --out var.png
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class SchemaError(ValueError):
    """Input file missing, empty, or not matching the documented schema."""


def read_table(path, columns) -> dict:
    """Load the named numeric columns; reject anything off-schema."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in columns if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing columns {missing}; header is {header}"
            )
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    out = {}
    for c in columns:
        try:
            out[c] = np.array([float(r[c]) for r in rows])
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{path}: column {c} is not numeric: {exc}") from None
    return out


def _single_input(paths):
    if len(paths) != 1:
        raise SchemaError(f"this figure takes exactly one input file, got {len(paths)}")
    return paths[0]


def fig_variance_growth(paths):
    data = read_table(_single_input(paths), ["t", "var"])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(data["t"], data["var"], "o-", ms=3, label="ensemble variance")
    t_ref = np.linspace(0.0, data["t"].max(), 200)
    ax.plot(t_ref, np.pi * t_ref, "k--", lw=1, label=r"$\pi t$")
    ax.set_xlabel("t")
    ax.set_ylabel(r"Var$(P_t - P_0)$")
    ax.set_title("Momentum variance growth")
    ax.legend()
    return fig


def fig_qv_convergence(paths):
    data = read_table(_single_input(paths), ["n", "t", "qv"])
    fig, ax = plt.subplots(figsize=(6, 4))
    for n in np.unique(data["n"]):
        sel = data["n"] == n
        ax.plot(data["t"][sel], data["qv"][sel], lw=1.2, label=f"n = {n:g}")
    t_ref = np.linspace(0.0, data["t"].max(), 200)
    ax.plot(t_ref, 0.5 * t_ref, "k--", lw=1, label=r"$t/2$")
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\langle V^n \rangle_t$")
    ax.set_title("Quadratic variation of the relative velocity")
    ax.legend()
    return fig


def fig_ergodic_convergence(paths):
    data = read_table(_single_input(paths), ["seed", "t", "avg"])
    fig, ax = plt.subplots(figsize=(6, 4))
    for seed in np.unique(data["seed"]):
        sel = data["seed"] == seed
        ax.plot(data["t"][sel], data["avg"][sel], color="C0", alpha=0.25, lw=0.8)
    ax.axhline(0.5, color="k", ls="--", lw=1, label="1/2")
    ax.set_xscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel(r"$t^{-1}\int_0^t \sin^2 X_s\,ds$")
    ax.set_ylim(0.0, 1.0)
    ax.set_title("Ergodic average convergence")
    ax.legend()
    return fig


def fig_occupation_decay(paths):
    data = read_table(_single_input(paths), ["horizon", "seed", "fraction"])
    fig, ax = plt.subplots(figsize=(6, 4))
    horizons = np.unique(data["horizon"])
    medians = []
    for h in horizons:
        sel = data["horizon"] == h
        vals = data["fraction"][sel]
        ax.plot(np.full(vals.size, h), vals, "o", color="C0", alpha=0.3, ms=3)
        medians.append(np.median(vals))
    ax.plot(horizons, medians, "s-", color="C3", label="median")
    ax.set_xscale("log")
    ax.set_xlabel("horizon T")
    ax.set_ylabel("occupation fraction of the band")
    ax.set_title("Occupation fraction decay")
    ax.legend()
    return fig


def fig_k1_fraction(paths):
    data = read_table(_single_input(paths), ["M", "seed", "fraction"])
    fig, ax = plt.subplots(figsize=(6, 4))
    m_values = np.unique(data["M"])
    medians = []
    for m in m_values:
        sel = data["M"] == m
        vals = data["fraction"][sel]
        ax.plot(np.full(vals.size, m), vals, "o", color="C0", alpha=0.3, ms=3)
        medians.append(np.median(vals))
    ax.plot(m_values, medians, "s-", color="C3", label="median")
    ax.set_yscale("log")
    ax.set_xlabel("band half-width M")
    ax.set_ylabel("K1 time fraction")
    ax.set_title("Short-excursion time fraction vs M")
    ax.legend()
    return fig


def fig_tail_bound(paths):
    data = read_table(_single_input(paths), ["b", "k", "T", "empirical", "upper99"])
    fig, ax = plt.subplots(figsize=(6, 4))
    order = np.argsort(data["b"])
    b, k, t_dur = data["b"][order], data["k"][order], data["T"][order]
    ax.semilogy(b, data["empirical"][order], "o", label="empirical frequency")
    ax.semilogy(b, data["upper99"][order], "v", label="99% upper confidence")
    b_ref = np.linspace(b.min(), b.max(), 200)
    # reference curve from the closed form, using the file's (k, T) regime
    bound = 2.0 * np.exp(-(b_ref**2) / (2.0 * k[0] ** 2 * t_dur[0]))
    ax.semilogy(b_ref, bound, "k--", lw=1, label=r"$2\,e^{-b^2/(2k^2T)}$")
    ax.set_xlabel("threshold b")
    ax.set_ylabel(r"P$(\sup |M_t - M_0| \geq b)$")
    ax.set_title("Martingale sup-tail vs bound")
    ax.legend()
    return fig


KINDS = {
    "variance_growth": fig_variance_growth,
    "qv_convergence": fig_qv_convergence,
    "ergodic_convergence": fig_ergodic_convergence,
    "occupation_decay": fig_occupation_decay,
    "k1_fraction": fig_k1_fraction,
    "tail_bound": fig_tail_bound,
}


def render(kind, inputs, out_path) -> None:
    """Validate inputs, draw the figure, and write a non-empty image."""
    if kind not in KINDS:
        raise SchemaError(f"unknown figure kind {kind!r}; known: {', '.join(KINDS)}")
    fig = KINDS[kind]([Path(p) for p in inputs])
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=130, bbox_inches="tight")
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kind", required=True, choices=sorted(KINDS))
    parser.add_argument(
        "--in", dest="inputs", required=True, nargs="+", metavar="CSV",
        help="experiment CSV output(s) for this figure",
    )
    parser.add_argument("--out", required=True, help="image file to write")
    args = parser.parse_args(argv)
    try:
        render(args.kind, args.inputs, args.out)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
