"""Figure rendering for the report paths.

Each CSV-producing command can optionally render a matplotlib figure next
to its output; the CSV stays the primary artifact.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def fidelity_sweep_figure(values, fidelities, axis: str, path,
                          crossing: float | None = None) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    if axis == "qfactor":
        ax.semilogx(values, fidelities, "o-", ms=3.5)
        ax.set_xlabel("cavity Q factor")
    else:
        ax.plot(values, fidelities, "o-", ms=3.5)
        ax.set_xlabel(r"pure-dephasing linewidth $2\hbar\gamma_{\rm phase}$ ($\mu$eV)")
    ax.axhline(0.9, color="gray", lw=0.8, ls="--")
    if crossing is not None:
        ax.axvline(crossing, color="gray", lw=0.8, ls=":")
    ax.set_ylabel("two-qubit gate fidelity")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)


def cmt_trace_figure(times, energies, path) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(times, energies[0], label="cavity 1")
    ax.plot(times, energies[1], label="cavity 2")
    ax.set_xlabel(r"time ($1/\Gamma_c$)")
    ax.set_ylabel("cavity energy")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)


def amplitudes_figure(labels, amplitudes, path) -> None:
    amplitudes = np.asarray(amplitudes)
    populated = np.abs(amplitudes) > 1e-6
    labels = [lab for lab, keep in zip(labels, populated) if keep]
    amps = amplitudes[populated]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * len(labels) + 2.0), 3.4))
    x = np.arange(len(labels))
    ax.bar(x - 0.18, amps.real, width=0.36, label="Re")
    ax.bar(x + 0.18, amps.imag, width=0.36, label="Im")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=60, fontsize=8)
    ax.set_ylabel("amplitude")
    ax.legend()
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
