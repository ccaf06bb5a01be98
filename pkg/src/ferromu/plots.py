"""Report figures, rendered headless to files next to the delimited output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["save_inductance_figure", "save_phase_figure", "save_misfit_figure"]

_DPI = 150


def save_inductance_figure(path, spectra) -> None:
    """Re/Im of labelled inductance spectra vs frequency, two panels."""
    fig, (ax_re, ax_im) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    for label, spec in spectra.items():
        f = spec.grid.as_array()
        ax_re.semilogx(f, spec.values.real * 1e6, label=label)
        ax_im.semilogx(f, spec.values.imag * 1e6, label=label)
    ax_re.set_ylabel("Re dL (uH)")
    ax_re.axhline(0.0, color="0.7", lw=0.8)
    ax_re.legend(fontsize=8)
    ax_im.set_ylabel("Im dL (uH)")
    ax_im.set_xlabel("frequency (Hz)")
    for ax in (ax_re, ax_im):
        ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_phase_figure(path, curves) -> None:
    """Labelled phase spectra vs frequency on one axis."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, phase in curves.items():
        ax.semilogx(phase.grid.as_array(), phase.theta_deg, label=label)
    ax.axhline(90.0, color="0.7", lw=0.8)
    ax.set_xlabel("frequency (Hz)")
    ax.set_ylabel("phase (deg)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_misfit_figure(path, mu_values, misfits, recovered_mu) -> None:
    """Objective landscape from the bracketing scan with the fitted value."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(mu_values, misfits, "o-", ms=4)
    ax.axvline(recovered_mu, color="C3", lw=1.0, label=f"fit: {recovered_mu:.1f}")
    ax.set_xlabel("relative permeability")
    ax.set_ylabel("RMS phase misfit (deg)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
