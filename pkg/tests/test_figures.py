"""Figure rendering smoke tests (headless backend, file outputs only)."""

from __future__ import annotations

import numpy as np

from cascadekit import Sample, compare, reconstruct, sample_lognormal
from cascadekit.figures import (
    plot_fit_overlay,
    plot_phi_curves,
    plot_population_histogram,
    plot_reconstruction,
)


def _assert_png(path):
    data = path.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(data) > 1000


def test_phi_curves_png(two_cascade_profiles, tmp_path):
    out = tmp_path / "phi.png"
    plot_phi_curves(two_cascade_profiles, out, story_id="two-cascade")
    _assert_png(out)


def test_population_histogram_png(tmp_path):
    out = tmp_path / "hist.png"
    plot_population_histogram([1, 2, 2, 3, 5, 8, 13, 21], out, label="size")
    _assert_png(out)
    empty = tmp_path / "empty.png"
    plot_population_histogram([], empty, label="size")
    _assert_png(empty)


def test_fit_overlay_png(tmp_path):
    rng = np.random.default_rng(2)
    sample = Sample.from_values(sample_lognormal(1.0, 0.6, 400, rng))
    result = compare(sample, families=("lognormal", "weibull"))
    out = tmp_path / "fit.png"
    plot_fit_overlay(sample.values, result, out)
    _assert_png(out)


def test_reconstruction_png(two_cascade_profiles, tmp_path):
    recon = reconstruct(two_cascade_profiles)
    out = tmp_path / "recon.png"
    plot_reconstruction(recon, out, story_id="two-cascade")
    _assert_png(out)
