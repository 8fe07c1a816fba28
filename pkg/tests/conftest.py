"""Shared fixtures.

The expensive synthesized images are session-scoped so the whole suite pays
for each of them once. Everything here uses the package defaults; tests that
need a different configuration build their own.
"""
import pytest

from comettail.config import load_config
from comettail.dispersion import (BUILTIN_SELLMEIER, DispersionModel,
                                  TuningCurve)
from comettail.pattern import synthesize, local_linewidth_map


@pytest.fixture(scope="session")
def rc():
    return load_config()


@pytest.fixture(scope="session")
def cfg(rc):
    return rc.optics


@pytest.fixture(scope="session")
def det(cfg):
    return cfg.detector


@pytest.fixture(scope="session")
def fradkin():
    return BUILTIN_SELLMEIER["fradkin1999-ktp-z"]


@pytest.fixture(scope="session")
def kato():
    return BUILTIN_SELLMEIER["kato2002-ktp-z"]


@pytest.fixture(scope="session")
def model(fradkin):
    return DispersionModel(fradkin, 0.525, 0.795)


@pytest.fixture(scope="session")
def tc(rc):
    """First-principles tuning curve of the default configuration."""
    return rc.tuning()


@pytest.fixture(scope="session")
def tc94():
    """Tuning curve pinned at the round literature value b2 = 0.094 /um."""
    return TuningCurve.from_b2(0.795, 0.094)


@pytest.fixture(scope="session")
def band(rc):
    return rc.band


@pytest.fixture(scope="session")
def prof(rc, tc):
    return rc.make_profile(tc)


@pytest.fixture(scope="session")
def default_comet(cfg, tc, band, prof):
    """Default post-grating synthesis (fringed, V = 0.9)."""
    return synthesize(cfg, tc, band, prof, mode="post", remap="exact")


@pytest.fixture(scope="session")
def default_comet_v0(cfg, tc, band, prof):
    """Same pattern with the interferometer blocked (V = 0)."""
    from dataclasses import replace
    return synthesize(replace(cfg, visibility=0.0), tc, band, prof,
                      mode="post", remap="exact")


@pytest.fixture(scope="session")
def default_linewidth(cfg, tc, band, prof):
    return local_linewidth_map(cfg, tc, band, prof, mode="post")


@pytest.fixture(scope="session")
def default_fit(rc, default_comet):
    from comettail.analysis import extract_ridge, fit_parabola
    return fit_parabola(extract_ridge(default_comet.image, rc.window))
