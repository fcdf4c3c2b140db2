"""Shared fixtures.  Pipeline runs are session-scoped because the flagship
configuration takes tens of seconds."""

import pytest

from conetrees import PipelineConfig, run_pipeline


@pytest.fixture(scope="session")
def flagship_outdir(tmp_path_factory):
    return tmp_path_factory.mktemp("flagship") / "bundle"


@pytest.fixture(scope="session")
def flagship_result(flagship_outdir):
    cfg = PipelineConfig(generator="circle", params={"n": 512}, r=0.125,
                         depth=4, colors=2, outdir=str(flagship_outdir))
    return run_pipeline(cfg)


@pytest.fixture(scope="session")
def deep_result():
    cfg = PipelineConfig(generator="circle", params={"n": 512}, r=0.125,
                         depth=6, colors=2, tree_delta_check=False)
    return run_pipeline(cfg)


@pytest.fixture(scope="session")
def visual_result():
    cfg = PipelineConfig(generator="visual_circle", params={"n": 512},
                         r=0.125, depth=4, colors=2)
    return run_pipeline(cfg)


@pytest.fixture(scope="session")
def visual_deep_result():
    cfg = PipelineConfig(generator="visual_circle", params={"n": 512},
                         r=0.125, depth=6, colors=2, tree_delta_check=False)
    return run_pipeline(cfg)
