"""Shared fixtures built on the synthetic demo project: 120 s, two moving
saliency blobs near yaw -90 and +90, scene cuts at 40 s and 80 s, speech
at 35-45 s. Expected values in the fixture-based tests derive from that
construction."""

import pytest

from storysphere.demo import build_demo_project


@pytest.fixture(scope="session")
def project_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("desk_project")
    build_demo_project(root)
    return root


@pytest.fixture(scope="session")
def project_inputs(project_dir):
    from storysphere.ingest import load_project

    return load_project(project_dir / "manifest.json")
