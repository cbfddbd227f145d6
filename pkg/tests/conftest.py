import pytest
from fastapi.testclient import TestClient

from neuroedge.api.dependencies import get_cloud_endpoint
from neuroedge.main import app
from neuroedge.service.runner.orchestrator import build_cloud_endpoint
from neuroedge.service.runner.scenarios import config_from_dict

# Two seconds of workbench with a compressed schedule: 20 steps, 5 warmup, check every 5.
SHORT_WORKBENCH = {
    "scenario": "workbench",
    "horizon": 2.0,
    "learning": {"warmup_steps": 5, "check_interval": 5},
}


@pytest.fixture(scope="function")
def short_workbench():
    return config_from_dict(SHORT_WORKBENCH)


@pytest.fixture(scope="function")
def workbench_endpoint(short_workbench):
    return build_cloud_endpoint(short_workbench)


@pytest.fixture(scope="function")
def client(workbench_endpoint):
    app.dependency_overrides[get_cloud_endpoint] = lambda: workbench_endpoint
    with TestClient(app) as c:
        yield c
    app.dependency_overrides.clear()
