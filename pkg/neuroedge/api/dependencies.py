from fastapi import HTTPException

from neuroedge.service.cloud.endpoint import CloudEndpoint


_endpoint: CloudEndpoint | None = None


def configure_endpoint(endpoint: CloudEndpoint | None) -> None:
    global _endpoint
    _endpoint = endpoint


def get_cloud_endpoint() -> CloudEndpoint:
    if _endpoint is None:
        raise HTTPException(status_code=503, detail="No scenario is loaded on this cloud service")
    return _endpoint
