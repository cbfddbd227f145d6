import logging
from typing import Optional

from fastapi import APIRouter, Depends, HTTPException, Query

from neuroedge.api.dependencies import get_cloud_endpoint
from neuroedge.domain.errors import InsideObstacle, MalformedMessage
from neuroedge.models.link import LinkMessage
from neuroedge.service.cloud.endpoint import CloudEndpoint


router = APIRouter(
    prefix="/api/link",
    tags=["link"],
)

logger = logging.getLogger(__name__)


def _collision(e: InsideObstacle) -> HTTPException:
    return HTTPException(status_code=409, detail={"message": str(e), "distance": e.distance, "t": e.t})


@router.post("/frames", response_model=Optional[LinkMessage])
def post_frame(msg: LinkMessage, endpoint: CloudEndpoint = Depends(get_cloud_endpoint)):
    """
    Deliver one edge message to the cloud. A supervision request is answered with
    the control message for its step; a state report has no reply.
    """
    try:
        return endpoint.handle(msg)
    except MalformedMessage as e:
        logger.warning(f"rejected {msg.kind} message for step {msg.step}: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except InsideObstacle as e:
        logger.error(f"cloud reference collided: {e}")
        raise _collision(e)


@router.get("/reference")
def get_reference(
    steps: int = Query(..., ge=1, description="Number of reference states to return, starting at step 0."),
    endpoint: CloudEndpoint = Depends(get_cloud_endpoint),
):
    try:
        return {"states": endpoint.trajectory(steps)}
    except InsideObstacle as e:
        raise _collision(e)
