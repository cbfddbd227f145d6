import logging
from fastapi import FastAPI

from neuroedge.api.routers import link
from neuroedge.service.runner.config import LOG_FORMAT, LOG_LEVEL


logging.basicConfig(
    level=LOG_LEVEL,
    format=LOG_FORMAT
)

app = FastAPI(title="neuroedge cloud")

app.include_router(link.router)

@app.get("/")
async def root():
    return {"message": "Cloud side of the neuroedge link. Edges post supervision frames to /api/link/frames."}


# how to run:
# python -m neuroedge serve --scenario workbench --port 8000
