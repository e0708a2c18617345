"""
PolSAR Classifier Registry API
H/A/alpha analysis and access to stored classifiers and evaluation reports
"""

import logging

import yaml
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.openapi.utils import get_openapi
from fastapi.responses import JSONResponse, Response

from app import __version__
from app.database import init_db
from app.errors import PolsarError
from app.routers import analysis, registry
from app.settings import configure_logging

logger = logging.getLogger(__name__)

configure_logging()
init_db()

app = FastAPI(
    title="PolSAR Classifier Registry API",
    version=__version__,
    description="""
    # PolSAR Classifier Registry

    Local analysis service for the PolSAR classification toolkit.

    ### Analysis
    - **POST /decomposition** - Entropy, anisotropy and mean alpha of T3 pixels

    ### Classifiers
    Models registered with `main.py train-wishart|train-svm --register NAME`:
    - **GET /classifiers** - List registered classifiers
    - **GET /classifiers/{id}/model** - Serialized model text
    - **POST /classifiers/{id}/classify** - Classify T3 pixels

    ### Evaluations
    Reports registered with `main.py evaluate --register NAME`:
    - **GET /evaluations** - List stored evaluations
    - **GET /evaluations/{id}/csv** - Confusion matrix report

    No authentication is performed; bind the service to a local address.
    """,
    docs_url="/docs",
    redoc_url="/redoc",
    openapi_url="/openapi.json",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(analysis.router)
app.include_router(registry.router)


@app.get("/", tags=["Information"])
async def root():
    """
    Root endpoint providing API information and available endpoints
    """
    return {
        "name": "PolSAR Classifier Registry API",
        "version": __version__,
        "documentation": {
            "swagger_ui": "/docs",
            "redoc": "/redoc",
            "openapi_spec_json": "/openapi.json",
            "openapi_spec_yaml": "/openapi.yaml"
        },
        "endpoints": {
            "decomposition": "/decomposition",
            "classifiers": "/classifiers",
            "classifier_model": "/classifiers/{classifier_id}/model",
            "classify": "/classifiers/{classifier_id}/classify",
            "evaluations": "/evaluations",
            "evaluation_csv": "/evaluations/{evaluation_id}/csv"
        }
    }


@app.get("/health", tags=["Health"])
async def health_check():
    """
    Health check endpoint for monitoring
    """
    return {
        "status": "healthy",
        "version": __version__
    }


@app.get("/openapi.yaml", response_class=Response, include_in_schema=False)
async def get_openapi_yaml():
    """
    Return OpenAPI schema in YAML format
    """
    return Response(
        content=yaml.dump(app.openapi(), sort_keys=False, default_flow_style=False),
        media_type="application/x-yaml"
    )


@app.exception_handler(PolsarError)
async def polsar_exception_handler(request: Request, exc: PolsarError):
    """
    Toolkit errors rendered as RFC 7807 Problem Details
    """
    logger.warning(f"{exc.title}: {exc}")
    return JSONResponse(status_code=exc.status, content=exc.to_problem(str(request.url)))


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    return JSONResponse(
        status_code=422,
        content={
            "type": "https://polsar.local/errors/request-validation",
            "title": "Invalid Request",
            "status": 422,
            "detail": "; ".join(f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in exc.errors()),
            "instance": str(request.url)
        }
    )


@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    """
    Global exception handler following RFC 7807 Problem Details
    """
    logger.error(f"Unhandled exception: {exc}", exc_info=True)
    return JSONResponse(
        status_code=500,
        content={
            "type": "https://polsar.local/errors/internal-server-error",
            "title": "Internal Server Error",
            "status": 500,
            "detail": "An unexpected error occurred",
            "instance": str(request.url)
        }
    )


def custom_openapi():
    """
    Add tag descriptions to the generated schema
    """
    if app.openapi_schema:
        return app.openapi_schema

    openapi_schema = get_openapi(
        title=app.title,
        version=__version__,
        description=app.description,
        routes=app.routes,
    )
    openapi_schema["tags"] = [
        {"name": "analysis", "description": "Stateless polarimetric analysis"},
        {"name": "classifiers", "description": "Registered Wishart and SVM classifiers"},
        {"name": "evaluations", "description": "Stored confusion-matrix reports"},
        {"name": "Information", "description": "API information and discovery endpoints"},
        {"name": "Health", "description": "Health check and monitoring endpoints"}
    ]
    app.openapi_schema = openapi_schema
    return app.openapi_schema


app.openapi = custom_openapi
