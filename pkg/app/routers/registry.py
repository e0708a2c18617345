"""
Registry Endpoints
Browse stored classifiers and evaluations, and classify pixels with a stored classifier
"""

import logging
from typing import List, Optional

import numpy as np
from fastapi import APIRouter, Depends, Response, status
from sqlalchemy.orm import Session

from app import crud
from app.database import get_db
from app.errors import NotFoundError
from app.models import ClassifierSummary, ClassifyResponse, EvaluationSummary, PixelBatch, ProblemDetails
from app.routers.analysis import pixels_to_raster
from app.svm import SvmModel, predict
from app.wishart import classify_wishart

logger = logging.getLogger(__name__)

router = APIRouter()

NOT_FOUND = {404: {"model": ProblemDetails, "description": "Record not found"}}


def _classifier_or_404(db: Session, classifier_id: int):
    record = crud.get_classifier(db, classifier_id)
    if not record:
        raise NotFoundError(f"classifier {classifier_id} not found")
    return record


def _evaluation_or_404(db: Session, evaluation_id: int):
    record = crud.get_evaluation(db, evaluation_id)
    if not record:
        raise NotFoundError(f"evaluation {evaluation_id} not found")
    return record


@router.get("/classifiers", response_model=List[ClassifierSummary], tags=["classifiers"])
async def list_classifiers(kind: Optional[str] = None, db: Session = Depends(get_db)):
    """List registered classifiers, optionally only one kind (wishart or svm)"""
    return crud.get_classifiers(db, kind)


@router.get("/classifiers/{classifier_id}", response_model=ClassifierSummary,
            responses=NOT_FOUND, tags=["classifiers"])
async def get_classifier(classifier_id: int, db: Session = Depends(get_db)):
    return _classifier_or_404(db, classifier_id)


@router.get("/classifiers/{classifier_id}/model", response_class=Response,
            responses=NOT_FOUND, tags=["classifiers"])
async def get_classifier_model(classifier_id: int, db: Session = Depends(get_db)):
    """Serialized model text, as written by the train-* commands"""
    record = _classifier_or_404(db, classifier_id)
    return Response(content=record.model_text, media_type="text/plain")


@router.post(
    "/classifiers/{classifier_id}/classify",
    response_model=ClassifyResponse,
    responses=NOT_FOUND,
    tags=["classifiers"],
    summary="Assigns each submitted T3 pixel to a class"
)
async def classify_pixels(classifier_id: int, batch: PixelBatch,
                          db: Session = Depends(get_db)) -> ClassifyResponse:
    """
    Classifies T3 pixels with a stored classifier.

    Args:
        classifier_id: registry id of the classifier
        batch: PixelBatch of 9-value T3 rows
        db: Database session

    Returns:
        ClassifyResponse with one class id per pixel

    Raises:
        NotFoundError: unknown classifier id (404)
    """
    model = crud.load_classifier(db, classifier_id)
    if isinstance(model, SvmModel):
        labels = predict(model, np.asarray(batch.pixels, dtype=np.float64))
    else:
        labels = classify_wishart(pixels_to_raster(batch), model).labels[0]
    logger.info(f"Classifier {classifier_id} labeled {len(labels)} pixel(s)")
    return ClassifyResponse(classifier_id=classifier_id, labels=[int(v) for v in labels])


@router.delete("/classifiers/{classifier_id}", status_code=status.HTTP_204_NO_CONTENT,
               responses=NOT_FOUND, tags=["classifiers"])
async def delete_classifier(classifier_id: int, db: Session = Depends(get_db)):
    if not crud.delete_classifier(db, classifier_id):
        raise NotFoundError(f"classifier {classifier_id} not found")
    return Response(status_code=status.HTTP_204_NO_CONTENT)


@router.get("/evaluations", response_model=List[EvaluationSummary], tags=["evaluations"])
async def list_evaluations(classifier_id: Optional[int] = None, db: Session = Depends(get_db)):
    """List stored evaluations, optionally for one classifier"""
    return crud.get_evaluations(db, classifier_id)


@router.get("/evaluations/{evaluation_id}", response_model=EvaluationSummary,
            responses=NOT_FOUND, tags=["evaluations"])
async def get_evaluation(evaluation_id: int, db: Session = Depends(get_db)):
    return _evaluation_or_404(db, evaluation_id)


@router.get("/evaluations/{evaluation_id}/csv", response_class=Response,
            responses=NOT_FOUND, tags=["evaluations"])
async def get_evaluation_csv(evaluation_id: int, db: Session = Depends(get_db)):
    """The confusion-matrix report in CSV form"""
    record = _evaluation_or_404(db, evaluation_id)
    return Response(content=record.report_csv, media_type="text/csv")


@router.delete("/evaluations/{evaluation_id}", status_code=status.HTTP_204_NO_CONTENT,
               responses=NOT_FOUND, tags=["evaluations"])
async def delete_evaluation(evaluation_id: int, db: Session = Depends(get_db)):
    if not crud.delete_evaluation(db, evaluation_id):
        raise NotFoundError(f"evaluation {evaluation_id} not found")
    return Response(status_code=status.HTTP_204_NO_CONTENT)
