"""
CRUD operations for the classifier registry
"""

import json
from typing import Any, Dict, List, Optional, Union

from sqlalchemy.orm import Session

from app.database import ClassifierRecord, EvaluationRecord
from app.errors import ConfigError, NotFoundError
from app.evaluation import ConfusionMatrix, mean_recall, overall_accuracy
from app.formats import dump_model, load_model
from app.svm import SvmModel
from app.wishart import WishartModel

Model = Union[WishartModel, SvmModel]


# Classifiers CRUD
def get_classifiers(db: Session, kind: Optional[str] = None) -> List[ClassifierRecord]:
    """Get all classifiers, optionally filtered by kind"""
    query = db.query(ClassifierRecord)
    if kind:
        query = query.filter(ClassifierRecord.kind == kind)
    return query.order_by(ClassifierRecord.id).all()


def get_classifier(db: Session, classifier_id: int) -> Optional[ClassifierRecord]:
    """Get a specific classifier by ID"""
    return db.query(ClassifierRecord).filter(ClassifierRecord.id == classifier_id).first()


def get_classifier_by_name(db: Session, name: str) -> Optional[ClassifierRecord]:
    return db.query(ClassifierRecord).filter(ClassifierRecord.name == name).first()


def _parameters(model: Model) -> Dict[str, Any]:
    if isinstance(model, WishartModel):
        return {"looks": model.looks}
    return {
        "kernel": model.kernel.kind.value,
        "gamma": model.kernel.gamma,
        "degree": model.kernel.degree,
        "cost": model.cost,
        "support_vectors": int(sum(len(m.alphas) for m in model.machines)),
    }


def create_classifier(db: Session, name: str, model: Model) -> ClassifierRecord:
    """Store a trained model under a unique name"""
    if get_classifier_by_name(db, name):
        raise ConfigError(f"a classifier named '{name}' is already registered")
    is_wishart = isinstance(model, WishartModel)
    record = ClassifierRecord(
        name=name,
        kind="wishart" if is_wishart else "svm",
        class_ids=",".join(str(c) for c in model.class_ids),
        looks=model.looks if is_wishart else None,
        parameters=json.dumps(_parameters(model)),
        model_text=dump_model(model),
    )
    db.add(record)
    db.commit()
    db.refresh(record)
    return record


def load_classifier(db: Session, classifier_id: int) -> Model:
    """Parse the stored model text of a classifier"""
    record = get_classifier(db, classifier_id)
    if not record:
        raise NotFoundError(f"classifier {classifier_id} not found")
    return load_model(record.model_text, f"classifier {classifier_id}")


def delete_classifier(db: Session, classifier_id: int) -> bool:
    """Delete a classifier; its evaluations are kept"""
    record = get_classifier(db, classifier_id)
    if record:
        for evaluation in record.evaluations:
            evaluation.classifier_id = None
        db.delete(record)
        db.commit()
        return True
    return False


# Evaluations CRUD
def get_evaluations(db: Session, classifier_id: Optional[int] = None) -> List[EvaluationRecord]:
    """Get all evaluations, optionally for one classifier"""
    query = db.query(EvaluationRecord)
    if classifier_id is not None:
        query = query.filter(EvaluationRecord.classifier_id == classifier_id)
    return query.order_by(EvaluationRecord.id).all()


def get_evaluation(db: Session, evaluation_id: int) -> Optional[EvaluationRecord]:
    """Get a specific evaluation by ID"""
    return db.query(EvaluationRecord).filter(EvaluationRecord.id == evaluation_id).first()


def create_evaluation(db: Session, name: str, cm: ConfusionMatrix,
                      classifier_id: Optional[int] = None) -> EvaluationRecord:
    """Store a confusion-matrix report"""
    if classifier_id is not None and not get_classifier(db, classifier_id):
        raise NotFoundError(f"classifier {classifier_id} not found")
    record = EvaluationRecord(
        name=name,
        classifier_id=classifier_id,
        overall_accuracy=overall_accuracy(cm),
        mean_recall=mean_recall(cm),
        pixels=cm.total,
        report_csv=cm.to_csv(),
    )
    db.add(record)
    db.commit()
    db.refresh(record)
    return record


def delete_evaluation(db: Session, evaluation_id: int) -> bool:
    """Delete an evaluation"""
    record = get_evaluation(db, evaluation_id)
    if record:
        db.delete(record)
        db.commit()
        return True
    return False
