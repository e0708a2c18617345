"""
Classifier registry database
Stored Wishart/SVM models and evaluation reports; SQLite by default
"""

import logging
from datetime import datetime

from sqlalchemy import Column, DateTime, Float, ForeignKey, Integer, String, Text, create_engine
from sqlalchemy.orm import declarative_base, relationship, sessionmaker

from app.settings import DATABASE_URL

logger = logging.getLogger(__name__)

engine = create_engine(
    DATABASE_URL,
    connect_args={"check_same_thread": False} if "sqlite" in DATABASE_URL else {}
)

SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)
Base = declarative_base()


class ClassifierRecord(Base):
    """A trained classifier and its serialized model text"""
    __tablename__ = "classifiers"

    id = Column(Integer, primary_key=True, index=True)
    name = Column(String, unique=True, index=True, nullable=False)
    kind = Column(String, nullable=False)  # wishart | svm
    class_ids = Column(String, nullable=False)  # comma separated
    looks = Column(Integer, nullable=True)
    parameters = Column(Text, nullable=True)  # JSON
    model_text = Column(Text, nullable=False)
    created_at = Column(DateTime, default=datetime.utcnow)

    evaluations = relationship("EvaluationRecord", back_populates="classifier")


class EvaluationRecord(Base):
    """A confusion-matrix report"""
    __tablename__ = "evaluations"

    id = Column(Integer, primary_key=True, index=True)
    name = Column(String, index=True, nullable=False)
    classifier_id = Column(Integer, ForeignKey("classifiers.id", ondelete="SET NULL"), nullable=True)
    overall_accuracy = Column(Float, nullable=False)
    mean_recall = Column(Float, nullable=False)
    pixels = Column(Integer, nullable=False)
    report_csv = Column(Text, nullable=False)
    created_at = Column(DateTime, default=datetime.utcnow)

    classifier = relationship("ClassifierRecord", back_populates="evaluations")


def get_db():
    """Dependency for getting database session"""
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def init_db():
    """Initialize database tables"""
    Base.metadata.create_all(bind=engine)
    logger.debug(f"Registry tables ready at {DATABASE_URL}")
