"""
Pydantic models for the toolkit
Filter, kernel, scene and pipeline configuration, registry request/response schemas and Problem Details
"""

from datetime import datetime
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core_types import HermitianMatrix3

DEFAULT_GAMMA = 0.444
DEFAULT_COST = 100.0


class ProblemDetails(BaseModel):
    """
    A Problem Details object as defined in RFC 7807.
    https://datatracker.ietf.org/doc/html/rfc7807
    """
    model_config = ConfigDict(extra="allow")

    type: Optional[str] = Field(None, description="A URI reference that identifies the problem type")
    title: Optional[str] = Field(None, description="A short, human-readable summary of the problem")
    status: Optional[int] = Field(None, description="The HTTP status code")
    detail: Optional[str] = Field(None, description="A human-readable explanation specific to this occurrence")
    instance: Optional[str] = Field(None, description="A URI reference that identifies the specific occurrence")


class FilterMode(str, Enum):
    BOXCAR = "boxcar"
    LEE = "lee"


class FilterConfig(BaseModel):
    """Speckle filter settings"""
    model_config = ConfigDict(frozen=True)

    window: int = Field(3, ge=1, description="Odd window size in pixels")
    mode: FilterMode = Field(FilterMode.BOXCAR, description="Boxcar multilook or Lee MMSE refinement")
    looks: float = Field(1.0, ge=1.0, description="Equivalent number of looks used by the Lee weighting")

    @field_validator("window")
    @classmethod
    def window_is_odd(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError(f"window must be odd, got {value}")
        return value


class KernelKind(str, Enum):
    POLYNOMIAL = "polynomial"
    SIGMOID = "sigmoid"
    RBF = "rbf"


class Kernel(BaseModel):
    """SVM kernel and its parameters; RBF uses exp(-gamma * |x - y|^2)"""
    model_config = ConfigDict(frozen=True)

    kind: KernelKind = Field(KernelKind.RBF, description="Kernel family")
    gamma: float = Field(DEFAULT_GAMMA, gt=0.0, description="RBF width parameter")
    degree: int = Field(3, ge=1, description="Polynomial degree p")


class Rectangle(BaseModel):
    """Half-open pixel rectangle [x0, x1) x [y0, y1)"""
    model_config = ConfigDict(frozen=True)

    x0: int = Field(..., ge=0)
    y0: int = Field(..., ge=0)
    x1: int = Field(..., ge=1)
    y1: int = Field(..., ge=1)

    @field_validator("x1", "y1")
    @classmethod
    def positive_extent(cls, value: int, info) -> int:
        start = info.data.get("x0" if info.field_name == "x1" else "y0")
        if start is not None and value <= start:
            raise ValueError(f"{info.field_name} must be greater than its start coordinate")
        return value

    @property
    def area(self) -> int:
        return (self.x1 - self.x0) * (self.y1 - self.y0)


class SceneClass(BaseModel):
    """One class of a synthetic scene: its true center and where it lies"""
    class_id: int = Field(..., ge=1, le=255, description="Label written to the truth mask")
    name: Optional[str] = Field(None, description="Display name used in reports")
    center: List[float] = Field(
        ...,
        min_length=9,
        max_length=9,
        description="True center in T3 plane order: T11 T22 T33 ReT12 ImT12 ReT13 ImT13 ReT23 ImT23"
    )
    regions: List[Rectangle] = Field(..., min_length=1)

    def matrix(self) -> HermitianMatrix3:
        return HermitianMatrix3.from_planes(self.center)

    @property
    def display_name(self) -> str:
        return self.name or f"class_{self.class_id}"


class SceneSpec(BaseModel):
    """Synthetic scene description; see app.synth.validate_scene for the coverage rules"""
    width: int = Field(..., ge=1)
    height: int = Field(..., ge=1)
    looks: int = Field(9, ge=1, description="Looks n per pixel")
    basis: str = Field("T", pattern="^[TC]$", description="T: centers are coherency matrices, C: covariance")
    seed: int = Field(0, ge=0, lt=2 ** 64)
    train_per_class: int = Field(500, ge=1, description="Training pixels drawn per class")
    classes: List[SceneClass] = Field(..., min_length=1)


class PipelineConfig(BaseModel):
    """Flat key=value pipeline configuration; unknown keys are rejected"""
    model_config = ConfigDict(extra="forbid")

    input: Optional[str] = None
    output: Optional[str] = None
    truth: Optional[str] = None
    train_mask: Optional[str] = None
    model: Optional[str] = None
    predicted: Optional[str] = None
    filter_mode: FilterMode = FilterMode.BOXCAR
    filter_window: int = Field(3, ge=1)
    filter_looks: Optional[float] = Field(None, ge=1.0)
    kernel: KernelKind = KernelKind.RBF
    gamma: float = Field(DEFAULT_GAMMA, gt=0.0)
    cost: float = Field(DEFAULT_COST, gt=0.0)
    degree: int = Field(3, ge=1)
    tolerance: float = Field(1e-3, gt=0.0)
    max_iterations: int = Field(1_000_000, ge=1)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    class_names: Optional[str] = Field(None, description="Comma separated display names in class id order")
    scene: Optional[SceneSpec] = None

    def filter_config(self, input_looks: float = 1.0) -> FilterConfig:
        return FilterConfig(
            window=self.filter_window,
            mode=self.filter_mode,
            looks=self.filter_looks or input_looks
        )

    def kernel_config(self) -> Kernel:
        return Kernel(kind=self.kernel, gamma=self.gamma, degree=self.degree)

    def names(self) -> Optional[List[str]]:
        if not self.class_names:
            return None
        return [name.strip() for name in self.class_names.split(",") if name.strip()]


# Registry service schemas

class PixelBatch(BaseModel):
    """T3 pixels in feature order T11 T22 T33 ReT12 ImT12 ReT13 ImT13 ReT23 ImT23"""
    pixels: List[List[float]] = Field(..., min_length=1, description="One 9-value row per pixel")

    @field_validator("pixels")
    @classmethod
    def nine_values(cls, value: List[List[float]]) -> List[List[float]]:
        for i, row in enumerate(value):
            if len(row) != 9:
                raise ValueError(f"pixel {i} has {len(row)} values, expected 9")
        return value


class HaaResult(BaseModel):
    entropy: float = Field(..., description="Entropy H in [0, 1]")
    anisotropy: float = Field(..., description="Anisotropy A in [0, 1]")
    alpha: float = Field(..., description="Mean alpha angle in degrees")
    degenerate: bool = Field(False, description="True when the two minor eigenvalues are both zero")
    valid: bool = Field(True, description="False for pixels without power or not positive semi-definite")


class DecompositionResponse(BaseModel):
    results: List[HaaResult]


class ClassifyResponse(BaseModel):
    classifier_id: int
    labels: List[int] = Field(..., description="Assigned class id per pixel")


class ClassifierSummary(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    id: int
    name: str
    kind: str
    class_ids: str
    looks: Optional[int] = None
    parameters: Optional[str] = None
    created_at: Optional[datetime] = None


class EvaluationSummary(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    id: int
    name: str
    classifier_id: Optional[int] = None
    overall_accuracy: float
    mean_recall: float
    pixels: int
    created_at: Optional[datetime] = None
