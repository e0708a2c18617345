"""
Kernel SVM classifier
T3 feature vectors, polynomial/sigmoid/RBF kernels, SMO-trained binary machines and
one-vs-one voting over all class pairs
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from app.core_types import CoherencyRaster, HermitianMatrix3
from app.errors import ConfigError, ConvergenceError, DataError, MissingClassError
from app.models import DEFAULT_COST, Kernel, KernelKind
from app.wishart import ClassMap, LabelMask, check_dimensions

logger = logging.getLogger(__name__)

FEATURE_NAMES = ("T11", "T22", "T33", "T12_real", "T12_imag", "T13_real", "T13_imag", "T23_real", "T23_imag")
N_FEATURES = len(FEATURE_NAMES)

DEFAULT_TOLERANCE = 1e-3
DEFAULT_MAX_ITERATIONS = 1_000_000
# Floor on the second-order term of the two-variable subproblem
ETA_FLOOR = 1e-12
STD_FLOOR = 1e-12
PREDICT_CHUNK = 4096


def extract_features(raster: CoherencyRaster) -> np.ndarray:
    """(height, width, 9) real features in FEATURE_NAMES order"""
    t = raster.data
    return np.stack([
        t[..., 0, 0].real, t[..., 1, 1].real, t[..., 2, 2].real,
        t[..., 0, 1].real, t[..., 0, 1].imag,
        t[..., 0, 2].real, t[..., 0, 2].imag,
        t[..., 1, 2].real, t[..., 1, 2].imag,
    ], axis=-1)


def features_to_matrix(f) -> HermitianMatrix3:
    return HermitianMatrix3.from_planes(list(np.asarray(f, dtype=np.float64)))


@dataclass(frozen=True, eq=False)
class ClassStatistics:
    count: int
    mean: np.ndarray
    std: np.ndarray


def class_statistics(features: np.ndarray, mask: LabelMask) -> Dict[int, ClassStatistics]:
    """Per-class pixel count and per-feature mean and standard deviation"""
    stats = {}
    for class_id in mask.class_ids():
        x = features[mask.labels == class_id]
        stats[class_id] = ClassStatistics(len(x), x.mean(axis=0), x.std(axis=0))
    return stats


@dataclass(frozen=True, eq=False)
class FeatureScaler:
    """Standardization to zero mean and unit variance from training statistics"""
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "FeatureScaler":
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        constant = std <= STD_FLOOR
        if np.any(constant):
            logger.warning(f"Constant feature(s) {np.flatnonzero(constant).tolist()} get unit scale")
        return cls(mean, np.where(constant, 1.0, std))

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.mean) / self.std


def kernel_matrix(k: Kernel, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gram matrix K[i, j] = k(x_i, y_j)"""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if x.shape[1] != y.shape[1]:
        raise ConfigError(f"feature dimensions differ: {x.shape[1]} vs {y.shape[1]}")
    if k.kind == KernelKind.RBF:
        return np.exp(-k.gamma * cdist(x, y, "sqeuclidean"))
    inner = x @ y.T + 1.0
    if k.kind == KernelKind.POLYNOMIAL:
        return inner ** k.degree
    return np.tanh(inner)


def kernel_eval(k: Kernel, x, y) -> float:
    return float(kernel_matrix(k, x, y)[0, 0])


def dual_objective(alpha: np.ndarray, y: np.ndarray, gram: np.ndarray) -> float:
    """sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij"""
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ gram @ ay)


def _violating_sets(alpha: np.ndarray, y: np.ndarray, cost: float) -> Tuple[np.ndarray, np.ndarray]:
    """Masks of points whose y*alpha may still increase (up) or decrease (low)"""
    ya = y * alpha
    upper = np.where(y > 0, cost, 0.0)
    lower = np.where(y > 0, 0.0, -cost)
    return ya < upper, ya > lower


def kkt_violation(alpha: np.ndarray, y: np.ndarray, gram: np.ndarray, cost: float) -> float:
    """Gap of the maximal violating pair; 0 at an exact optimum"""
    yg = y * (1.0 - y * (gram @ (alpha * y)))
    up, low = _violating_sets(alpha, y, cost)
    if not up.any() or not low.any():
        return 0.0
    return max(0.0, float(yg[up].max() - yg[low].min()))


def smo_solve(gram: np.ndarray, y: np.ndarray, cost: float, tol: float = DEFAULT_TOLERANCE,
              max_iter: int = DEFAULT_MAX_ITERATIONS) -> Tuple[np.ndarray, float, int]:
    """
    Solve the binary soft-margin dual with maximal-violating-pair SMO.

    Args:
        gram: kernel matrix of the training points
        y: labels in {-1, +1}
        cost: box constraint C
        tol: stop when the violating-pair gap is below tol
        max_iter: iteration budget

    Returns:
        (alpha, bias, iterations) with decision f(x) = sum alpha_i y_i k(x_i, x) + bias

    Raises:
        ConvergenceError: the budget ran out before the gap closed
    """
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    alpha = np.zeros(n)
    # gradient of the dual objective
    g = np.ones(n)
    diag = np.diag(gram)

    iterations = 0
    while True:
        yg = y * g
        up, low = _violating_sets(alpha, y, cost)
        if not up.any() or not low.any():
            break
        i = int(np.argmax(np.where(up, yg, -np.inf)))
        j = int(np.argmin(np.where(low, yg, np.inf)))
        gap = yg[i] - yg[j]
        if gap < tol:
            break
        if iterations >= max_iter:
            raise ConvergenceError(f"SMO did not converge in {max_iter} iterations (gap {gap:.3e})")

        eta = max(diag[i] + diag[j] - 2.0 * gram[i, j], ETA_FLOOR)
        room_i = (cost if y[i] > 0 else 0.0) - y[i] * alpha[i]
        room_j = y[j] * alpha[j] - (0.0 if y[j] > 0 else -cost)
        step = min(room_i, room_j, gap / eta)

        g += step * y * (gram[j] - gram[i])
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        # land exactly on the box when a bound was the binding limit
        if step == room_i:
            alpha[i] = cost if y[i] > 0 else 0.0
        if step == room_j:
            alpha[j] = 0.0 if y[j] > 0 else cost
        iterations += 1

    yg = y * g
    free = (alpha > 0.0) & (alpha < cost)
    if free.any():
        bias = float(yg[free].mean())
    else:
        up, low = _violating_sets(alpha, y, cost)
        top = yg[up].max() if up.any() else yg.min()
        bottom = yg[low].min() if low.any() else yg.max()
        bias = float(0.5 * (top + bottom))
    logger.debug(f"SMO converged after {iterations} iterations on {n} points")
    return alpha, bias, iterations


@dataclass(frozen=True, eq=False)
class BinaryMachine:
    """Machine for one class pair; positive decisions vote for positive_class"""
    positive_class: int
    negative_class: int
    support_vectors: np.ndarray
    labels: np.ndarray
    alphas: np.ndarray
    bias: float
    iterations: int = 0

    def decision(self, k: Kernel, x: np.ndarray) -> np.ndarray:
        return kernel_matrix(k, x, self.support_vectors) @ (self.alphas * self.labels) + self.bias


@dataclass(frozen=True, eq=False)
class SvmModel:
    kernel: Kernel
    cost: float
    scaler: FeatureScaler
    class_ids: Tuple[int, ...]
    machines: Tuple[BinaryMachine, ...]

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return [(m.positive_class, m.negative_class) for m in self.machines]


def _check_features(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DataError(f"expected an (N, d) feature matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DataError("feature matrix contains non-finite values")
    return x


def train_svm(features: np.ndarray, labels: np.ndarray, kernel: Optional[Kernel] = None,
              cost: float = DEFAULT_COST, tol: float = DEFAULT_TOLERANCE,
              max_iter: int = DEFAULT_MAX_ITERATIONS, scale: bool = True) -> SvmModel:
    """
    Train one SMO machine per class pair.

    Args:
        features: (N, d) training features
        labels: (N,) class ids
        kernel: kernel settings, RBF with gamma 0.444 by default
        cost: box constraint C
        tol: KKT tolerance of each binary problem
        max_iter: SMO iteration budget per pair
        scale: standardize features with training statistics

    Raises:
        MissingClassError: fewer than two classes
        DataError: non-finite features
        ConvergenceError: a pair exceeded the iteration budget
    """
    kernel = kernel or Kernel()
    if cost <= 0.0:
        raise ConfigError(f"cost must be positive, got {cost}")
    x = _check_features(features)
    labels = np.asarray(labels).astype(int)
    if len(labels) != len(x):
        raise ConfigError(f"{len(x)} feature rows but {len(labels)} labels")
    class_ids = tuple(int(c) for c in np.unique(labels))
    if len(class_ids) < 2:
        raise MissingClassError(f"SVM training needs at least two classes, got {list(class_ids)}")
    if kernel.kind == KernelKind.SIGMOID:
        logger.warning("Sigmoid kernel is not positive semi-definite; training is experimental")

    scaler = FeatureScaler.fit(x) if scale else FeatureScaler(np.zeros(x.shape[1]), np.ones(x.shape[1]))
    xs = scaler.transform(x)

    machines = []
    for a, b in combinations(class_ids, 2):
        pick = (labels == a) | (labels == b)
        xp = xs[pick]
        y = np.where(labels[pick] == a, 1.0, -1.0)
        alpha, bias, iterations = smo_solve(kernel_matrix(kernel, xp, xp), y, cost, tol, max_iter)
        sv = alpha > 0.0
        machines.append(BinaryMachine(a, b, xp[sv], y[sv], alpha[sv], bias, iterations))
        logger.info(f"SVM pair ({a}, {b}): {int(sv.sum())} support vectors, {iterations} SMO iterations")

    return SvmModel(kernel, float(cost), scaler, class_ids, tuple(machines))


def train_svm_raster(raster: CoherencyRaster, mask: LabelMask, kernel: Optional[Kernel] = None,
                     cost: float = DEFAULT_COST, tol: float = DEFAULT_TOLERANCE,
                     max_iter: int = DEFAULT_MAX_ITERATIONS) -> SvmModel:
    """train_svm on the labeled pixels of a raster"""
    check_dimensions(raster, mask)
    features = extract_features(raster)
    labeled = mask.labels != 0
    return train_svm(features[labeled], mask.labels[labeled], kernel, cost, tol, max_iter)


def decision_values(model: SvmModel, features: np.ndarray) -> np.ndarray:
    """(N, pairs) raw decision values on unscaled features"""
    x = model.scaler.transform(_check_features(features))
    out = np.empty((len(x), len(model.machines)))
    for start in range(0, len(x), PREDICT_CHUNK):
        chunk = x[start:start + PREDICT_CHUNK]
        for column, machine in enumerate(model.machines):
            out[start:start + PREDICT_CHUNK, column] = machine.decision(model.kernel, chunk)
    return out


def predict(model: SvmModel, features: np.ndarray) -> np.ndarray:
    """One-vs-one majority vote; vote ties go to the lowest class id"""
    values = decision_values(model, features)
    index = {c: i for i, c in enumerate(model.class_ids)}
    votes = np.zeros((len(values), len(model.class_ids)), dtype=np.int64)
    rows = np.arange(len(values))
    for column, (a, b) in enumerate(model.pairs):
        winner = np.where(values[:, column] > 0.0, index[a], index[b])
        np.add.at(votes, (rows, winner), 1)
    return np.asarray(model.class_ids)[np.argmax(votes, axis=1)]


def classify_svm(features: np.ndarray, model: SvmModel) -> ClassMap:
    """Classify a (height, width, d) feature grid"""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 3:
        raise DataError(f"expected a (height, width, d) feature grid, got shape {features.shape}")
    height, width, d = features.shape
    labels = predict(model, features.reshape(-1, d)).reshape(height, width)
    logger.info(f"Classified {width}x{height} grid with {len(model.machines)} SVM machine(s)")
    return ClassMap(labels)
