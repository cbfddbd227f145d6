import numpy as np

from neuroedge.domain.errors import DimensionMismatch


def as_vector(values, length: int | None = None, name: str = "vector") -> np.ndarray:
    """Copy `values` into a 1-D float64 array, optionally checking its length."""
    vec = np.array(values, dtype=np.float64).reshape(-1)
    if length is not None and vec.shape[0] != length:
        raise DimensionMismatch(f"{name} has length {vec.shape[0]}, expected {length}")
    return vec


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    mat = np.array(values, dtype=np.float64)
    if mat.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {mat.shape}")
    return mat


def require_square(mat: np.ndarray, name: str = "matrix") -> int:
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {mat.shape}")
    return mat.shape[0]
