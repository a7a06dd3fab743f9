import numpy as np
from scipy.spatial.distance import cdist

from ..core.errors import ContractViolation
from . import PointCloud


def knn_indices(cloud: PointCloud, k: int) -> np.ndarray:
    """N x k neighbor table over the valid points, self excluded.

    Ties go to the lower index. Padding row i repeats the row of the valid
    point it copies (i mod valid_count).
    """
    m = cloud.valid_count
    if not 1 <= k < m:
        raise ContractViolation(f"k={k} needs 1 <= k < valid_count={m}")
    valid = cloud.valid
    d = cdist(valid, valid, "sqeuclidean")
    np.fill_diagonal(d, np.inf)
    table = np.argsort(d, axis=1, kind="stable")[:, :k]
    if len(cloud) > m:
        table = table[np.arange(len(cloud)) % m]
    return table
