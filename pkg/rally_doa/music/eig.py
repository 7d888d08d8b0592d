# All Rights Reserved.
#
#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

"""Hermitian eigendecomposition by cyclic complex Jacobi rotations."""

import numpy as np

from rally.common import logging

from rally_doa import exceptions

LOG = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-8
MAX_SWEEPS = 100


def check_hermitian(matrix, tolerance=HERMITIAN_TOLERANCE):
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise exceptions.DimensionMismatch(
            "eigendecomposition needs a square matrix, got shape %s"
            % (matrix.shape,))
    if not np.all(np.isfinite(matrix)):
        raise exceptions.NumericFailure(operation="hermitian_eig")
    residual = np.abs(matrix - matrix.conj().T).max() if matrix.size else 0.0
    if residual > tolerance * max(1.0, np.abs(matrix).max()):
        raise exceptions.NotHermitian(residual=residual)
    return matrix


def _rotation(a, p, q):
    """2x2 unitary block zeroing a[p, q]."""
    apq = a[p, q]
    magnitude = abs(apq)
    phase = np.conj(apq) / magnitude
    tau = (a[q, q].real - a[p, p].real) / (2.0 * magnitude)
    if tau == 0.0:
        t = 1.0
    else:
        t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    return np.array([[c, s], [-s * phase, c * phase]])


def hermitian_eig(matrix, tolerance=1e-14):
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns).

    Sweeps every off-diagonal pair until the off-diagonal Frobenius norm
    drops below `tolerance` times the matrix norm.
    """
    a = check_hermitian(matrix).copy()
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    if n < 2 or scale == 0.0:
        values = a.diagonal().real.copy()
        order = np.argsort(values, kind="stable")
        return values[order], v[:, order]

    for sweep in range(MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        if off <= tolerance * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) <= 1e-300:
                    continue
                block = _rotation(a, p, q)
                idx = [p, q]
                a[:, idx] = a[:, idx].dot(block)
                a[idx, :] = block.conj().T.dot(a[idx, :])
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx].dot(block)
    else:
        LOG.warning("Jacobi iteration stopped after %d sweeps" % MAX_SWEEPS)

    values = a.diagonal().real.copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]
