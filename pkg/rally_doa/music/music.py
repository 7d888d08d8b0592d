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

"""MUSIC pseudo-spectrum estimation on angle grids."""

import numpy as np

from rally.common import cfg
from rally.common import logging

from rally_doa.array import geometry as geo
from rally_doa.common import opts  # noqa: F401
from rally_doa.music import eig
from rally_doa import exceptions

CONF = cfg.CONF
LOG = logging.getLogger(__name__)

SPECTRUM_FLOOR = 1e-300


def angle_grid(sector, step, wrap=False):
    """Inclusive grid over `sector`; with `wrap` the upper end is dropped
    because it duplicates the lower one.
    """
    lo, hi = sector
    if step <= 0:
        raise exceptions.InvalidArgument(
            "grid step must be positive, got %s" % step)
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    grid = lo + step * np.arange(count)
    if wrap and count > 1 and abs(grid[-1] - lo - 360.0) < 1e-9:
        grid = grid[:-1]
    return grid


def is_full_circle(sector):
    return abs(sector[1] - sector[0] - 360.0) < 1e-9


class MusicConfig(object):
    """Grid resolution and source count of a MUSIC estimator."""

    def __init__(self, source_count, fov, grid_step=None, grid_step_theta=None,
                 grid_step_phi=None):
        self.source_count = int(source_count)
        self.fov = fov
        self.grid_step = float(CONF.doa.music_grid_step if grid_step is None
                               else grid_step)
        self.grid_step_theta = float(CONF.doa.music_grid_step_theta
                                     if grid_step_theta is None
                                     else grid_step_theta)
        self.grid_step_phi = float(CONF.doa.music_grid_step_phi
                                   if grid_step_phi is None
                                   else grid_step_phi)
        for step in (self.grid_step, self.grid_step_theta,
                     self.grid_step_phi):
            if step <= 0:
                raise exceptions.InvalidArgument(
                    "grid steps must be positive, got %s" % step)

    def to_dict(self):
        return {"source_count": self.source_count,
                "fov": self.fov.to_dict(),
                "grid_step": self.grid_step,
                "grid_step_theta": self.grid_step_theta,
                "grid_step_phi": self.grid_step_phi}


def noise_subspace(scm, source_count):
    """Eigenvectors of the M - K smallest eigenvalues, (M, M - K)."""
    scm = np.asarray(scm, dtype=np.complex128)
    m = scm.shape[0]
    if source_count < 1:
        raise exceptions.InvalidArgument(
            "MUSIC needs at least one source, got %d" % source_count)
    if source_count >= m:
        raise exceptions.DegreesOfFreedom(sources=source_count, elements=m)
    _, vectors = eig.hermitian_eig(scm)
    return vectors[:, :m - source_count]


def _pseudo_spectrum(noise, steering):
    projection = noise.conj().T.dot(steering)
    denominator = np.sum(np.abs(projection) ** 2, axis=0)
    return 1.0 / np.maximum(denominator, SPECTRUM_FLOOR)


def music_spectrum_1d(scm, geometry, source_count, grid):
    """P(theta) = 1 / ||U_n^H a(theta)||^2 over an azimuth grid."""
    if geometry.kind != geo.ULA:
        raise exceptions.InvalidGeometry(operation="music_spectrum_1d",
                                         expected=geo.ULA,
                                         actual=geometry.kind)
    noise = noise_subspace(scm, source_count)
    return _pseudo_spectrum(noise, geo.manifold(geometry, grid))


def _vertex_offset(left, centre, right):
    """Sub-sample vertex of the parabola through three reciprocal values."""
    y_left, y_centre, y_right = 1.0 / left, 1.0 / centre, 1.0 / right
    curvature = y_left - 2.0 * y_centre + y_right
    if curvature == 0.0:
        return 0.0
    return float(np.clip(0.5 * (y_left - y_right) / curvature, -0.5, 0.5))


def music_peaks(spectrum, source_count, grid=None):
    """Up to K highest interior local maxima, refined below the grid step.

    :param spectrum: samples on a uniform grid
    :param source_count: number of peaks wanted
    :param grid: grid angles; peak positions are fractional sample
        indices when omitted
    :returns: (angles ascending, miss flag)
    """
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if spectrum.size == 0:
        raise exceptions.EmptyInput(message="empty MUSIC spectrum")
    inner = spectrum[1:-1]
    peaks = np.where((inner > spectrum[:-2]) & (inner > spectrum[2:]))[0] + 1
    peaks = peaks[np.argsort(-spectrum[peaks], kind="stable")][:source_count]
    positions = []
    for i in peaks:
        offset = _vertex_offset(spectrum[i - 1], spectrum[i],
                                spectrum[i + 1])
        if grid is None:
            positions.append(i + offset)
        else:
            step = grid[i + 1] - grid[i]
            positions.append(grid[i] + offset * step)
    miss = len(positions) < source_count
    if miss:
        LOG.debug("MUSIC found %d of %d peaks" % (len(positions),
                                                 source_count))
    return np.sort(np.asarray(positions, dtype=np.float64)), miss


def music_spectrum_2d(scm, geometry, source_count, grid_theta, grid_phi):
    """Pseudo-spectrum over the (theta, phi) grid, shape (Gt, Gp)."""
    if geometry.kind != geo.UCA:
        raise exceptions.InvalidGeometry(operation="music_2d",
                                         expected=geo.UCA,
                                         actual=geometry.kind)
    noise = noise_subspace(scm, source_count)
    thetas, phis = np.meshgrid(grid_theta, grid_phi, indexing="ij")
    steering = geo.manifold(geometry, thetas.reshape(-1), phis.reshape(-1))
    return _pseudo_spectrum(noise, steering).reshape(thetas.shape)


def _local_maxima_2d(spectrum, wrap_theta):
    """Cells strictly above all eight neighbours; the azimuth axis wraps
    when `wrap_theta`, missing neighbours elsewhere are ignored.
    """
    if wrap_theta:
        padded = np.concatenate([spectrum[-1:], spectrum, spectrum[:1]])
    else:
        edge = np.full((1, spectrum.shape[1]), -np.inf)
        padded = np.concatenate([edge, spectrum, edge])
    column = np.full((padded.shape[0], 1), -np.inf)
    padded = np.concatenate([column, padded, column], axis=1)
    centre = padded[1:-1, 1:-1]
    mask = np.ones(spectrum.shape, dtype=bool)
    rows, cols = spectrum.shape
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            neighbour = padded[1 + di:1 + di + rows, 1 + dj:1 + dj + cols]
            mask &= centre > neighbour
    return np.argwhere(mask)


def music_2d(scm, geometry, source_count, grid_theta, grid_phi,
             wrap_theta=None):
    """Joint azimuth/elevation MUSIC.

    :returns: (thetas, phis, miss) with at most K entries
    """
    grid_theta = np.asarray(grid_theta, dtype=np.float64)
    grid_phi = np.asarray(grid_phi, dtype=np.float64)
    if wrap_theta is None:
        wrap_theta = (grid_theta.size > 1 and abs(
            grid_theta[-1] + (grid_theta[1] - grid_theta[0])
            - grid_theta[0] - 360.0) < 1e-9)
    spectrum = music_spectrum_2d(scm, geometry, source_count, grid_theta,
                                 grid_phi)
    cells = _local_maxima_2d(spectrum, wrap_theta)
    heights = spectrum[cells[:, 0], cells[:, 1]]
    cells = cells[np.argsort(-heights, kind="stable")][:source_count]

    n_theta, n_phi = spectrum.shape
    thetas, phis = [], []
    for i, j in cells:
        theta = grid_theta[i]
        if n_theta > 1 and (wrap_theta or 0 < i < n_theta - 1):
            step = grid_theta[1] - grid_theta[0]
            theta += step * _vertex_offset(spectrum[(i - 1) % n_theta, j],
                                           spectrum[i, j],
                                           spectrum[(i + 1) % n_theta, j])
        phi = grid_phi[j]
        if 0 < j < n_phi - 1:
            step = grid_phi[1] - grid_phi[0]
            phi += step * _vertex_offset(spectrum[i, j - 1], spectrum[i, j],
                                         spectrum[i, j + 1])
        thetas.append(theta)
        phis.append(phi)
    miss = len(thetas) < source_count
    order = np.argsort(thetas, kind="stable")
    return (np.asarray(thetas)[order], np.asarray(phis)[order], miss)


class MusicEstimator(object):
    """MUSIC bound to a geometry and its grids."""

    def __init__(self, geometry, config):
        self.geometry = geometry
        self.config = config
        fov = config.fov
        if fov.dims != geometry.label_dims:
            raise exceptions.InvalidArgument(
                "%s MUSIC needs a %dD field of view" % (geometry.kind,
                                                        geometry.label_dims))
        if geometry.kind == geo.ULA:
            self.grid = angle_grid(fov.theta, config.grid_step)
        else:
            wrap = is_full_circle(fov.theta)
            self.grid_theta = angle_grid(fov.theta, config.grid_step_theta,
                                         wrap=wrap)
            self.grid_phi = angle_grid(fov.phi, config.grid_step_phi)
            self.wrap = wrap

    @classmethod
    def for_scenario(cls, scenario, **grid_steps):
        return cls(scenario.geometry,
                   MusicConfig(scenario.source_count, scenario.fov,
                               **grid_steps))

    def estimate(self, scm):
        """(estimates (dims, k <= K), miss flag) for one SCM."""
        k = self.config.source_count
        if self.geometry.kind == geo.ULA:
            spectrum = music_spectrum_1d(scm, self.geometry, k, self.grid)
            thetas, miss = music_peaks(spectrum, k, self.grid)
            return thetas[None, :], miss
        thetas, phis, miss = music_2d(scm, self.geometry, k,
                                      self.grid_theta, self.grid_phi,
                                      wrap_theta=self.wrap)
        return np.stack([thetas, phis]), miss