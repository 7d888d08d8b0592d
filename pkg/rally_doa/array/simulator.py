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

"""Narrowband far-field snapshot simulation."""

import numpy as np

from rally.common import cfg
from rally.common import logging

from rally_doa.array import geometry as geo
from rally_doa.array import imperfections
from rally_doa.common import opts  # noqa: F401
from rally_doa.common import utils
from rally_doa import exceptions

CONF = cfg.CONF
LOG = logging.getLogger(__name__)

UNIFORM = "uniform"
EQUIDISTANT = "equidistant"
DETERMINISTIC = "deterministic"
SWEEP = "sweep"
DOA_KINDS = (UNIFORM, EQUIDISTANT, DETERMINISTIC, SWEEP)

ULA_THETA_FOV = (-60.0, 60.0)
UCA_THETA_FOV = (-180.0, 180.0)
UCA_PHI_FOV = (0.0, 60.0)
FULL_TURN = 360.0


class FieldOfView(object):
    """Closed angular sector(s) a scenario draws its sources from."""

    def __init__(self, theta, phi=None):
        self.theta = (float(theta[0]), float(theta[1]))
        self.phi = None if phi is None else (float(phi[0]), float(phi[1]))
        for lo, hi in filter(None, (self.theta, self.phi)):
            if hi <= lo:
                raise exceptions.InvalidArgument(
                    "empty angular sector [%s, %s]" % (lo, hi))

    @classmethod
    def default(cls, geometry):
        if geometry.kind == geo.ULA:
            return cls(ULA_THETA_FOV)
        return cls(UCA_THETA_FOV, UCA_PHI_FOV)

    @property
    def dims(self):
        return 1 if self.phi is None else 2

    @property
    def circular(self):
        """Azimuth sector covers the full turn; -180 and 180 coincide."""
        return self.theta[1] - self.theta[0] >= FULL_TURN

    def contains(self, thetas, phis=None, tol=1e-9):
        thetas = np.asarray(thetas, dtype=np.float64)
        ok = np.all((thetas >= self.theta[0] - tol)
                    & (thetas <= self.theta[1] + tol))
        if self.phi is not None and phis is not None:
            phis = np.asarray(phis, dtype=np.float64)
            ok = ok and np.all((phis >= self.phi[0] - tol)
                               & (phis <= self.phi[1] + tol))
        return bool(ok)

    def to_dict(self):
        data = {"theta": list(self.theta)}
        if self.phi is not None:
            data["phi"] = list(self.phi)
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(data["theta"], data.get("phi"))

    def __repr__(self):
        if self.phi is None:
            return "theta%s" % (list(self.theta),)
        return "theta%s phi%s" % (list(self.theta), list(self.phi))


class DoaSpec(object):
    """How source directions are chosen for each record.

    :param kind: uniform, equidistant, deterministic or sweep
    :param min_sep: minimum pairwise azimuth separation for uniform, deg
    :param thetas: fixed azimuths for deterministic
    :param phis: fixed elevations for deterministic 2D scenarios
    :param interval: constant source interval for sweep, deg
    :param step: slide of the source group between sweep records, deg
    """

    def __init__(self, kind=UNIFORM, min_sep=None, thetas=None, phis=None,
                 interval=10.0, step=1.0):
        if kind not in DOA_KINDS:
            raise exceptions.InvalidArgument(
                "DOA spec must be one of %s, got %r" % (", ".join(DOA_KINDS),
                                                        kind))
        if kind == DETERMINISTIC and not thetas:
            raise exceptions.InvalidArgument(
                "deterministic DOA spec needs a list of angles")
        self.kind = kind
        self.min_sep = (CONF.doa.min_separation if min_sep is None
                        else float(min_sep))
        self.thetas = None if thetas is None else [float(t) for t in thetas]
        self.phis = None if phis is None else [float(p) for p in phis]
        self.interval = float(interval)
        self.step = float(step)

    @classmethod
    def uniform(cls, min_sep=None):
        return cls(UNIFORM, min_sep=min_sep)

    @classmethod
    def equidistant(cls):
        return cls(EQUIDISTANT)

    @classmethod
    def deterministic(cls, thetas, phis=None):
        return cls(DETERMINISTIC, thetas=thetas, phis=phis)

    @classmethod
    def sweep(cls, interval=10.0, step=1.0):
        return cls(SWEEP, interval=interval, step=step)

    def to_dict(self):
        data = {"kind": self.kind}
        if self.kind == UNIFORM:
            data["min_sep"] = self.min_sep
        elif self.kind == DETERMINISTIC:
            data["thetas"] = self.thetas
            if self.phis is not None:
                data["phis"] = self.phis
        elif self.kind == SWEEP:
            data.update(interval=self.interval, step=self.step)
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(data["kind"], min_sep=data.get("min_sep"),
                   thetas=data.get("thetas"), phis=data.get("phis"),
                   interval=data.get("interval", 10.0),
                   step=data.get("step", 1.0))


class DoaLabel(object):
    """True source directions in degrees; `phis` only for 2D scenarios."""

    def __init__(self, thetas, phis=None):
        self.thetas = np.asarray(thetas, dtype=np.float64)
        self.phis = None if phis is None else np.asarray(phis,
                                                         dtype=np.float64)
        if self.phis is not None and self.phis.shape != self.thetas.shape:
            raise exceptions.DimensionMismatch(
                "%d azimuths but %d elevations" % (self.thetas.size,
                                                   self.phis.size))

    @property
    def source_count(self):
        return self.thetas.size

    @property
    def dims(self):
        return 1 if self.phis is None else 2

    def as_array(self):
        """Label as a (dims, K) array: azimuths first, then elevations."""
        if self.phis is None:
            return self.thetas[None, :]
        return np.stack([self.thetas, self.phis])

    @classmethod
    def from_array(cls, array):
        array = np.asarray(array, dtype=np.float64)
        if array.shape[0] == 1:
            return cls(array[0])
        return cls(array[0], array[1])

    def __repr__(self):
        if self.phis is None:
            return "DoaLabel(theta=%s)" % np.round(self.thetas, 3).tolist()
        return "DoaLabel(theta=%s, phi=%s)" % (
            np.round(self.thetas, 3).tolist(),
            np.round(self.phis, 3).tolist())


class Scm(object):
    """Sample covariance matrix paired with its label."""

    def __init__(self, matrix, label, meta=None):
        self.matrix = np.asarray(matrix, dtype=np.complex128)
        self.label = label
        self.meta = meta or {}


class SignalScenario(object):
    """Everything needed to simulate one family of observations.

    :param geometry: ArrayGeometry
    :param source_count: number of sources K
    :param snr_db: per-source SNR in dB
    :param snapshots: number of snapshots T
    :param doa_spec: DoaSpec; uniform with the default separation if omitted
    :param fov: FieldOfView; geometry default if omitted
    :param name: scenario identifier carried into record metadata
    """

    def __init__(self, geometry, source_count, snr_db, snapshots,
                 doa_spec=None, fov=None, name=None):
        if int(source_count) < 1:
            raise exceptions.InvalidArgument(
                "source count must be positive, got %s" % source_count)
        if int(snapshots) < 1:
            raise exceptions.InvalidArgument(
                "snapshot count must be positive, got %s" % snapshots)
        self.geometry = geometry
        self.source_count = int(source_count)
        self.snr_db = float(snr_db)
        self.snapshots = int(snapshots)
        self.doa_spec = doa_spec or DoaSpec.uniform()
        self.fov = fov or FieldOfView.default(geometry)
        self.name = name or "custom"
        if self.fov.dims != geometry.label_dims:
            raise exceptions.InvalidArgument(
                "%s needs a %dD field of view" % (geometry.kind,
                                                  geometry.label_dims))
        if self.doa_spec.kind == DETERMINISTIC:
            self._check_deterministic()

    def _check_deterministic(self):
        spec = self.doa_spec
        if len(spec.thetas) != self.source_count:
            raise exceptions.DimensionMismatch(
                "%d deterministic angles for %d sources"
                % (len(spec.thetas), self.source_count))
        if self.fov.dims == 2 and (spec.phis is None
                                   or len(spec.phis) != self.source_count):
            raise exceptions.DimensionMismatch(
                "2D deterministic spec needs %d elevations"
                % self.source_count)
        if not self.fov.contains(spec.thetas, spec.phis):
            raise exceptions.InvalidLabel(
                label=spec.thetas if spec.phis is None
                else list(zip(spec.thetas, spec.phis)),
                fov=self.fov)

    @property
    def noise_variance(self):
        return noise_variance(self.snr_db)

    def replace(self, **kwargs):
        """Copy of the scenario with some fields overridden."""
        fields = {"geometry": self.geometry,
                  "source_count": self.source_count,
                  "snr_db": self.snr_db,
                  "snapshots": self.snapshots,
                  "doa_spec": self.doa_spec,
                  "fov": self.fov,
                  "name": self.name}
        fields.update(kwargs)
        return SignalScenario(**fields)

    def to_dict(self):
        return {"name": self.name,
                "geometry": self.geometry.to_dict(),
                "source_count": self.source_count,
                "snr_db": self.snr_db,
                "snapshots": self.snapshots,
                "doa_spec": self.doa_spec.to_dict(),
                "fov": self.fov.to_dict()}

    @classmethod
    def from_dict(cls, data):
        return cls(geo.ArrayGeometry.from_dict(data["geometry"]),
                   data["source_count"], data["snr_db"], data["snapshots"],
                   doa_spec=DoaSpec.from_dict(data["doa_spec"]),
                   fov=FieldOfView.from_dict(data["fov"]),
                   name=data.get("name"))


def noise_variance(snr_db):
    """sigma^2 for unit-power sources: SNR = 10*log10(1 / sigma^2)."""
    return 10.0 ** (-float(snr_db) / 10.0)


def _separated(thetas, min_sep, circular=False):
    if thetas.size < 2:
        return True
    ordered = np.sort(thetas)
    gaps = np.diff(ordered)
    if circular:
        gaps = np.append(gaps, FULL_TURN - (ordered[-1] - ordered[0]))
    return bool(np.min(gaps) >= min_sep)


def _equidistant(sector, count):
    lo, hi = sector
    if count == 1:
        return np.array([(lo + hi) / 2.0])
    return lo + (hi - lo) * np.arange(count) / (count - 1.0)


def sample_doas(spec, fov, count, min_sep=None, seed=None, rng=None,
                index=0):
    """Draw one label according to `spec`.

    :param spec: DoaSpec
    :param fov: FieldOfView
    :param count: number of sources K
    :param min_sep: overrides spec.min_sep for uniform sampling
    :param seed: seed of a fresh generator when `rng` is not given
    :param rng: numpy Generator to draw from
    :param index: record index, positions the group for sweep specs
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    lo, hi = fov.theta

    if spec.kind == DETERMINISTIC:
        thetas = np.asarray(spec.thetas, dtype=np.float64)
        phis = (None if fov.phi is None
                else np.asarray(spec.phis, dtype=np.float64))
        if thetas.size != count:
            raise exceptions.DimensionMismatch(
                "%d deterministic angles for %d sources"
                % (thetas.size, count))
        if not fov.contains(thetas, phis):
            raise exceptions.InvalidLabel(label=spec.thetas, fov=fov)
        return DoaLabel(thetas, phis)

    if spec.kind == EQUIDISTANT:
        thetas = _equidistant(fov.theta, count)
        phis = None if fov.phi is None else _equidistant(fov.phi, count)
        return DoaLabel(thetas, phis)

    if spec.kind == SWEEP:
        span = (count - 1) * spec.interval
        if span > hi - lo:
            raise exceptions.InfeasibleSpec(count=count,
                                            min_sep=spec.interval,
                                            fov=fov, attempts=0)
        positions = int(np.floor((hi - lo - span) / spec.step + 1e-9)) + 1
        start = lo + (index % positions) * spec.step
        thetas = start + spec.interval * np.arange(count)
        phis = (None if fov.phi is None
                else np.full(count, (fov.phi[0] + fov.phi[1]) / 2.0))
        return DoaLabel(thetas, phis)

    min_sep = spec.min_sep if min_sep is None else float(min_sep)
    attempts = CONF.doa.max_sampling_attempts
    needed = (count if fov.circular else count - 1) * min_sep
    if needed > min(hi - lo, FULL_TURN):
        raise exceptions.InfeasibleSpec(count=count, min_sep=min_sep,
                                        fov=fov, attempts=0)
    for _ in range(attempts):
        thetas = rng.uniform(lo, hi, count)
        phis = (None if fov.phi is None
                else rng.uniform(fov.phi[0], fov.phi[1], count))
        if _separated(thetas, min_sep, fov.circular):
            order = np.argsort(thetas, kind="stable")
            return DoaLabel(thetas[order],
                            None if phis is None else phis[order])
    raise exceptions.InfeasibleSpec(count=count, min_sep=min_sep, fov=fov,
                                    attempts=attempts)


def sample_covariance(snapshots):
    """(1/T) * sum_t y(t) y(t)^H, made exactly Hermitian."""
    snapshots = np.asarray(snapshots, dtype=np.complex128)
    if snapshots.ndim != 2 or snapshots.shape[1] < 1:
        raise exceptions.DimensionMismatch(
            "snapshot matrix must be M x T with T >= 1, got shape %s"
            % (snapshots.shape,))
    scm = snapshots.dot(snapshots.conj().T) / snapshots.shape[1]
    return 0.5 * (scm + scm.conj().T)


def simulate_snapshots(scenario, imp, seed, label=None, index=0):
    """Simulate Y = A(theta, e) S + N for one record.

    DOAs and signals come from two independent streams derived from
    `seed`, so passing a known `label` (the ideal-data generator path)
    reproduces the very same source and noise samples.

    :returns: (Y, DoaLabel)
    """
    doa_rng, signal_rng = utils.spawn_generators(seed, 2)
    if label is None:
        label = sample_doas(scenario.doa_spec, scenario.fov,
                            scenario.source_count, rng=doa_rng, index=index)
    else:
        if label.source_count != scenario.source_count:
            raise exceptions.DimensionMismatch(
                "label has %d sources, scenario expects %d"
                % (label.source_count, scenario.source_count))
        if not scenario.fov.contains(label.thetas, label.phis):
            raise exceptions.InvalidLabel(label=label, fov=scenario.fov)

    a = imperfections.perturbed_manifold(scenario.geometry, imp,
                                         label.thetas, label.phis)
    k, t = scenario.source_count, scenario.snapshots
    m = scenario.geometry.element_count
    s = signal_rng.standard_normal((2, k, t))
    signals = (s[0] + 1j * s[1]) / np.sqrt(2.0)
    n = signal_rng.standard_normal((2, m, t))
    noise = np.sqrt(scenario.noise_variance / 2.0) * (n[0] + 1j * n[1])
    return a.dot(signals) + noise, label


def asymptotic_covariance(geometry, label, snr_db, imp=None):
    """A A^H + sigma^2 I for unit-power sources."""
    a = imperfections.perturbed_manifold(geometry, imp, label.thetas,
                                         label.phis)
    return (a.dot(a.conj().T)
            + noise_variance(snr_db) * np.eye(geometry.element_count))

