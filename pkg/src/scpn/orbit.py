"""Walker Delta constellation geometry and solar illumination in the ECI frame.

Circular orbits only: a satellite is fully described by its altitude,
inclination, RAAN and initial argument of latitude. The sun is a fixed unit
vector (solar motion over a few orbital periods is negligible), and the
Earth's shadow is a pure cylinder behind the terminator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_M = 6_371_000.0
MU_EARTH_M3_S2 = 3.986004418e14

_TWO_PI = 2.0 * math.pi


def _wrap(angle_rad: float) -> float:
    """Normalize an angle to [0, 2*pi)."""
    return angle_rad % _TWO_PI


@dataclass(frozen=True)
class EciVector:
    """Position (or direction) in the Earth-Centered Inertial frame, meters."""

    x: float
    y: float
    z: float

    def dot(self, other: "EciVector") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


@dataclass(frozen=True)
class SunModel:
    """Fixed sun direction, constant over the simulation horizon."""

    direction: EciVector

    def __post_init__(self) -> None:
        n = self.direction.norm()
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"sun direction must be a unit vector, got norm {n!r}")

    @classmethod
    def from_vector(cls, x: float, y: float, z: float) -> "SunModel":
        """Build from an arbitrary non-zero vector, normalizing it."""
        n = math.sqrt(x * x + y * y + z * z)
        if n == 0.0:
            raise ValueError("sun direction must be non-zero")
        return cls(EciVector(x / n, y / n, z / n))


@dataclass(frozen=True)
class OrbitParams:
    """Circular-orbit elements of a single satellite.

    Angles are stored normalized to [0, 2*pi); inclination must lie in [0, pi].
    """

    altitude_m: float
    inclination_rad: float
    raan_rad: float
    arg_latitude0_rad: float
    earth_radius_m: float = EARTH_RADIUS_M
    mu_m3s2: float = MU_EARTH_M3_S2

    def __post_init__(self) -> None:
        if self.altitude_m <= 0.0:
            raise ValueError(f"altitude must be positive, got {self.altitude_m}")
        if not 0.0 <= self.inclination_rad <= math.pi:
            raise ValueError(f"inclination must lie in [0, pi], got {self.inclination_rad}")
        object.__setattr__(self, "raan_rad", _wrap(self.raan_rad))
        object.__setattr__(self, "arg_latitude0_rad", _wrap(self.arg_latitude0_rad))

    @property
    def semi_major_axis_m(self) -> float:
        return self.earth_radius_m + self.altitude_m

    @property
    def mean_motion_rad_s(self) -> float:
        a = self.semi_major_axis_m
        return math.sqrt(self.mu_m3s2 / (a * a * a))

    @property
    def period_s(self) -> float:
        return _TWO_PI / self.mean_motion_rad_s

    def plane_basis(self) -> tuple[EciVector, EciVector]:
        """Orthonormal in-plane basis (p, q): position = a*(cos(u)*p + sin(u)*q)."""
        cos_o, sin_o = math.cos(self.raan_rad), math.sin(self.raan_rad)
        cos_i, sin_i = math.cos(self.inclination_rad), math.sin(self.inclination_rad)
        p = EciVector(cos_o, sin_o, 0.0)
        q = EciVector(-sin_o * cos_i, cos_o * cos_i, sin_i)
        return p, q


@dataclass(frozen=True)
class WalkerConfig:
    """Walker Delta pattern: evenly spaced planes with inter-plane phasing."""

    planes: int
    sats_per_plane: int
    phasing: int
    altitude_m: float
    inclination_rad: float

    def __post_init__(self) -> None:
        if self.planes <= 0 or self.sats_per_plane <= 0:
            raise ValueError("planes and sats_per_plane must be positive")
        if not 0 <= self.phasing < self.planes:
            raise ValueError(
                f"phasing must lie in [0, planes), got {self.phasing} with {self.planes} planes"
            )

    @property
    def total(self) -> int:
        return self.planes * self.sats_per_plane


def walker_init(cfg: WalkerConfig) -> list[OrbitParams]:
    """Instantiate orbital elements for every satellite of a Walker Delta pattern.

    Satellites are indexed row-major by (plane, slot). Plane i gets RAAN
    i*2*pi/P; slot j in plane i starts at argument of latitude
    (j/S + i*F/N)*2*pi.
    """
    out: list[OrbitParams] = []
    n_total = cfg.total
    for plane in range(cfg.planes):
        raan = plane * _TWO_PI / cfg.planes
        for slot in range(cfg.sats_per_plane):
            u0 = (slot / cfg.sats_per_plane + plane * cfg.phasing / n_total) * _TWO_PI
            out.append(
                OrbitParams(
                    altitude_m=cfg.altitude_m,
                    inclination_rad=cfg.inclination_rad,
                    raan_rad=raan,
                    arg_latitude0_rad=u0,
                )
            )
    return out


def propagate(params: OrbitParams, t_s: float) -> EciVector:
    """ECI position of a circular orbit at time t_s since epoch."""
    a = params.semi_major_axis_m
    u = params.arg_latitude0_rad + params.mean_motion_rad_s * t_s
    cos_u, sin_u = math.cos(u), math.sin(u)
    p, q = params.plane_basis()
    return EciVector(
        a * (cos_u * p.x + sin_u * q.x),
        a * (cos_u * p.y + sin_u * q.y),
        a * (cos_u * p.z + sin_u * q.z),
    )


def eclipse_indicator(
    pos: EciVector, sun: SunModel, earth_radius_m: float = EARTH_RADIUS_M
) -> int:
    """1 when sunlit, 0 inside the Earth's cylindrical shadow.

    Shadow requires the satellite on the night side (dot product with the sun
    direction strictly negative) and within one Earth radius of the shadow
    axis. Both inequalities are strict, so the terminator counts as sunlit.
    """
    d = pos.dot(sun.direction)
    if d < 0.0:
        r2 = pos.dot(pos)
        if r2 - d * d < earth_radius_m * earth_radius_m:
            return 0
    return 1


def cosine_factor(pos: EciVector, sun: SunModel, a_m: float) -> float:
    """Incidence cosine for a nadir-mounted panel whose normal points radially out.

    Zero whenever the sun is behind the local horizontal plane, so a satellite
    in shadow also has zero cosine factor.
    """
    return max(0.0, pos.dot(sun.direction) / a_m)


def sun_projection(params: OrbitParams, sun: SunModel) -> tuple[float, float]:
    """Coefficients (alpha, beta) of the incidence cosine along the orbit.

    With (p, q) the orbit-plane basis, position(t).sun / a reduces to
    alpha*cos(u(t)) + beta*sin(u(t)); both coefficients are constants of the
    orbit, which lets hot loops avoid rebuilding full position vectors.
    """
    p, q = params.plane_basis()
    return p.dot(sun.direction), q.dot(sun.direction)


def eclipse_fraction(params: OrbitParams, sun: SunModel, dt_s: float = 1.0) -> float:
    """Fraction of one orbital period spent in shadow, sampled at dt_s steps."""
    period = params.period_s
    n_samples = max(1, math.ceil(period / dt_s))
    shadowed = 0
    for k in range(n_samples):
        pos = propagate(params, k * dt_s)
        if eclipse_indicator(pos, sun, params.earth_radius_m) == 0:
            shadowed += 1
    return shadowed / n_samples
