"""Eigenvalue versus conformal-volume inequality and the covolume bound chain.

For a compact Riemannian orbifold of dimension m and a piecewise-conformal
map into S^n,

    lambda_1 * Vol^(2/m) <= m * V_c^(2/m).

``li_yau_slack`` evaluates the right side minus the left side. The chain in
``volume_bound_chain`` feeds in lambda_1 >= 3/4 and V_c <= 4 * Vol(S^3)
in dimension 3 and solves for the largest admissible volume, 64 pi^2.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .mesh import build_icosphere, laplace_spectrum, mesh_area

__all__ = [
    "VIGNERAS_LAMBDA",
    "RAMANUJAN_LAMBDA",
    "VOL_S2",
    "VOL_S3",
    "INDEX_BOUND",
    "VOLUME_BOUND",
    "InequalityCheck",
    "BoundChain",
    "sphere_volume",
    "li_yau_slack",
    "volume_bound_chain",
    "verify_sphere_saturation",
    "spectral_record",
]

VIGNERAS_LAMBDA = 0.75  # lambda_1 lower bound for congruence arithmetic 3-orbifolds
RAMANUJAN_LAMBDA = 1.0  # conjectured improvement
VOL_S2 = 4 * math.pi
VOL_S3 = 2 * math.pi**2
INDEX_BOUND = 4  # finite subgroups of O(3) sit in reflection groups with index <= 4
VOLUME_BOUND = 64 * math.pi**2


def sphere_volume(m: int) -> float:
    """Volume of the unit round m-sphere."""
    return 2 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


@dataclass(frozen=True)
class InequalityCheck:
    lambda1: float
    vol: float
    dim_m: int
    conf_vol: float
    slack: float

    @property
    def holds(self) -> bool:
        return self.slack >= 0

    def holds_within(self, tol: float) -> bool:
        return self.slack >= -tol


@dataclass(frozen=True)
class BoundChain:
    lambda_min: float
    vc_sphere3: float
    index_bound: int
    vc_bound: float
    vol_bound: float
    dim: int = 3


def li_yau_slack(lambda1: float, vol: float, m: int, conf_vol: float) -> InequalityCheck:
    """Slack ``m * V_c^(2/m) - lambda1 * Vol^(2/m)``; nonnegative when the bound holds."""
    if lambda1 < 0:
        raise ValueError(f"lambda1 must be >= 0, got {lambda1}")
    if vol <= 0 or conf_vol <= 0:
        raise ValueError("vol and conf_vol must be positive")
    if int(m) != m or m < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {m}")
    m = int(m)
    slack = m * conf_vol ** (2 / m) - lambda1 * vol ** (2 / m)
    return InequalityCheck(float(lambda1), float(vol), m, float(conf_vol), float(slack))


def volume_bound_chain(
    lambda_min: float = VIGNERAS_LAMBDA,
    vc_sphere3: float = VOL_S3,
    index_bound: int = INDEX_BOUND,
) -> BoundChain:
    """Largest volume allowed by lambda_min * Vol^(2/3) <= 3 * (index * V_c(S^3))^(2/3)."""
    if lambda_min <= 0 or vc_sphere3 <= 0:
        raise ValueError("lambda_min and vc_sphere3 must be positive")
    if int(index_bound) != index_bound or index_bound < 1:
        raise ValueError(f"index_bound must be an integer >= 1, got {index_bound}")
    vc_bound = index_bound * vc_sphere3
    vol_bound = (3 * vc_bound ** (2 / 3) / lambda_min) ** 1.5
    return BoundChain(float(lambda_min), float(vc_sphere3), int(index_bound), vc_bound, vol_bound)


def verify_sphere_saturation(
    depth: int = 5, tol: float = 1e-10, conf_vol: float = VOL_S2, k: int = 5
) -> InequalityCheck:
    """Discrete round-sphere check of the m = 2 inequality.

    The continuum slack is exactly zero, so the discrete slack measures
    discretization error only. Callers compare it against their tolerance
    with ``check.holds_within``.
    """
    mesh = build_icosphere(depth)
    spectrum = laplace_spectrum(mesh, k=k, tol=tol)
    return li_yau_slack(spectrum.lambda1, mesh_area(mesh), 2, conf_vol)


def spectral_record(depth, n_vertices, spectrum, check) -> dict:
    """JSON record ``{depth, n_vertices, area, eigenvalues, lambda1, multiplicity1, slack}``."""
    return {
        "depth": depth,
        "n_vertices": n_vertices,
        "area": spectrum.area,
        "eigenvalues": list(spectrum.eigenvalues),
        "lambda1": spectrum.lambda1,
        "multiplicity1": spectrum.multiplicity1,
        "slack": check.slack,
    }


def chain_record(chain: BoundChain) -> dict:
    return asdict(chain)
