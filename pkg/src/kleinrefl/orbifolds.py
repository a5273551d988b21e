"""Spherical 2-orbifolds in Conway notation and their reflection supergroups.

Every finite subgroup G < O(3) is the orbifold fundamental group of S^2/G.
The quotients are listed below by symbol; for each one we produce a group
G' >= G generated by reflections with [G':G] in {1, 2, 4}.

    ()        trivial group          (*)        single mirror
    pp        cyclic C_p             *pp        C_pv
    pqr       rotation groups        *pqr       full reflection groups
    p*        C_ph                   2*m        D_md
    3*2       T_h                    nx         S_2n (1x is RP^2)

Symbols are written with single digits, multi-digit orders wrapped in
parentheses: ``"*235"``, ``"(12)(12)"``, ``"2*(10)"``, ``"3x"``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

__all__ = [
    "SignatureError",
    "NotSphericalError",
    "SphericalSignature",
    "OrbifoldGroupInfo",
    "SupergroupResult",
    "parse_signature",
    "format_signature",
    "euler_characteristic",
    "group_order",
    "reflection_supergroup",
    "verify_cover",
    "enumerate_signatures",
    "same_orbifold",
]


class SignatureError(ValueError):
    """Malformed orbifold symbol."""


class NotSphericalError(SignatureError):
    """Well-formed symbol that is not one of the spherical 2-orbifolds."""


_ORDER = r"(?:\d|\(\d+\))"
_SYMBOL_RE = re.compile(rf"^(?P<cones>{_ORDER}*)(?P<star>\*?)(?P<corners>{_ORDER}*)(?P<cross>x?)$")


@dataclass(frozen=True)
class SphericalSignature:
    cone_orders: tuple[int, ...] = ()
    mirror: bool = False
    corner_orders: tuple[int, ...] = ()
    crosscap: bool = False

    def __post_init__(self):
        object.__setattr__(self, "cone_orders", tuple(int(p) for p in self.cone_orders))
        object.__setattr__(self, "corner_orders", tuple(int(q) for q in self.corner_orders))
        _validate(self)

    def __str__(self):
        return format_signature(self)

    @property
    def is_reflection_group(self) -> bool:
        return self.mirror and not self.cone_orders and not self.crosscap

    def case(self) -> str:
        """Name of the family this signature belongs to, e.g. ``"*pqr"``."""
        return _classify(self)


@dataclass(frozen=True)
class OrbifoldGroupInfo:
    order: int
    chi: Fraction
    reflection_generated: bool


@dataclass(frozen=True)
class SupergroupResult:
    supergroup: SphericalSignature
    index: int
    # (signature, degree of the cover onto it from the previous stage)
    chain: tuple[tuple[SphericalSignature, int], ...] = field(default=())


def _fmt_order(p: int) -> str:
    return str(p) if p < 10 else f"({p})"


def format_signature(sig: SphericalSignature) -> str:
    cones = "".join(_fmt_order(p) for p in sig.cone_orders)
    corners = "".join(_fmt_order(q) for q in sig.corner_orders)
    return cones + ("*" if sig.mirror else "") + corners + ("x" if sig.crosscap else "")


def parse_signature(text: str) -> SphericalSignature:
    """Parse a Conway symbol such as ``"*235"`` or ``"3x"``.

    Raises SignatureError for malformed text and NotSphericalError for a
    well-formed symbol outside the spherical list (``"*236"``, ``"237"``).
    """
    s = "".join(text.split()).replace("×", "x")
    m = _SYMBOL_RE.match(s)
    if m is None:
        raise SignatureError(f"cannot parse orbifold symbol {text!r}")
    cones = tuple(int(t.strip("()")) for t in re.findall(_ORDER, m["cones"]))
    corners = tuple(int(t.strip("()")) for t in re.findall(_ORDER, m["corners"]))
    crosscap = bool(m["cross"])
    if crosscap and not cones:
        cones = (1,)  # bare "x" is RP^2
    return SphericalSignature(cones, bool(m["star"]), corners, crosscap)


def _chi(cones, mirror, corners, crosscap) -> Fraction:
    chi = Fraction(1 if (mirror or crosscap) else 2)
    chi -= sum((1 - Fraction(1, p) for p in cones), Fraction(0))
    chi -= sum((1 - Fraction(1, q) for q in corners), Fraction(0)) / 2
    return chi


def euler_characteristic(sig: SphericalSignature) -> Fraction:
    """Orbifold Euler characteristic, exact."""
    return _chi(sig.cone_orders, sig.mirror, sig.corner_orders, sig.crosscap)


def _classify(sig: SphericalSignature) -> str | None:
    cones, corners = sig.cone_orders, sig.corner_orders
    if sig.crosscap:
        if sig.mirror or corners or len(cones) != 1:
            return None
        return "nx"
    if not sig.mirror:
        if corners:
            return None
        if not cones:
            return "()"
        if len(cones) == 2 and cones[0] == cones[1]:
            return "pp"
        if len(cones) == 3 and sum(Fraction(1, p) for p in cones) > 1:
            return "pqr"
        return None
    if not cones:
        if not corners:
            return "*"
        if len(corners) == 2 and corners[0] == corners[1]:
            return "*pp"
        if len(corners) == 3 and sum(Fraction(1, q) for q in corners) > 1:
            return "*pqr"
        return None
    if len(cones) != 1:
        return None
    if not corners:
        return "p*"
    if len(corners) == 1:
        if cones[0] == 2:
            return "2*m"
        if cones == (3,) and corners == (2,):
            return "3*2"
    return None


def _validate(sig: SphericalSignature) -> None:
    if sig.corner_orders and not sig.mirror:
        raise SignatureError("corner orders require a mirror")
    if sig.crosscap and sig.mirror:
        raise SignatureError("crosscap and mirror cannot be combined")
    if sig.crosscap:
        if len(sig.cone_orders) != 1 or sig.cone_orders[0] < 1:
            raise SignatureError("crosscap signature needs exactly one order n >= 1")
    elif any(p < 2 for p in sig.cone_orders):
        raise SignatureError("cone orders must be >= 2")
    if any(q < 2 for q in sig.corner_orders):
        raise SignatureError("corner orders must be >= 2")

    chi = euler_characteristic(sig)
    if chi <= 0:
        raise NotSphericalError(f"{format_signature(sig)!r} has chi = {chi}, not spherical")
    if _classify(sig) is None:
        raise NotSphericalError(f"{format_signature(sig)!r} is not a spherical orbifold (bad or unlisted)")


def group_order(sig: SphericalSignature) -> OrbifoldGroupInfo:
    chi = euler_characteristic(sig)
    order = 2 / chi
    if order.denominator != 1:
        raise ArithmeticError(f"2/chi = {order} is not an integer for {format_signature(sig)!r}")
    return OrbifoldGroupInfo(int(order), chi, sig.is_reflection_group)


def reflection_supergroup(sig: SphericalSignature) -> SupergroupResult:
    """Reflection group containing the orbifold group with index at most 4."""
    case = sig.case()
    cones, corners = sig.cone_orders, sig.corner_orders

    def mirror(*qs):
        return SphericalSignature(mirror=True, corner_orders=qs)

    if case in ("*", "*pp", "*pqr"):
        return SupergroupResult(sig, 1, ())
    if case == "()":
        target = mirror()
    elif case in ("pp", "pqr"):
        target = mirror(*cones)
    elif case == "p*":
        target = mirror(cones[0], 2, 2)
    elif case == "2*m":
        target = mirror(2 * corners[0], 2, 2)
    elif case == "3*2":
        target = mirror(4, 3, 2)
    elif case == "nx":
        n = cones[0]
        mid = SphericalSignature(cone_orders=(2 * n,), mirror=True)
        target = mirror(2 * n, 2, 2)
        return SupergroupResult(target, 4, ((mid, 2), (target, 2)))
    else:  # pragma: no cover - _validate rejects everything else
        raise NotSphericalError(str(sig))
    return SupergroupResult(target, 2, ((target, 2),))


def verify_cover(result: SupergroupResult, sig: SphericalSignature) -> bool:
    """Check the order arithmetic of a supergroup result against ``sig``."""
    if not result.supergroup.is_reflection_group:
        return False
    if math.prod(d for _, d in result.chain) != result.index:
        return False
    if result.chain and result.chain[-1][0] != result.supergroup:
        return False
    if not result.chain and (result.index != 1 or result.supergroup != sig):
        return False
    lower = sig
    for upper, degree in result.chain:
        if euler_characteristic(lower) != degree * euler_characteristic(upper):
            return False
        lower = upper
    return group_order(result.supergroup).order == result.index * group_order(sig).order


def same_orbifold(a: SphericalSignature, b: SphericalSignature) -> bool:
    """Equality up to reordering of cone points and corners."""
    return (
        a.mirror == b.mirror
        and a.crosscap == b.crosscap
        and sorted(a.cone_orders) == sorted(b.cone_orders)
        and sorted(a.corner_orders) == sorted(b.corner_orders)
    )


def enumerate_signatures(max_order: int = 50) -> list[SphericalSignature]:
    """All spherical signatures whose parameters p, q, r, n, m are <= max_order.

    Triples are listed once, in non-increasing order.
    """
    S = SphericalSignature
    sigs = [S(), S(mirror=True)]
    for p in range(2, max_order + 1):
        sigs += [S((p, p)), S(mirror=True, corner_orders=(p, p))]
    for p, q, r in itertools.combinations_with_replacement(range(max_order, 1, -1), 3):
        if Fraction(1, p) + Fraction(1, q) + Fraction(1, r) > 1:
            sigs += [S((p, q, r)), S(mirror=True, corner_orders=(p, q, r))]
    for n in range(2, max_order + 1):
        sigs.append(S((n,), mirror=True))
        sigs.append(S((2,), mirror=True, corner_orders=(n,)))
    sigs.append(S((3,), mirror=True, corner_orders=(2,)))
    for n in range(1, max_order + 1):
        sigs.append(S((n,), crosscap=True))
    return sigs
