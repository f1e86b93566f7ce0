"""Polynomial central charges over a numerical ring.

A charge assignment is a triple (omega, rho, U): a polarisation class,
a stability vector of complex rational weights, and a real unipotent
operator class. For a Chern character ch the central charge is the
degree-n polynomial

    Z(k) = sum_d rho_d * integrate(omega^d * ch * U) * k^d,

computed exactly over Gaussian rationals. k stays formal here; no
numeric evaluation happens in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .gaussian import GaussianRational, as_fraction
from .numring import (GradedClass, NumericalRing, RingError, integrate,
                      power_series_apply)


class ChargeError(ValueError):
    pass


# -- stability vectors -------------------------------------------------------

@dataclass(frozen=True)
class StabilityVector:
    """Weights rho_0..rho_n of a polynomial central charge."""

    rho: Tuple[GaussianRational, ...]

    def __post_init__(self):
        if len(self.rho) < 2:
            raise ChargeError("stability vector needs entries rho_0..rho_n with n >= 1")

    @property
    def n(self) -> int:
        return len(self.rho) - 1

    def __getitem__(self, d: int) -> GaussianRational:
        return self.rho[d]

    def scale(self, r) -> "StabilityVector":
        return StabilityVector(tuple(x.scale(r) for x in self.rho))


@dataclass(frozen=True)
class StabilityVectorReport:
    ok: bool
    first_violation: Optional[int] = None
    reason: str = ""


def validate_stability_vector(vec: StabilityVector) -> StabilityVectorReport:
    """Exact validity check with the first violated index.

    Conditions: every rho_d nonzero; the leading weight satisfies
    Im(rho_n) > 0, or sits on the boundary with Im(rho_n) = 0,
    Re(rho_n) > 0 and Im(rho_{n-1}/rho_n) > 0 (so the subleading term
    still pushes charges of positive-rank objects into the upper
    half-plane); and Im(rho_d / rho_{d+1}) > 0 for 0 <= d <= n-1.
    """
    n = vec.n
    for d, x in enumerate(vec.rho):
        if x.is_zero():
            return StabilityVectorReport(False, d, f"rho_{d} = 0")
    top = vec[n]
    if top.im <= 0:
        boundary_ok = (
            top.im == 0 and top.re > 0 and (vec[n - 1] / top).im > 0
        )
        if not boundary_ok:
            return StabilityVectorReport(
                False, n,
                f"Im rho_n = {top.im} fails the upper half-plane normalisation")
    for d in range(n):
        ratio = vec[d] / vec[d + 1]
        if ratio.im <= 0:
            return StabilityVectorReport(
                False, d, f"Im(rho_{d}/rho_{d+1}) = {ratio.im} is not positive")
    return StabilityVectorReport(True)


def require_valid_stability_vector(vec: StabilityVector) -> None:
    report = validate_stability_vector(vec)
    if not report.ok:
        raise ChargeError(
            f"invalid stability vector at index {report.first_violation}: {report.reason}")


def dhym_stability_vector(n: int) -> StabilityVector:
    """rho_d = -(-i)^d / d! for d = 0..n.

    In dimensions n = 0, 3 mod 4 the raw leading weight leaves the upper
    half-plane, so the whole vector is rotated by a quarter or half turn;
    a global rotation shifts every phase by the same constant and leaves
    all comparisons invariant. For n = 1, 2 the vector is returned as is.
    """
    cycle = [GaussianRational.of(1), GaussianRational(Fraction(0), Fraction(-1)),
             GaussianRational.of(-1), GaussianRational(Fraction(0), Fraction(1))]
    out: List[GaussianRational] = []
    fact = Fraction(1)
    for d in range(n + 1):
        if d > 0:
            fact *= d
        out.append((-cycle[d % 4]).scale(Fraction(1) / fact))
    rotation = {0: GaussianRational(Fraction(0), Fraction(-1)),
                3: GaussianRational.of(-1)}.get(n % 4)
    if rotation is not None:
        out = [rotation * x for x in out]
    return StabilityVector(tuple(out))


# -- operand types ------------------------------------------------------------

@dataclass(frozen=True)
class UnipotentOperator:
    """Real class with degree-0 part 1, acting by cup product."""

    cls: GradedClass

    def __post_init__(self):
        if self.cls.degree0() != 1:
            raise ChargeError(
                f"unipotent operator needs degree-0 part 1, got {self.cls.degree0()}")


@dataclass(frozen=True)
class ChernCharacter:
    """Chern character class; the degree-0 part is the (integer) rank."""

    cls: GradedClass

    def __post_init__(self):
        rank = self.cls.degree0()
        if rank.denominator != 1:
            raise ChargeError(f"rank must be an integer, got {rank}")

    @property
    def rank(self) -> Fraction:
        return self.cls.degree0()

    def __add__(self, other: "ChernCharacter") -> "ChernCharacter":
        return ChernCharacter(self.cls + other.cls)


# -- the charge polynomial ----------------------------------------------------

@dataclass(frozen=True)
class CentralChargePolynomial:
    """Z(k) = sum coefficients[d] * k^d with Gaussian rational coefficients."""

    coefficients: Tuple[GaussianRational, ...]

    def __getitem__(self, d: int) -> GaussianRational:
        if d < 0 or d >= len(self.coefficients):
            return GaussianRational()
        return self.coefficients[d]

    def __len__(self) -> int:
        return len(self.coefficients)

    def degree(self) -> int:
        for d in range(len(self.coefficients) - 1, -1, -1):
            if not self.coefficients[d].is_zero():
                return d
        return -1

    def leading(self) -> GaussianRational:
        d = self.degree()
        return self.coefficients[d] if d >= 0 else GaussianRational()

    def _padded(self, length: int) -> Tuple[GaussianRational, ...]:
        pad = length - len(self.coefficients)
        return self.coefficients + tuple(GaussianRational() for _ in range(pad))

    def __add__(self, other: "CentralChargePolynomial") -> "CentralChargePolynomial":
        m = max(len(self), len(other))
        return CentralChargePolynomial(tuple(
            a + b for a, b in zip(self._padded(m), other._padded(m))))

    def __sub__(self, other: "CentralChargePolynomial") -> "CentralChargePolynomial":
        m = max(len(self), len(other))
        return CentralChargePolynomial(tuple(
            a - b for a, b in zip(self._padded(m), other._padded(m))))

    def scale(self, r) -> "CentralChargePolynomial":
        return CentralChargePolynomial(tuple(c.scale(r) for c in self.coefficients))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CentralChargePolynomial):
            return NotImplemented
        m = max(len(self), len(other))
        return self._padded(m) == other._padded(m)

    def __hash__(self):
        return hash(self._padded(len(self)))

    def __str__(self) -> str:
        return ", ".join(f"k^{d}: {self.coefficients[d]}"
                         for d in range(len(self.coefficients) - 1, -1, -1))


def central_charge(
    ring: NumericalRing,
    omega: GradedClass,
    rho: StabilityVector,
    U: UnipotentOperator,
    ch: ChernCharacter,
) -> CentralChargePolynomial:
    """Exact charge polynomial of ch for the assignment (omega, rho, U).

    Requires a valid stability vector, deg(omega) = 2 and
    integrate(omega^n) > 0. For positive rank the leading coefficient
    lands in the closed upper half-plane off the negative real axis.
    """
    n = ring.complex_dimension
    if rho.n != n:
        raise ChargeError(f"stability vector has n = {rho.n}, ring has n = {n}")
    require_valid_stability_vector(rho)
    if omega.is_zero() or omega.degrees() != [2]:
        raise ChargeError("polarisation must be a nonzero degree-2 class")
    vol = integrate(omega ** n)
    if vol <= 0:
        raise ChargeError(f"integrate(omega^n) = {vol} must be positive")
    base = ch.cls * U.cls
    coeffs = []
    omega_power = ring.unit()
    for d in range(n + 1):
        coeffs.append(rho[d].scale(integrate(omega_power * base)))
        omega_power = omega_power * omega
    z = CentralChargePolynomial(tuple(coeffs))
    if ch.rank > 0:
        lead = z[n]
        if not (lead.im > 0 or (lead.im == 0 and lead.re > 0)):
            raise ChargeError(
                f"leading coefficient {lead} left the upper half-plane; "
                "charge data inconsistent")
    return z


def deg_U(ring: NumericalRing, omega: GradedClass, U: UnipotentOperator,
          ch: ChernCharacter) -> Fraction:
    """U-twisted degree: integrate(omega^(n-1) * (ch_1 + rank * U_2))."""
    n = ring.complex_dimension
    ch1 = ch.cls.component(2)
    u2 = U.cls.component(2)
    bracket = ch1 + u2.scale(ch.rank)
    return integrate((omega ** (n - 1)) * bracket)


# -- presets ------------------------------------------------------------------

def charge_preset(name: str, ring: NumericalRing, bfield: GradedClass
                  ) -> Tuple[StabilityVector, UnipotentOperator]:
    """Named charge assignments.

    dhym: rho_d = -(-i)^d/d!, U = exp(-B).
    todd: same rho, U = exp(-B) * sqrt(Td) with the ring's stored Todd
    class (rings without one reject this preset).

    B must be a real degree-2 class (possibly zero).
    """
    if not bfield.is_zero() and bfield.degrees() != [2]:
        raise ChargeError("B-field must be a degree-2 class")
    n = ring.complex_dimension
    rho = dhym_stability_vector(n)
    expb = power_series_apply("exp", -bfield)
    if name == "dhym":
        return rho, UnipotentOperator(expb)
    if name == "todd":
        if ring.todd is None:
            raise ChargeError(
                f"ring {ring.name!r} stores no Todd class; todd preset unavailable")
        return rho, UnipotentOperator(expb * power_series_apply("sqrt", ring.todd))
    raise ChargeError(f"unknown charge preset {name!r}; expected dhym or todd")
