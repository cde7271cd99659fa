"""Complex fields on the iπ/4 lattice, log-form prefactors, and exact eighth-root arithmetic."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "QUARTER",
    "ComplexField",
    "Prefactor",
    "Cyclo8",
    "canonicalize_field",
    "prefactor_mul",
]

QUARTER = math.pi / 4


def _wrap_phase(phase: float) -> float:
    """Reduce an angle into (-pi, pi]."""
    p = math.remainder(phase, 2 * math.pi)
    if p <= -math.pi:
        p += 2 * math.pi
    return p


@dataclass(frozen=True)
class ComplexField:
    """A complex number real + i*(quarter_turns*pi/4 + residual_imag).

    Gadget arithmetic only ever touches ``quarter_turns``, so fields built
    from the rewrite rules stay exact. User-supplied couplings may carry a
    floating ``residual_imag``.
    """

    real_part: float = 0.0
    quarter_turns: int = 0
    residual_imag: float = 0.0

    @classmethod
    def quarter(cls, k: int) -> "ComplexField":
        """The exact field k*i*pi/4."""
        return cls(0.0, int(k), 0.0)

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexField":
        """Store an arbitrary complex number, keeping the imaginary part as residual."""
        z = complex(z)
        return cls(z.real, 0, z.imag)

    @property
    def value(self) -> complex:
        return complex(self.real_part, self.quarter_turns * QUARTER + self.residual_imag)

    @property
    def imag(self) -> float:
        return self.quarter_turns * QUARTER + self.residual_imag

    @property
    def is_exact(self) -> bool:
        """True when the field is a pure quarter-turn multiple."""
        return self.real_part == 0.0 and self.residual_imag == 0.0

    def __add__(self, other: "ComplexField") -> "ComplexField":
        if not isinstance(other, ComplexField):
            return NotImplemented
        return ComplexField(
            self.real_part + other.real_part,
            self.quarter_turns + other.quarter_turns,
            self.residual_imag + other.residual_imag,
        )

    def __neg__(self) -> "ComplexField":
        return ComplexField(-self.real_part, -self.quarter_turns, -self.residual_imag)

    def __sub__(self, other: "ComplexField") -> "ComplexField":
        return self + (-other)

    def shift(self, k: int) -> "ComplexField":
        """Add k quarter turns."""
        return ComplexField(self.real_part, self.quarter_turns + k, self.residual_imag)

    def scaled(self, f: float | Fraction) -> "ComplexField":
        """Multiply by a real factor, keeping quarter turns exact when possible."""
        q = Fraction(self.quarter_turns) * Fraction(f)
        if q.denominator == 1:
            return ComplexField(self.real_part * float(f), int(q), self.residual_imag * float(f))
        return ComplexField(
            self.real_part * float(f), 0, float(q) * QUARTER + self.residual_imag * float(f)
        )

    def canonical(self) -> "ComplexField":
        return canonicalize_field(self)[0]

    def weight(self, s: int) -> complex:
        """Boltzmann factor e^{h*s}."""
        return cmath.exp(self.value * s)

    def __str__(self) -> str:
        return f"{self.real_part!r} {self.quarter_turns} {self.residual_imag!r}"


ZERO = ComplexField()


def canonicalize_field(h: ComplexField) -> tuple[ComplexField, "Prefactor"]:
    """Bring a field into the canonical window Im in (-pi, pi].

    Shifting h by 2*pi*i leaves e^{h*S} unchanged for S = +-1, so the
    returned factor is always one.
    """
    q, r = h.quarter_turns, h.residual_imag
    if r != 0.0:
        k = round(r / QUARTER)
        q += k
        r -= k * QUARTER
    q = (q + 3) % 8 - 3
    if q == 4 and r > 0.0 and -3 * QUARTER + (r - QUARTER) > -math.pi:
        # past +pi; the test keeps residuals too small to move the float
        # value off -pi on the +pi side of the window
        q, r = -3, r - QUARTER
    return ComplexField(h.real_part, q, r), Prefactor.one()


@dataclass(frozen=True)
class Prefactor:
    """Multiplicative complex constant kept as (log|c|, arg c)."""

    log_magnitude: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "phase", _wrap_phase(self.phase))

    @classmethod
    def one(cls) -> "Prefactor":
        return cls(0.0, 0.0)

    @classmethod
    def from_complex(cls, z: complex) -> "Prefactor":
        z = complex(z)
        if z == 0:
            raise ValueError("a prefactor cannot be zero")
        return cls(math.log(abs(z)), cmath.phase(z))

    @classmethod
    def exp(cls, w: complex) -> "Prefactor":
        """The constant e^w, without ever forming it."""
        w = complex(w)
        return cls(w.real, w.imag)

    @classmethod
    def quarter(cls, k: int, log_magnitude: float = 0.0) -> "Prefactor":
        """|c| * e^{i*k*pi/4}."""
        return cls(log_magnitude, (k % 8) * QUARTER)

    def __mul__(self, other: "Prefactor") -> "Prefactor":
        if not isinstance(other, Prefactor):
            return NotImplemented
        return Prefactor(self.log_magnitude + other.log_magnitude, self.phase + other.phase)

    def __truediv__(self, other: "Prefactor") -> "Prefactor":
        return self * other.inverse()

    def __pow__(self, n: int) -> "Prefactor":
        return Prefactor(self.log_magnitude * n, self.phase * n)

    def inverse(self) -> "Prefactor":
        return Prefactor(-self.log_magnitude, -self.phase)

    def as_complex(self) -> complex:
        return cmath.rect(math.exp(self.log_magnitude), self.phase)

    def log(self) -> complex:
        return complex(self.log_magnitude, self.phase)

    def __str__(self) -> str:
        return f"{self.log_magnitude!r} {self.phase!r}"


def prefactor_mul(a: Prefactor, b: Prefactor) -> Prefactor:
    return a * b


@dataclass(frozen=True)
class Cyclo8:
    """Exact element of Q(w), w = e^{i*pi/4}, as coefficients of 1, w, w^2, w^3.

    Enough to evaluate every identity built from quarter-turn exponents with
    zero tolerance.
    """

    c: tuple[Fraction, Fraction, Fraction, Fraction] = (
        Fraction(0), Fraction(0), Fraction(0), Fraction(0))

    @classmethod
    def root(cls, k: int) -> "Cyclo8":
        """w^k."""
        k %= 8
        coeffs = [Fraction(0)] * 4
        coeffs[k % 4] = Fraction(-1 if k >= 4 else 1)
        return cls(tuple(coeffs))

    @classmethod
    def rational(cls, x) -> "Cyclo8":
        return cls((Fraction(x), Fraction(0), Fraction(0), Fraction(0)))

    @classmethod
    def sqrt2(cls) -> "Cyclo8":
        return cls.root(1) + cls.root(7)

    def __add__(self, other: "Cyclo8") -> "Cyclo8":
        return Cyclo8(tuple(a + b for a, b in zip(self.c, other.c)))

    def __sub__(self, other: "Cyclo8") -> "Cyclo8":
        return Cyclo8(tuple(a - b for a, b in zip(self.c, other.c)))

    def __mul__(self, other) -> "Cyclo8":
        if not isinstance(other, Cyclo8):
            other = Cyclo8.rational(other)
        out = [Fraction(0)] * 4
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j, b in enumerate(other.c):
                k = i + j
                if k >= 4:
                    out[k - 4] -= a * b
                else:
                    out[k] += a * b
        return Cyclo8(tuple(out))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.c)

    def __complex__(self) -> complex:
        w = cmath.exp(1j * QUARTER)
        return sum(float(a) * w**i for i, a in enumerate(self.c))


def root_sum(exponents) -> Cyclo8:
    """Sum of w^k over an iterable of integer exponents."""
    counts = [0] * 8
    for k in exponents:
        counts[k % 8] += 1
    return Cyclo8(tuple(Fraction(counts[i] - counts[i + 4]) for i in range(4)))
