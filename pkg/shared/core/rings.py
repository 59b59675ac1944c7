"""
Exact arithmetic in a user-chosen commutative ring.

Three kinds of coefficient ring are supported: the integers, the integers
modulo q (q >= 2), and multivariate polynomials with integer coefficients.
Every element is held in a canonical form, so equality of elements is
equality of representations.
"""

import keyword
import random
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple, Union

from sympy import Symbol
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.domains import ZZ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing, ring as sympy_ring

from shared.core.errors import RingMismatchError, ValidationError


_VARIABLE_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_INTEGER_TEXT = re.compile(r"^\s*([+-]?\d+)\s*$")
_MODULAR_TEXT = re.compile(r"^\s*([+-]?\d+)\s*(?:mod\s+(\d+))?\s*$")
_POLY_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\*\*|[-+*^()]))", re.ASCII)

_POLY_TRANSFORMATIONS = standard_transformations + (convert_xor,)


class RingKind(str, Enum):
    INTEGERS = "integers"
    MODULAR = "modular"
    POLYNOMIALS = "polynomials"


@lru_cache(maxsize=None)
def _sympy_poly_ring(variables: Tuple[str, ...]) -> PolyRing:
    """Sparse polynomial ring ZZ[variables] with lex order on the declared list."""
    return sympy_ring(",".join(variables), ZZ, lex)[0]


@dataclass(frozen=True)
class RingHandle:
    """A commutative ring A with exact arithmetic."""
    kind: RingKind
    modulus: Optional[int] = None
    variables: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", RingKind(self.kind))
        object.__setattr__(self, "variables", tuple(self.variables))

        if self.kind is RingKind.MODULAR:
            if isinstance(self.modulus, bool) or not isinstance(self.modulus, int) or self.modulus < 2:
                raise ValidationError(f"Modular ring requires an integer modulus q >= 2, got {self.modulus!r}")
            if self.variables:
                raise ValidationError("Modular ring takes no variables")
        elif self.kind is RingKind.POLYNOMIALS:
            if self.modulus is not None:
                raise ValidationError("Polynomial ring takes no modulus")
            if not self.variables:
                raise ValidationError("Polynomial ring requires at least one variable")
            for name in self.variables:
                if not isinstance(name, str) or not _VARIABLE_NAME.match(name) or keyword.iskeyword(name):
                    raise ValidationError(f"Invalid polynomial variable name: {name!r}")
            if len(set(self.variables)) != len(self.variables):
                raise ValidationError(f"Polynomial variable names must be distinct: {list(self.variables)}")
        else:
            if self.modulus is not None or self.variables:
                raise ValidationError("The integer ring takes no modulus and no variables")

    # ------------------------------------------------------------------
    # Construction and description
    # ------------------------------------------------------------------

    @classmethod
    def integers(cls) -> "RingHandle":
        return cls(RingKind.INTEGERS)

    @classmethod
    def modular(cls, q: int) -> "RingHandle":
        return cls(RingKind.MODULAR, modulus=q)

    @classmethod
    def polynomials(cls, variables: Iterable[str]) -> "RingHandle":
        return cls(RingKind.POLYNOMIALS, variables=tuple(variables))

    @classmethod
    def parse(cls, text: str) -> "RingHandle":
        """Parse the shared ``integers | mod:<q> | poly:<v1,v2,...>`` grammar."""
        spec = text.strip()
        if spec == "integers":
            return cls.integers()
        if spec.startswith("mod:"):
            modulus = spec[len("mod:"):]
            if not modulus.isdigit():
                raise ValidationError(f"Invalid modulus in ring spec: {text!r}")
            return cls.modular(int(modulus))
        if spec.startswith("poly:"):
            names = [name.strip() for name in spec[len("poly:"):].split(",")]
            return cls.polynomials(names)
        raise ValidationError(f"Unknown ring spec {text!r}; expected integers, mod:<q> or poly:<v1,...>")

    @property
    def spec(self) -> str:
        if self.kind is RingKind.MODULAR:
            return f"mod:{self.modulus}"
        if self.kind is RingKind.POLYNOMIALS:
            return "poly:" + ",".join(self.variables)
        return "integers"

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        if self.kind is RingKind.MODULAR:
            return {"kind": self.kind.value, "modulus": self.modulus}
        if self.kind is RingKind.POLYNOMIALS:
            return {"kind": self.kind.value, "variables": list(self.variables)}
        return {"kind": self.kind.value}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RingHandle":
        try:
            kind = RingKind(data["kind"])
        except (KeyError, ValueError, TypeError):
            raise ValidationError(f"Invalid ring description: {data!r}")
        return cls(kind, modulus=data.get("modulus"), variables=tuple(data.get("variables") or ()))

    def __str__(self) -> str:
        return self.spec

    # ------------------------------------------------------------------
    # Elements
    # ------------------------------------------------------------------

    @property
    def poly_ring(self) -> PolyRing:
        if self.kind is not RingKind.POLYNOMIALS:
            raise RingMismatchError(f"Ring {self.spec} is not a polynomial ring")
        return _sympy_poly_ring(self.variables)

    def element(self, value: Any) -> "RingElement":
        """Wrap a raw value, bringing it to canonical form."""
        if self.kind is RingKind.POLYNOMIALS:
            if isinstance(value, PolyElement):
                if value.ring != self.poly_ring:
                    raise RingMismatchError(f"Polynomial from another ring used in {self.spec}")
                return RingElement(self, value)
            return RingElement(self, self.poly_ring(int(value)))
        if isinstance(value, bool) or not isinstance(value, int):
            value = int(value)
        if self.kind is RingKind.MODULAR:
            return RingElement(self, value % self.modulus)
        return RingElement(self, value)

    def from_int(self, k: int) -> "RingElement":
        """Image of an integer under the unique ring morphism Z -> A."""
        return self.element(int(k))

    def zero(self) -> "RingElement":
        return self.from_int(0)

    def one(self) -> "RingElement":
        return self.from_int(1)

    def variable(self, name: str) -> "RingElement":
        if self.kind is not RingKind.POLYNOMIALS or name not in self.variables:
            raise ValidationError(f"{name!r} is not a variable of {self.spec}")
        return RingElement(self, self.poly_ring.gens[self.variables.index(name)])

    def random_element(self, rng: random.Random, bound: int = 5) -> "RingElement":
        """A bounded pseudo-random element, reproducible from ``rng``."""
        if self.kind is RingKind.MODULAR:
            return self.element(rng.randrange(self.modulus))
        if self.kind is RingKind.INTEGERS:
            return self.element(rng.randint(-bound, bound))

        poly = self.poly_ring.zero
        for _ in range(rng.randint(0, 3)):
            term = self.poly_ring(rng.randint(-3, 3))
            for gen in self.poly_ring.gens:
                term *= gen ** rng.randint(0, 2)
            poly += term
        return RingElement(self, poly)

    # ------------------------------------------------------------------
    # Raw arithmetic on canonical values
    # ------------------------------------------------------------------

    def _add(self, x: Any, y: Any) -> Any:
        if self.kind is RingKind.MODULAR:
            return (x + y) % self.modulus
        return x + y

    def _mul(self, x: Any, y: Any) -> Any:
        if self.kind is RingKind.MODULAR:
            return (x * y) % self.modulus
        return x * y

    def _neg(self, x: Any) -> Any:
        if self.kind is RingKind.MODULAR:
            return (-x) % self.modulus
        return -x

    # ------------------------------------------------------------------
    # Text serialization
    # ------------------------------------------------------------------

    def format_element(self, x: "RingElement") -> str:
        self.check_member(x)
        if self.kind is RingKind.MODULAR:
            return f"{x.value} mod {self.modulus}"
        if self.kind is RingKind.POLYNOMIALS:
            return _format_polynomial(x.value, self.variables)
        return str(x.value)

    def parse_element(self, text: Union[str, int]) -> "RingElement":
        """Parse the text form; integers are accepted for every ring kind."""
        if isinstance(text, bool):
            raise ValidationError(f"Invalid ring element {text!r}")
        if isinstance(text, int):
            return self.from_int(text)
        if not isinstance(text, str):
            raise ValidationError(f"Ring element must be a string, got {type(text).__name__}")

        if self.kind is RingKind.INTEGERS:
            match = _INTEGER_TEXT.match(text)
            if not match:
                raise ValidationError(f"Invalid integer {text!r}")
            return self.from_int(int(match.group(1)))

        if self.kind is RingKind.MODULAR:
            match = _MODULAR_TEXT.match(text)
            if not match:
                raise ValidationError(f"Invalid modular element {text!r}")
            if match.group(2) is not None and int(match.group(2)) != self.modulus:
                raise RingMismatchError(f"Element {text!r} does not belong to {self.spec}")
            return self.from_int(int(match.group(1)))

        return RingElement(self, self._parse_polynomial(text))

    def _check_polynomial_tokens(self, text: str) -> None:
        """Only integers, declared variables, ``+ - * ^ ( )`` and whitespace may reach the parser."""
        position = 0
        text = text.rstrip()
        while position < len(text):
            match = _POLY_TOKEN.match(text, position)
            if not match:
                raise ValidationError(f"Invalid polynomial {text!r} over {self.spec}: unexpected {text[position:]!r}")
            name = match.group(2)
            if name is not None and name not in self.variables:
                raise ValidationError(f"Invalid polynomial {text!r} over {self.spec}: unknown variable {name!r}")
            position = match.end()

    def _parse_polynomial(self, text: str) -> PolyElement:
        self._check_polynomial_tokens(text)
        local_dict = {name: Symbol(name) for name in self.variables}
        try:
            expr = parse_expr(text, local_dict=local_dict, transformations=_POLY_TRANSFORMATIONS)
            return self.poly_ring.from_expr(expr)
        except Exception as e:
            raise ValidationError(f"Invalid polynomial {text!r} over {self.spec}: {e}")

    def check_member(self, x: "RingElement") -> None:
        if not isinstance(x, RingElement) or x.ring != self:
            owner = x.ring.spec if isinstance(x, RingElement) else type(x).__name__
            raise RingMismatchError(f"Expected an element of {self.spec}, got one of {owner}")


def _format_polynomial(poly: PolyElement, variables: Tuple[str, ...]) -> str:
    """Canonical text: lex-descending monomials, e.g. ``3*x^2*y - x + 1``."""
    if not poly:
        return "0"

    parts = []
    for monom, coeff in poly.terms():
        c = int(coeff)
        factors = []
        for name, exponent in zip(variables, monom):
            if exponent == 1:
                factors.append(name)
            elif exponent > 1:
                factors.append(f"{name}^{exponent}")
        magnitude = abs(c)
        if not factors:
            body = str(magnitude)
        elif magnitude == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(magnitude)] + factors)
        parts.append((c < 0, body))

    negative, body = parts[0]
    text = f"-{body}" if negative else body
    for negative, body in parts[1:]:
        text += f" - {body}" if negative else f" + {body}"
    return text


@dataclass(frozen=True)
class RingElement:
    """An immutable element of a RingHandle in canonical form."""
    ring: RingHandle
    value: Any

    def _coerce(self, other: Union["RingElement", int]) -> "RingElement":
        if isinstance(other, int) and not isinstance(other, bool):
            return self.ring.from_int(other)
        if not isinstance(other, RingElement):
            raise TypeError(f"Cannot combine a ring element with {type(other).__name__}")
        if other.ring != self.ring:
            raise RingMismatchError(f"Ring mismatch: {self.ring.spec} vs {other.ring.spec}")
        return other

    def __add__(self, other: Union["RingElement", int]) -> "RingElement":
        other = self._coerce(other)
        return RingElement(self.ring, self.ring._add(self.value, other.value))

    __radd__ = __add__

    def __neg__(self) -> "RingElement":
        return RingElement(self.ring, self.ring._neg(self.value))

    def __sub__(self, other: Union["RingElement", int]) -> "RingElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other: int) -> "RingElement":
        return self._coerce(other) - self

    def __mul__(self, other: Union["RingElement", int]) -> "RingElement":
        other = self._coerce(other)
        return RingElement(self.ring, self.ring._mul(self.value, other.value))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "RingElement":
        if exponent < 0:
            raise ValueError("Negative powers are not defined in a general ring")
        if self.ring.kind is RingKind.MODULAR:
            return RingElement(self.ring, pow(self.value, exponent, self.ring.modulus))
        return RingElement(self.ring, self.value ** exponent)

    def is_zero(self) -> bool:
        return not self.value

    def evaluate(self, point: Optional[Mapping[str, int]] = None) -> int:
        """Evaluate at an integer point; the identity on integers and residues."""
        if self.ring.kind is not RingKind.POLYNOMIALS:
            return int(self.value)
        point = point or {}
        missing = [name for name in self.ring.variables if name not in point]
        if missing:
            raise ValidationError(f"Missing values for variables: {missing}")
        values = [int(point[name]) for name in self.ring.variables]
        return int(self.value(*values))

    def __str__(self) -> str:
        return self.ring.format_element(self)

    def __repr__(self) -> str:
        return f"RingElement({self.ring.spec!r}, {str(self)!r})"


def ring_add(x: RingElement, y: RingElement) -> RingElement:
    """Canonical sum; both operands must belong to the same ring."""
    x.ring.check_member(y)
    return x + y


def ring_mul(x: RingElement, y: RingElement) -> RingElement:
    """Canonical product; both operands must belong to the same ring."""
    x.ring.check_member(y)
    return x * y


def ring_neg(x: RingElement) -> RingElement:
    return -x


def ring_sub(x: RingElement, y: RingElement) -> RingElement:
    x.ring.check_member(y)
    return x - y


def ring_constants(ring: RingHandle) -> Tuple[RingElement, RingElement]:
    """Additive and multiplicative identities of ``ring``."""
    return ring.zero(), ring.one()


def ring_from_int(ring: RingHandle, k: int) -> RingElement:
    return ring.from_int(k)
