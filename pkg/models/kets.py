"""
Sparse kets and span-based projectors over the lab subsystems S1, F1, S2, F2
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from models.errors import RosterError
from models.field_element import FieldElement


class Subsystem(Enum):
    S1 = "S1"
    F1 = "F1"
    S2 = "S2"
    F2 = "F2"

    @property
    def is_system(self) -> bool:
        return self in (Subsystem.S1, Subsystem.S2)


class Symbol(Enum):
    PHI = "phi"
    PSI = "psi"
    XI = "xi"
    ZETA = "zeta"


SYMBOL_ORDER = {Symbol.PHI: 0, Symbol.PSI: 1, Symbol.XI: 0, Symbol.ZETA: 1}

Roster = Tuple[Subsystem, ...]
Key = Tuple[Symbol, ...]


def symbols_for(subsystem: Subsystem) -> Tuple[Symbol, Symbol]:
    """The two basis symbols a subsystem admits"""
    if subsystem.is_system:
        return (Symbol.PHI, Symbol.PSI)
    return (Symbol.XI, Symbol.ZETA)


@dataclass(frozen=True)
class BasisLabel:
    """One basis vector of one subsystem"""
    subsystem: Subsystem
    symbol: Symbol

    def __post_init__(self):
        if self.symbol not in symbols_for(self.subsystem):
            raise RosterError(
                f"symbol {self.symbol.value} does not label subsystem {self.subsystem.value}"
            )


def _check_key(roster: Roster, key: Key):
    if len(key) != len(roster):
        raise RosterError(f"key {key} does not match roster {roster}")
    for subsystem, symbol in zip(roster, key):
        BasisLabel(subsystem, symbol)


@dataclass(frozen=True)
class Ket:
    """
    Vector in the tensor product of the roster's two-level spaces

    Absent keys have amplitude zero; zero amplitudes are never stored.
    """
    roster: Roster
    amplitudes: Mapping[Key, FieldElement] = field(default_factory=dict)

    def __post_init__(self):
        roster = tuple(self.roster)
        if len(set(roster)) != len(roster):
            raise RosterError(f"roster repeats a subsystem: {roster}")
        cleaned: Dict[Key, FieldElement] = {}
        for key, amplitude in dict(self.amplitudes).items():
            key = tuple(key)
            _check_key(roster, key)
            amplitude = FieldElement.of(amplitude)
            if not amplitude.is_zero():
                cleaned[key] = amplitude
        object.__setattr__(self, "roster", roster)
        object.__setattr__(self, "amplitudes", cleaned)

    @classmethod
    def basis(cls, labels: Sequence[BasisLabel]) -> "Ket":
        """Product basis ket with amplitude 1"""
        roster = tuple(label.subsystem for label in labels)
        key = tuple(label.symbol for label in labels)
        return cls(roster, {key: FieldElement.one()})

    @classmethod
    def zero(cls, roster: Iterable[Subsystem]) -> "Ket":
        return cls(tuple(roster), {})

    def amplitude(self, key: Iterable[Symbol]) -> FieldElement:
        return self.amplitudes.get(tuple(key), FieldElement.zero())

    def is_zero(self) -> bool:
        return not self.amplitudes

    def _same_roster(self, other: "Ket", operation: str):
        if self.roster != other.roster:
            raise RosterError(
                f"{operation}: roster mismatch {self.roster} vs {other.roster}"
            )

    def __add__(self, other: "Ket") -> "Ket":
        self._same_roster(other, "add")
        merged = dict(self.amplitudes)
        for key, amplitude in other.amplitudes.items():
            merged[key] = merged.get(key, FieldElement.zero()) + amplitude
        return Ket(self.roster, merged)

    def __neg__(self) -> "Ket":
        return Ket(self.roster, {k: -v for k, v in self.amplitudes.items()})

    def __sub__(self, other: "Ket") -> "Ket":
        return self + (-other)

    def scale(self, factor) -> "Ket":
        factor = FieldElement.of(factor)
        return Ket(self.roster, {k: v * factor for k, v in self.amplitudes.items()})

    def __rmul__(self, factor) -> "Ket":
        return self.scale(factor)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ket):
            return NotImplemented
        return self.roster == other.roster and self.amplitudes == other.amplitudes

    def __hash__(self) -> int:
        return hash((self.roster, frozenset(self.amplitudes.items())))

    def tensor(self, other: "Ket") -> "Ket":
        overlap = set(self.roster) & set(other.roster)
        if overlap:
            names = sorted(s.value for s in overlap)
            raise RosterError(f"tensor: rosters overlap on {names}")
        amplitudes = {}
        for k1, v1 in self.amplitudes.items():
            for k2, v2 in other.amplitudes.items():
                amplitudes[k1 + k2] = v1 * v2
        return Ket(self.roster + other.roster, amplitudes)

    def inner(self, other: "Ket") -> FieldElement:
        """<self, other>; scalars are real so no conjugation is needed"""
        self._same_roster(other, "inner")
        total = FieldElement.zero()
        smaller, larger = sorted((self.amplitudes, other.amplitudes), key=len)
        for key, amplitude in smaller.items():
            if key in larger:
                total = total + amplitude * larger[key]
        return total

    def norm_squared(self) -> FieldElement:
        return self.inner(self)

    def is_normalized(self) -> bool:
        return self.norm_squared() == 1

    def reorder(self, roster: Sequence[Subsystem]) -> "Ket":
        """Same vector written over a permutation of the roster"""
        roster = tuple(roster)
        if sorted(s.value for s in roster) != sorted(s.value for s in self.roster):
            raise RosterError(f"reorder: {roster} is not a permutation of {self.roster}")
        positions = [self.roster.index(s) for s in roster]
        return Ket(roster, {
            tuple(key[i] for i in positions): v for key, v in self.amplitudes.items()
        })

    def partial_inner(self, bra: "Ket") -> "Ket":
        """
        Contract `bra` against the matching sub-roster of this ket

        Returns the residual ket over the remaining subsystems, in the
        order they appear in this ket's roster.
        """
        missing = [s for s in bra.roster if s not in self.roster]
        if missing:
            raise RosterError(
                f"partial inner: {[s.value for s in missing]} not in roster {self.roster}"
            )
        rest = tuple(s for s in self.roster if s not in bra.roster)
        sub_positions = [self.roster.index(s) for s in bra.roster]
        rest_positions = [self.roster.index(s) for s in rest]
        residual: Dict[Key, FieldElement] = {}
        for key, amplitude in self.amplitudes.items():
            sub_key = tuple(key[i] for i in sub_positions)
            coefficient = bra.amplitudes.get(sub_key)
            if coefficient is None:
                continue
            rest_key = tuple(key[i] for i in rest_positions)
            residual[rest_key] = residual.get(rest_key, FieldElement.zero()) + coefficient * amplitude
        return Ket(rest, residual)

    def support(self) -> List[Key]:
        return sorted(self.amplitudes, key=lambda k: [SYMBOL_ORDER[s] for s in k])

    def to_text(self) -> str:
        """Canonical text form: sorted 'label-tuple: scalar' lines"""
        if self.is_zero():
            return "0"
        return "\n".join(
            f"{','.join(s.value for s in key)}: {self.amplitudes[key].to_text()}"
            for key in self.support()
        )

    def __repr__(self) -> str:
        roster = ",".join(s.value for s in self.roster)
        terms = "; ".join(self.to_text().splitlines())
        return f"Ket[{roster}]({terms})"


def product_basis(roster: Sequence[Subsystem]) -> List[Ket]:
    """All product basis kets over a roster, in canonical order"""
    kets = [Ket((), {(): FieldElement.one()})]
    for subsystem in roster:
        kets = [
            k.tensor(Ket.basis([BasisLabel(subsystem, symbol)]))
            for k in kets for symbol in symbols_for(subsystem)
        ]
    return kets


@dataclass(frozen=True)
class Projector:
    """Orthogonal projector stored by an orthonormal spanning list"""
    span: Tuple[Ket, ...]

    def __post_init__(self):
        span = tuple(self.span)
        if not span:
            raise RosterError("projector span must not be empty")
        roster = span[0].roster
        for i, ei in enumerate(span):
            if ei.roster != roster:
                raise RosterError("projector span kets must share a roster")
            for j in range(i, len(span)):
                expected = 1 if i == j else 0
                if ei.inner(span[j]) != expected:
                    raise RosterError(f"projector span is not orthonormal at ({i}, {j})")
        object.__setattr__(self, "span", span)

    @property
    def roster(self) -> Roster:
        return self.span[0].roster

    @property
    def rank(self) -> int:
        return len(self.span)

    def tensor(self, other: "Projector") -> "Projector":
        """P (x) Q on disjoint rosters"""
        return Projector(tuple(e.tensor(f) for e in self.span for f in other.span))

    def apply(self, v: Ket) -> Ket:
        """P (x) Identity acting on v"""
        result = Ket.zero(v.roster)
        for e in self.span:
            residual = v.partial_inner(e)
            if residual.is_zero():
                continue
            result = result + e.tensor(residual).reorder(v.roster)
        return result

    def __repr__(self) -> str:
        roster = ",".join(s.value for s in self.roster)
        return f"Projector[{roster}](rank={self.rank})"


def commutes(p: Projector, q: Projector, basis: Sequence[Ket]) -> bool:
    """Exact check that PQ = QP on every vector of `basis`"""
    return all(p.apply(q.apply(b)) == q.apply(p.apply(b)) for b in basis)
