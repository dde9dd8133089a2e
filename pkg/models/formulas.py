"""
Epistemic modal logic formulas
Nodes are immutable and compare by their canonical printed form
"""
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, Iterator, List, Optional, Tuple

from models.errors import FormulaSyntaxError
from models.kets import Symbol

MAX_TIME = 4


class Agent(Enum):
    F1 = "F1"
    F2 = "F2"
    W1 = "W1"
    W2 = "W2"


class Predicate(Enum):
    S1_EQ = "S1"
    S2_EQ = "S2"
    PCHI_L1_NONNULL = "PchiL1!=0"
    PCHI_L1_NULL = "PchiL1=0"
    PCHI_L2_NONNULL = "PchiL2!=0"
    PCHI_L2_NULL = "PchiL2=0"

    @property
    def takes_value(self) -> bool:
        return self in (Predicate.S1_EQ, Predicate.S2_EQ)


@dataclass(frozen=True)
class Context:
    """Measurement context, identified with the basis that defines it"""
    id: str
    basis: str

    def __str__(self) -> str:
        return self.id


PRODUCT_CONTEXT = Context("C1", "product")
W_CONTEXT = Context("C2", "w")
CONTEXTS = {PRODUCT_CONTEXT.id: PRODUCT_CONTEXT, W_CONTEXT.id: W_CONTEXT}


@dataclass(frozen=True)
class AgentInstance:
    """An agent at a set of protocol times"""
    name: Agent
    times: FrozenSet[int]

    def __post_init__(self):
        times = frozenset(self.times)
        if not times:
            raise FormulaSyntaxError(f"agent {self.name.value} has an empty time set")
        if any(t < 0 or t > MAX_TIME for t in times):
            raise FormulaSyntaxError(f"times {sorted(times)} outside 0..{MAX_TIME}")
        object.__setattr__(self, "times", times)

    @classmethod
    def at(cls, name: Agent, *times: int) -> "AgentInstance":
        return cls(name, frozenset(times))

    def covered_by(self, other: "AgentInstance") -> bool:
        return self.name == other.name and self.times <= other.times

    def times_text(self) -> str:
        ordered = sorted(self.times)
        contiguous = ordered == list(range(ordered[0], ordered[-1] + 1))
        if contiguous and len(ordered) > 1 and ordered[0] == 0:
            return f"<{ordered[-1] + 1}"
        if contiguous and len(ordered) > 1 and ordered[-1] == MAX_TIME:
            return f">={ordered[0]}"
        return ",".join(str(t) for t in ordered)

    def __str__(self) -> str:
        return f"{self.name.value}@{self.times_text()}"


class Formula:
    """Base class; subclasses set `key` to their canonical text"""
    key: str

    def __eq__(self, other) -> bool:
        return isinstance(other, Formula) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "Formula") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return self.key

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.key}>"

    @property
    def modal_depth(self) -> int:
        return 0

    def walk(self) -> Iterator["Formula"]:
        yield self


class Atom(Formula):
    def __init__(self, predicate: Predicate, value: Optional[Symbol] = None):
        if predicate.takes_value:
            if value not in (Symbol.PHI, Symbol.PSI):
                raise FormulaSyntaxError(f"atom {predicate.value} needs a value phi or psi")
        elif value is not None:
            raise FormulaSyntaxError(f"atom {predicate.value} takes no value")
        self.predicate = predicate
        self.value = value
        self.key = f"{predicate.value}={value.value}" if value else predicate.value


class Not(Formula):
    def __init__(self, body: Formula):
        self.body = body
        self.key = "!" + _unary_text(body)

    @property
    def modal_depth(self) -> int:
        return self.body.modal_depth

    def walk(self) -> Iterator[Formula]:
        yield self
        yield from self.body.walk()


class And(Formula):
    """Conjunction with children in canonical order"""

    def __init__(self, left: Formula, right: Formula):
        if right.key < left.key:
            left, right = right, left
        self.left = left
        self.right = right
        self.key = f"{_conj_text(left)} & {_conj_text(right)}"

    @property
    def modal_depth(self) -> int:
        return max(self.left.modal_depth, self.right.modal_depth)

    def walk(self) -> Iterator[Formula]:
        yield self
        yield from self.left.walk()
        yield from self.right.walk()


class Implies(Formula):
    """Material implication"""

    def __init__(self, antecedent: Formula, consequent: Formula):
        self.antecedent = antecedent
        self.consequent = consequent
        left = f"({antecedent.key})" if isinstance(antecedent, Implies) else antecedent.key
        self.key = f"{left} -> {consequent.key}"

    @property
    def modal_depth(self) -> int:
        return max(self.antecedent.modal_depth, self.consequent.modal_depth)

    def walk(self) -> Iterator[Formula]:
        yield self
        yield from self.antecedent.walk()
        yield from self.consequent.walk()


class Knows(Formula):
    """K[agent@times|context](body)"""

    def __init__(self, agent: AgentInstance, body: Formula, context: Optional[Context] = None):
        self.agent = agent
        self.context = context
        self.body = body
        tag = f"|{context.id}" if context else ""
        self.key = f"K[{agent}{tag}]({body.key})"

    @property
    def modal_depth(self) -> int:
        return 1 + self.body.modal_depth

    def walk(self) -> Iterator[Formula]:
        yield self
        yield from self.body.walk()

    def same_operator(self, other: "Knows") -> bool:
        return self.agent == other.agent and self.context == other.context


def _unary_text(f: Formula) -> str:
    return f"({f.key})" if isinstance(f, (And, Implies)) else f.key


def _conj_text(f: Formula) -> str:
    return f"({f.key})" if isinstance(f, (And, Implies)) else f.key


# Structural helpers used by the inference rules

Prefix = Tuple[Knows, ...]


def split_prefixes(f: Formula) -> List[Tuple[Prefix, Formula]]:
    """Every way to read f as K_p1 ... K_pn [rest], n >= 0"""
    splits = [((), f)]
    prefix: List[Knows] = []
    node = f
    while isinstance(node, Knows):
        prefix.append(node)
        node = node.body
        splits.append((tuple(prefix), node))
    return splits


def wrap(prefix: Iterable[Knows], body: Formula) -> Formula:
    """Rebuild K_p1 ... K_pn [body] with the operators of `prefix`"""
    for operator in reversed(tuple(prefix)):
        body = Knows(operator.agent, body, operator.context)
    return body


def prefix_signature(prefix: Prefix) -> Tuple[Tuple[AgentInstance, Optional[Context]], ...]:
    return tuple((k.agent, k.context) for k in prefix)


def is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.body, Atom))


_COMPLEMENTS = {
    Predicate.PCHI_L1_NONNULL: Predicate.PCHI_L1_NULL,
    Predicate.PCHI_L1_NULL: Predicate.PCHI_L1_NONNULL,
    Predicate.PCHI_L2_NONNULL: Predicate.PCHI_L2_NULL,
    Predicate.PCHI_L2_NULL: Predicate.PCHI_L2_NONNULL,
}


def complementary(p: Formula, q: Formula) -> Optional[Formula]:
    """
    If p and q cannot both hold, return the member kept by the
    condition-(S) lift (nonnull, phi, or the un-negated side)
    """
    if isinstance(q, Not) and q.body == p:
        return p
    if isinstance(p, Not) and p.body == q:
        return q
    if not (isinstance(p, Atom) and isinstance(q, Atom)):
        return None
    if _COMPLEMENTS.get(p.predicate) == q.predicate:
        nonnull = (Predicate.PCHI_L1_NONNULL, Predicate.PCHI_L2_NONNULL)
        return p if p.predicate in nonnull else q
    if p.predicate.takes_value and p.predicate == q.predicate and p.value != q.value:
        return p if p.value == Symbol.PHI else q
    return None


def is_global_contradiction(f: Formula) -> bool:
    """Shape K_a(p) & !K_a(p)"""
    if not isinstance(f, And):
        return False
    for positive, negative in ((f.left, f.right), (f.right, f.left)):
        if isinstance(positive, Knows) and isinstance(negative, Not) and negative.body == positive:
            return True
    return False


def erase_contexts(f: Formula) -> Formula:
    """Same formula with every context tag dropped"""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(erase_contexts(f.body))
    if isinstance(f, And):
        return And(erase_contexts(f.left), erase_contexts(f.right))
    if isinstance(f, Implies):
        return Implies(erase_contexts(f.antecedent), erase_contexts(f.consequent))
    if isinstance(f, Knows):
        return Knows(f.agent, erase_contexts(f.body))
    raise TypeError(f"not a formula node: {f!r}")


def agents_in(f: Formula) -> List[AgentInstance]:
    seen = []
    for node in f.walk():
        if isinstance(node, Knows) and node.agent not in seen:
            seen.append(node.agent)
    return seen
