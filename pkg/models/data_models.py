"""
Core data models for the FR logic checker
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Mapping, Optional, Set, Tuple

from models.field_element import FieldElement
from models.formulas import Agent, AgentInstance, Atom, Context, Formula, Knows
from models.kets import Symbol


class Action(Enum):
    PREPARE_MEASURE_SEND = "prepare_measure_send"
    MEASURE_RECORD = "measure_record"
    MEASURE_ANNOUNCE = "measure_announce"
    HALT_CHECK = "halt_check"


class Outcome(Enum):
    NONNULL = "nonnull"
    NULL = "null"


class Mode(Enum):
    NAIVE = "naive"
    CONTEXTUAL = "contextual"


@dataclass(frozen=True)
class ProtocolStep:
    """One step of a protocol round"""
    index: int
    actor: Optional[Agent]
    action: Action
    description: str


@dataclass(frozen=True)
class Scenario:
    """
    Outcome assignment of one protocol run

    Friend outcomes are None where the friends' records were erased by
    the super-observers' measurements.
    """
    f1_outcome: Optional[Symbol]
    f2_outcome: Optional[Symbol]
    w1_outcome: Outcome
    w2_outcome: Outcome
    probability: FieldElement

    def __post_init__(self):
        for outcome in (self.f1_outcome, self.f2_outcome):
            if outcome is not None and outcome not in (Symbol.PHI, Symbol.PSI):
                raise ValueError(f"friend outcome must be phi or psi, got {outcome}")
        if self.f1_outcome == Symbol.PHI and self.f2_outcome == Symbol.PSI:
            raise ValueError("F1 outcome phi forces F2 outcome phi")

    @property
    def halts(self) -> bool:
        return self.w1_outcome == Outcome.NONNULL and self.w2_outcome == Outcome.NONNULL

    @property
    def label(self) -> str:
        def friend(o: Optional[Symbol]) -> str:
            return o.value if o else "-"
        return (f"F1={friend(self.f1_outcome)} F2={friend(self.f2_outcome)} "
                f"W1={self.w1_outcome.value} W2={self.w2_outcome.value}")


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    scenario: Scenario
    halted: bool

    def __post_init__(self):
        if self.trial_index < 1:
            raise ValueError("trial_index starts at 1")
        if self.halted != self.scenario.halts:
            raise ValueError("halted must match both super-observers reporting nonnull")


@dataclass(frozen=True)
class TrustRelation:
    """
    Ordered trust pairs (truster, trusted) between agent instances

    Identical instances always trust each other. In contextual mode a
    pair is usable only when both operators carry the same context.
    """
    pairs: FrozenSet[Tuple[AgentInstance, AgentInstance]]
    mode: Mode = Mode.NAIVE
    contexts: Mapping[Agent, Context] = field(default_factory=dict)

    def pair_for(self, outer: Knows, inner: Knows) -> Optional[Tuple[AgentInstance, AgentInstance]]:
        """The pair licensing K_outer K_inner phi -> K_outer phi, if any"""
        if self.mode == Mode.CONTEXTUAL:
            if outer.context is None or outer.context != inner.context:
                return None
        if outer.agent == inner.agent:
            return (outer.agent, inner.agent)
        for truster, trusted in sorted(self.pairs, key=lambda p: (str(p[0]), str(p[1]))):
            if outer.agent.covered_by(truster) and inner.agent.covered_by(trusted):
                return (truster, trusted)
        return None

    def context_for(self, agent: Agent) -> Optional[Context]:
        if self.mode != Mode.CONTEXTUAL:
            return None
        return self.contexts.get(agent)


@dataclass(frozen=True)
class DerivationStep:
    conclusion: Formula
    rule: str
    premises: Tuple[int, ...] = ()
    detail: str = ""


@dataclass
class DerivationTrace:
    """Rule applications from premises to a goal; indices are 0-based"""
    steps: List[DerivationStep] = field(default_factory=list)

    def add(self, step: DerivationStep) -> int:
        self.steps.append(step)
        return len(self.steps) - 1

    @property
    def final(self) -> Optional[Formula]:
        return self.steps[-1].conclusion if self.steps else None

    def conclusions(self) -> List[Formula]:
        return [s.conclusion for s in self.steps]

    def contains(self, formula: Formula) -> bool:
        return any(s.conclusion == formula for s in self.steps)

    def rules_used(self) -> List[str]:
        return [s.rule for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class NotDerivable:
    """Certificate that a goal is absent from a closed formula set"""
    depth: int
    rounds: int
    fixpoint: bool
    formulas: FrozenSet[Formula]

    @property
    def size(self) -> int:
        return len(self.formulas)


@dataclass(frozen=True)
class ContradictionCertificate:
    trace: DerivationTrace
    agent: AgentInstance
    waypoints: Tuple[Formula, ...] = ()


@dataclass(frozen=True)
class BlockCertificate:
    """Contextual closure shown free of contradictions and of the blocked reduction"""
    result: NotDerivable
    depth: int
    naive_depth: int
    excluded: Tuple[Formula, ...] = ()


@dataclass(frozen=True)
class PremiseEntry:
    """A premise with its source tag; `display` is the literal parse"""
    source: str
    display: Formula
    formula: Formula
    tautology: bool = True


@dataclass
class PremiseSet:
    mode: Mode
    entries: List[PremiseEntry]
    trust: TrustRelation
    facts: List[PremiseEntry] = field(default_factory=list)

    @property
    def formulas(self) -> List[Formula]:
        return [e.formula for e in self.entries]

    @property
    def tautologies(self) -> List[Formula]:
        return [e.formula for e in self.entries if e.tautology]

    def by_source(self, source: str) -> PremiseEntry:
        for entry in self.entries + self.facts:
            if entry.source == source:
                return entry
        raise KeyError(source)


@dataclass
class KripkeModel:
    """States, interpretation pi and per-agent accessibility relations"""
    states: List[Scenario]
    interpretation: Dict[Tuple[Scenario, Atom], bool]
    access: Dict[AgentInstance, Set[Tuple[Scenario, Scenario]]]

    def successors(self, agent: AgentInstance, state: Scenario) -> List[Scenario]:
        return [t for (s, t) in self.access[agent] if s == state]


@dataclass(frozen=True)
class FixpointComparison:
    """Contextual fixpoint, tags erased, checked against the naive fixpoint"""
    naive_size: int
    contextual_size: int
    naive_fixpoint: bool
    contextual_fixpoint: bool
    missing: Tuple[Formula, ...] = ()

    @property
    def included(self) -> bool:
        return not self.missing


@dataclass(frozen=True)
class IdentityResult:
    """One exact identity checked by the `check` command"""
    name: str
    value: str
    passed: bool

    @property
    def line(self) -> str:
        return f"{self.name} = {self.value} {'PASS' if self.passed else 'FAIL'}"
