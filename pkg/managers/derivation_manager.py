"""
Derivation manager for the FR logic checker
Encodes the protocol premises, reproduces the naive contradiction and
certifies that contextual trust blocks it
"""
import logging
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from config import (
    BLOCK_DEPTH_SLACK, DEFAULT_DERIVE_DEPTH, MAX_FORMULAS, MAX_MODAL_DEPTH, MAX_TRACE_STEPS,
)
from managers.formula_parser import FormulaParser
from managers.inference_engine import InferenceEngine, instance_universe, rules_for
from managers.protocol_manager import ProtocolManager
from models.data_models import (
    BlockCertificate, ContradictionCertificate, DerivationTrace, FixpointComparison, Mode,
    NotDerivable, Outcome, PremiseEntry, PremiseSet, TrustRelation,
)
from models.errors import DerivationError, PhysicsVerificationError
from models.formulas import (
    PRODUCT_CONTEXT, W_CONTEXT, Agent, AgentInstance, And, Atom, Formula, Implies, Knows,
    Not, Predicate, erase_contexts, is_global_contradiction,
)
from models.kets import Projector, Subsystem, Symbol

# Canonical epochs: time sets inside one epoch describe the same epistemic subject
EPOCHS: Dict[Agent, Tuple[frozenset, ...]] = {
    Agent.F1: (frozenset({0, 1, 2}), frozenset({3}), frozenset({4})),
    Agent.F2: (frozenset({0}), frozenset({1, 2}), frozenset({3}), frozenset({4})),
    Agent.W1: (frozenset({0, 1}), frozenset({2, 3}), frozenset({4})),
    Agent.W2: (frozenset({0, 1, 2}), frozenset({3, 4})),
}

# F agents measure in the product basis, W agents in the basis containing chi
AGENT_CONTEXTS = {
    Agent.F1: PRODUCT_CONTEXT,
    Agent.F2: PRODUCT_CONTEXT,
    Agent.W1: W_CONTEXT,
    Agent.W2: W_CONTEXT,
}

P1_BODY = "K[F1@1](S1=psi) -> K[W2@4](PchiL2=0)"
P2_BODY = "K[F2@1](S2=psi) -> K[F1@0,1,2](S1=psi)"
P8_BODY = "K[W1@3](PchiL1!=0) -> K[F2@1,2](S2=psi)"

PREMISE_TEXTS: Tuple[Tuple[str, str], ...] = (
    ("prop1", f"K[F1@<3]({P1_BODY})"),
    ("prop2", f"K[F2@<3]({P2_BODY})"),
    ("prop8", f"K[W1@<4]({P8_BODY})"),
    ("prop3", f"K[F2@2]K[F1@<3]({P1_BODY})"),
    ("prop9", f"K[W1@3]K[F2@<3]({P2_BODY})"),
    ("prop10", f"K[W1@3]K[F2@2]K[F1@<3]({P1_BODY})"),
    ("prop5", f"K[W2@4]K[W1@<4]({P8_BODY})"),
    ("prop6", f"K[W2@4]K[W1@3]K[F2@<3]({P2_BODY})"),
    ("prop7", f"K[W2@4]K[W1@3]K[F2@2]K[F1@<3]({P1_BODY})"),
)

# Knowledge of the followed run (both announcements nonnull) and its announcements
FACT_TEXTS: Tuple[Tuple[str, str], ...] = (
    ("fact-s", "K[W2@3](K[W1@2,3](PchiL1!=0) & K[W2@3](PchiL2!=0))"),
    ("fact-w1", "K[W1@2,3](PchiL1!=0)"),
    ("fact-w1-to-w2", "K[W2@3]K[W1@2,3](PchiL1!=0)"),
    ("fact-w1-to-f1", "K[F1@>=3]K[W1@2,3](PchiL1!=0)"),
    ("fact-w1-to-f2", "K[F2@>=3]K[W1@2,3](PchiL1!=0)"),
    ("fact-w2-to-f1", "K[F1@4]K[W2@3](PchiL2!=0)"),
    ("fact-w2-to-f2", "K[F2@4]K[W2@3](PchiL2!=0)"),
    ("fact-w2-to-w1", "K[W1@4]K[W2@3](PchiL2!=0)"),
    ("fact-f1", "K[F1@1](S1=psi)"),
    ("fact-f2", "K[F2@1](S2=psi)"),
)

KRABRE_TEXT = "K[W2@4]K[W1@3](K[W1@3](PchiL1!=0) -> K[W2@4](PchiL2=0))"

# Per-agent waypoints and the instance that ends up holding the contradiction
VARIANTS: Tuple[Tuple[Agent, str, str, AgentInstance], ...] = (
    (Agent.F1, "prop21", "K[F1@<3]K[W2@4](PchiL2=0)", AgentInstance.at(Agent.F1, 4)),
    (Agent.F2, "prop22", "K[F2@2]K[W2@4](PchiL2=0)", AgentInstance.at(Agent.F2, 4)),
    (Agent.W1, "prop23", "K[W1@3]K[W2@4](PchiL2=0)", AgentInstance.at(Agent.W1, 4)),
)

HIERARCHY_TEXT = (("F1", "4"), ("W2", "3"), ("W1", ">=2"), ("F2", "2"), ("F1", "0,1,2"))


def canonical_instance(instance: AgentInstance) -> AgentInstance:
    """Union of the epochs an instance's times fall into"""
    times = set()
    for epoch in EPOCHS[instance.name]:
        if epoch & instance.times:
            times |= epoch
    return AgentInstance(instance.name, frozenset(times))


def _rebuild(f: Formula, instance_of, context_of) -> Formula:
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(_rebuild(f.body, instance_of, context_of))
    if isinstance(f, And):
        return And(_rebuild(f.left, instance_of, context_of), _rebuild(f.right, instance_of, context_of))
    if isinstance(f, Implies):
        return Implies(_rebuild(f.antecedent, instance_of, context_of),
                       _rebuild(f.consequent, instance_of, context_of))
    return Knows(instance_of(f.agent), _rebuild(f.body, instance_of, context_of), context_of(f.agent))


def normalize(f: Formula, mode: Mode) -> Formula:
    """Canonical epochs, plus context tags in contextual mode"""
    if mode == Mode.CONTEXTUAL:
        return _rebuild(f, canonical_instance, lambda a: AGENT_CONTEXTS[a.name])
    return _rebuild(f, canonical_instance, lambda a: None)


def tag_contexts(f: Formula) -> Formula:
    return _rebuild(f, lambda a: a, lambda a: AGENT_CONTEXTS[a.name])


def _instance(name: str, times: str) -> AgentInstance:
    bound = times.lstrip("<>=")
    if times.startswith(">="):
        span = range(int(bound), 5)
    elif times.startswith("<"):
        span = range(0, int(bound))
    else:
        span = [int(t) for t in times.split(",")]
    return canonical_instance(AgentInstance(Agent(name), frozenset(span)))


def hierarchy_pairs() -> List[Tuple[AgentInstance, AgentInstance]]:
    """F1@4 > W2@3 > W1@>=2 > F2@2 > F1@0,1,2, not transitive"""
    chain = [_instance(name, times) for name, times in HIERARCHY_TEXT]
    return list(zip(chain, chain[1:]))


def announcement_pairs() -> List[Tuple[AgentInstance, AgentInstance]]:
    """Everyone at step 4 trusts W2's announcement; everyone after step 2 trusts W1's"""
    w2 = _instance("W2", "3")
    w1 = _instance("W1", ">=2")
    pairs = [(_instance(a, "4"), w2) for a in ("F1", "F2", "W1")]
    pairs += [(_instance(a, ">=3"), w1) for a in ("F1", "F2", "W2")]
    return pairs


def self_pairs() -> List[Tuple[AgentInstance, AgentInstance]]:
    """Each agent trusts itself across all times"""
    whole = frozenset(range(5))
    return [(AgentInstance(a, whole), AgentInstance(a, whole)) for a in Agent]


def contradiction_for(instance: AgentInstance, mode: Mode) -> Formula:
    """K_a(PchiL2!=0) & !K_a(PchiL2!=0)"""
    context = AGENT_CONTEXTS[instance.name] if mode == Mode.CONTEXTUAL else None
    known = Knows(instance, Atom(Predicate.PCHI_L2_NONNULL), context)
    return And(known, Not(known))


class DerivationManager:
    """Orchestrates premise encoding and the two verdicts"""

    def __init__(self, parser: FormulaParser = None, protocol: ProtocolManager = None,
                 max_modal_depth: int = MAX_MODAL_DEPTH, max_formulas: int = MAX_FORMULAS):
        self.logger = logging.getLogger(__name__)
        self.parser = parser or FormulaParser()
        self.protocol = protocol or ProtocolManager()
        self.max_modal_depth = max_modal_depth
        self.max_formulas = max_formulas
        self._premise_cache: Dict[Mode, PremiseSet] = {}

    # Premises

    def timeline_table(self) -> List[Tuple[str, str]]:
        rows = []
        for agent, epochs in EPOCHS.items():
            rows.append((agent.value, " | ".join(
                str(AgentInstance(agent, epoch)).split("@")[1] for epoch in epochs
            )))
        return rows

    def trust_relation(self, mode: Mode) -> TrustRelation:
        pairs = frozenset(hierarchy_pairs() + announcement_pairs() + self_pairs())
        contexts = AGENT_CONTEXTS if mode == Mode.CONTEXTUAL else {}
        return TrustRelation(pairs, mode, dict(contexts))

    def verify_premise_physics(self) -> List[Tuple[str, bool]]:
        """
        Check the quantum content behind the premises in the exact model

        Returns:
            (claim, passed) for each checked statement
        """
        engine = self.protocol.engine
        state = self.protocol.build_global_state()
        chi_l2 = self.protocol.chi_projector("L2")
        claims = []

        branch = self.protocol.branch_state(Symbol.PSI)
        claims.append((
            "prop1: in the F1=psi branch L2 is orthogonal to chi",
            engine.born_probability(chi_l2, branch).is_zero(),
        ))
        s1 = state.roster.index(Subsystem.S1)
        s2 = state.roster.index(Subsystem.S2)
        claims.append((
            "prop2: S2=psi only occurs with S1=psi",
            all(key[s1] == Symbol.PSI for key in state.amplitudes if key[s2] == Symbol.PSI),
        ))
        conditional = self.protocol.conditional_f2_given_w1(Outcome.NONNULL)
        claims.append((
            "prop8: PchiL1!=0 makes S2=psi certain",
            conditional[Symbol.PSI] == 1,
        ))
        halting = self.protocol.halting_probability()
        claims.append((
            "scenario s: both nonnull has probability 1/12",
            halting == Fraction(1, 12),
        ))
        product = self.protocol.product_projectors("L1")
        w_projectors = [Projector((k,)) for k in self.protocol.w_basis("L1")]
        lab_basis = [p.span[0] for p in product]
        claims.append((
            "contexts C1 and C2 do not commute",
            any(not engine.projectors_commute(p, q, lab_basis) for p in product for q in w_projectors),
        ))
        for claim, passed in claims:
            self.logger.info(f"Physics check {'passed' if passed else 'FAILED'}: {claim}")
        return claims

    def encode_premises(self, mode: Mode) -> PremiseSet:
        """
        Parse, normalize and tag the protocol premises and run facts

        Raises:
            PhysicsVerificationError: if a premise misstates the exact model
        """
        if mode in self._premise_cache:
            return self._premise_cache[mode]
        failed = [claim for claim, passed in self.verify_premise_physics() if not passed]
        if failed:
            self.logger.error(f"Premise physics failed: {failed}")
            raise PhysicsVerificationError("; ".join(failed))

        def entry(source: str, text: str, tautology: bool) -> PremiseEntry:
            literal = self.parser.parse(text)
            display = tag_contexts(literal) if mode == Mode.CONTEXTUAL else literal
            return PremiseEntry(source, display, normalize(literal, mode), tautology)

        premises = PremiseSet(
            mode,
            [entry(source, text, True) for source, text in PREMISE_TEXTS],
            self.trust_relation(mode),
            [entry(source, text, False) for source, text in FACT_TEXTS],
        )
        self.logger.info(
            f"Encoded {len(premises.entries)} premises and {len(premises.facts)} facts ({mode.value})"
        )
        self._premise_cache[mode] = premises
        return premises

    def material_diff(self) -> List[Formula]:
        """Formulas on which the two modes differ once context tags are erased"""
        naive = self.encode_premises(Mode.NAIVE)
        contextual = self.encode_premises(Mode.CONTEXTUAL)
        left = [e.formula for e in naive.entries + naive.facts]
        right = [erase_contexts(e.formula) for e in contextual.entries + contextual.facts]
        return [f for f in left if f not in right] + [f for f in right if f not in left]

    def krabre(self, mode: Mode) -> Formula:
        return normalize(self.parser.parse(KRABRE_TEXT), mode)

    def _engine(self, premises: PremiseSet) -> InferenceEngine:
        formulas = premises.formulas + [f.formula for f in premises.facts]
        return InferenceEngine(
            premises.trust,
            rules_for(premises.mode, fr=True),
            tautologies=premises.tautologies,
            universe=instance_universe(formulas, premises.trust),
            max_modal_depth=self.max_modal_depth,
            max_formulas=self.max_formulas,
        )

    # Verdicts

    def reproduce_contradiction(self, depth: int = DEFAULT_DERIVE_DEPTH) -> ContradictionCertificate:
        """
        Naive trust: W2 reaches K(PchiL2!=0) & !K(PchiL2!=0) through krabre

        Raises:
            DerivationError: if the contradiction is not found
        """
        premises = self.encode_premises(Mode.NAIVE)
        agent = _instance("W2", "3")
        waypoint = self.krabre(Mode.NAIVE)
        return self._certify(premises, agent, [waypoint], depth)

    def reproduce_agent_variants(self, depth: int = DEFAULT_DERIVE_DEPTH) -> List[ContradictionCertificate]:
        """One certificate each for F1, F2 and W1"""
        premises = self.encode_premises(Mode.NAIVE)
        certificates = []
        for agent, source, text, holder in VARIANTS:
            waypoint = normalize(self.parser.parse(text), Mode.NAIVE)
            self.logger.info(f"Deriving the {agent.value} variant through {source}")
            certificates.append(self._certify(premises, canonical_instance(holder), [waypoint], depth))
        return certificates

    def variant_for(self, agent: Agent, depth: int = DEFAULT_DERIVE_DEPTH) -> ContradictionCertificate:
        if agent == Agent.W2:
            return self.reproduce_contradiction(depth)
        for name, _source, text, holder in VARIANTS:
            if name == agent:
                premises = self.encode_premises(Mode.NAIVE)
                waypoint = normalize(self.parser.parse(text), Mode.NAIVE)
                return self._certify(premises, canonical_instance(holder), [waypoint], depth)
        raise DerivationError(f"no variant for agent {agent.value}")

    def _certify(self, premises: PremiseSet, agent: AgentInstance,
                 waypoints: Sequence[Formula], depth: int) -> ContradictionCertificate:
        engine = self._engine(premises)
        goal = contradiction_for(agent, premises.mode)
        result = engine.derive_staged(
            premises.formulas, [f.formula for f in premises.facts], waypoints, goal, depth
        )
        if isinstance(result, NotDerivable):
            self.logger.error(f"No contradiction for {agent} within {depth} rounds")
            raise DerivationError(f"contradiction for {agent} not derivable within depth {depth}")
        engine.check_trace(result, strict=True)
        if len(result) > MAX_TRACE_STEPS:
            self.logger.error(f"Trace for {agent} has {len(result)} steps")
            raise DerivationError(
                f"trace for {agent} has {len(result)} steps, more than {MAX_TRACE_STEPS}"
            )
        self.logger.info(f"Contradiction certificate for {agent}: {len(result)} steps")
        return ContradictionCertificate(result, agent, tuple(waypoints))

    def certify_block(self, depth: int = DEFAULT_DERIVE_DEPTH) -> BlockCertificate:
        """
        Contextual trust: close the premises and confirm that neither a
        global contradiction nor krabre appears

        Raises:
            DerivationError: if the contextual closure finds a contradiction
                or stops short of a fixpoint
        """
        naive = self.encode_premises(Mode.NAIVE)
        naive_engine = self._engine(naive)
        naive_result = naive_engine.derive(
            naive.formulas + [f.formula for f in naive.facts], is_global_contradiction, depth
        )
        if isinstance(naive_result, NotDerivable):
            raise DerivationError("naive premises yield no contradiction")
        naive_depth = naive_engine.last_rounds

        contextual = self.encode_premises(Mode.CONTEXTUAL)
        engine = self._engine(contextual)
        bound = max(depth, naive_depth + BLOCK_DEPTH_SLACK)
        result = engine.derive(
            contextual.formulas + [f.formula for f in contextual.facts], is_global_contradiction, bound
        )
        if isinstance(result, DerivationTrace):
            self.logger.critical(f"Contextual premises derive {result.final}")
            raise DerivationError(f"contextual premises derive a contradiction: {result.final}")
        if not result.fixpoint:
            raise DerivationError(f"contextual closure did not reach a fixpoint within {bound} rounds")
        erased = {erase_contexts(f) for f in result.formulas}
        excluded = (self.krabre(Mode.CONTEXTUAL),)
        if self.krabre(Mode.NAIVE) in erased:
            raise DerivationError("contextual closure reduces to krabre")
        self.logger.info(
            f"BLOCKED at fixpoint: {result.size} formulas after {result.rounds} rounds"
        )
        return BlockCertificate(result, bound, naive_depth, excluded)

    def compare_fixpoints(self, depth: int = DEFAULT_DERIVE_DEPTH) -> FixpointComparison:
        """Inclusion of the contextual fixpoint in the naive one"""
        naive = self.encode_premises(Mode.NAIVE)
        contextual = self.encode_premises(Mode.CONTEXTUAL)
        naive_set, _, naive_fixpoint = self._engine(naive).closure(
            naive.formulas + [f.formula for f in naive.facts], depth
        )
        contextual_set, _, contextual_fixpoint = self._engine(contextual).closure(
            contextual.formulas + [f.formula for f in contextual.facts], depth
        )
        missing = tuple(sorted(
            {erase_contexts(f) for f in contextual_set} - naive_set
        ))
        return FixpointComparison(
            len(naive_set), len(contextual_set), naive_fixpoint, contextual_fixpoint, missing
        )

    def trust_steps(self, trace: DerivationTrace) -> List[str]:
        """Pairs cited by the trust steps of a trace"""
        return [s.detail for s in trace.steps if s.rule in ("trust", "contextual-trust")]

    def scenario_is_reachable(self) -> bool:
        """The followed run has nonzero probability"""
        return any(
            s.halts and s.f1_outcome == Symbol.PSI and s.f2_outcome == Symbol.PSI
            and not s.probability.is_zero()
            for s in self.protocol.enumerate_scenarios()
        )
