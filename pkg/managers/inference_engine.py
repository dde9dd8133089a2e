"""
Inference engine for the FR logic checker
Forward chaining over the epistemic axioms with checkable derivation traces
"""
import logging
from collections import defaultdict
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from config import MAX_FORMULAS, MAX_MODAL_DEPTH
from models.data_models import (
    DerivationStep, DerivationTrace, Mode, NotDerivable, TrustRelation,
)
from models.errors import ContextError, SearchAborted, TraceError
from models.formulas import (
    AgentInstance, And, Formula, Implies, Knows, Not, agents_in, complementary,
    is_literal, prefix_signature, split_prefixes, wrap,
)

PREMISE = "premise"
DISTRIBUTION = "distribution"
SYLLOGISM = "syllogism"
GENERALIZATION = "generalization"
INTROSPECTION = "introspection"
NEGATIVE_INTROSPECTION = "negative-introspection"
TRUST = "trust"
TIME_RESTRICT = "time-restrict"
RECALL = "recall"
AND_ELIM_LEFT = "and-elim-left"
AND_ELIM_RIGHT = "and-elim-right"
K_AND_MERGE = "k-and-merge"
CONDITION_S = "condition-s"
CONTEXTUAL_TRUST = "contextual-trust"
CONTEXTUAL_DISTRIBUTION = "contextual-distribution"
CONTEXTUAL_SYLLOGISM = "contextual-syllogism"

UNARY_RULES = (
    TRUST, CONTEXTUAL_TRUST, TIME_RESTRICT, RECALL, AND_ELIM_LEFT, AND_ELIM_RIGHT,
    INTROSPECTION, NEGATIVE_INTROSPECTION, CONDITION_S, GENERALIZATION,
)
BINARY_RULES = (
    DISTRIBUTION, CONTEXTUAL_DISTRIBUTION, SYLLOGISM, CONTEXTUAL_SYLLOGISM, K_AND_MERGE,
)

NAIVE_RULES = (
    DISTRIBUTION, SYLLOGISM, TRUST, TIME_RESTRICT, RECALL, AND_ELIM_LEFT, AND_ELIM_RIGHT,
    INTROSPECTION, NEGATIVE_INTROSPECTION, GENERALIZATION, K_AND_MERGE, CONDITION_S,
)
CONTEXTUAL_RULES = (
    CONTEXTUAL_DISTRIBUTION, CONTEXTUAL_SYLLOGISM, CONTEXTUAL_TRUST, TIME_RESTRICT, RECALL,
    AND_ELIM_LEFT, AND_ELIM_RIGHT, INTROSPECTION, NEGATIVE_INTROSPECTION, GENERALIZATION,
    K_AND_MERGE, CONDITION_S,
)
# Announcement closures are given explicitly, so the FR search does not generate them
FR_EXCLUDED = (GENERALIZATION, NEGATIVE_INTROSPECTION)

Goal = Union[Formula, Callable[[Formula], bool]]


def rules_for(mode: Mode, fr: bool = False) -> Tuple[str, ...]:
    rules = CONTEXTUAL_RULES if mode == Mode.CONTEXTUAL else NAIVE_RULES
    if fr:
        rules = tuple(r for r in rules if r not in FR_EXCLUDED)
    return rules


def condition_s_lift(f: Formula) -> Optional[Formula]:
    """
    Turn a local contradiction K_a(p & q), p and q complementary, into
    the global one K_a(p) & !K_a(p)
    """
    if not isinstance(f, Knows) or not isinstance(f.body, And):
        return None
    kept = complementary(f.body.left, f.body.right)
    if kept is None:
        return None
    known = Knows(f.agent, kept, f.context)
    return And(known, Not(known))


def instance_universe(formulas: Iterable[Formula], trust: TrustRelation) -> List[AgentInstance]:
    """Agent instances named by the formulas or by the trust pairs"""
    seen = []
    for f in formulas:
        for agent in agents_in(f):
            if agent not in seen:
                seen.append(agent)
    for truster, trusted in sorted(trust.pairs, key=lambda p: (str(p[0]), str(p[1]))):
        for agent in (truster, trusted):
            if agent not in seen:
                seen.append(agent)
    return sorted(seen, key=lambda a: (a.name.value, sorted(a.times)))


def _uniform_context(f: Formula, context) -> bool:
    return all(node.context == context for node in f.walk() if isinstance(node, Knows))


def _core(f: Formula) -> tuple:
    """Syllogism middle key: a knowledge claim up to its time set"""
    if isinstance(f, Knows):
        return ("K", f.agent.name, f.context, f.body)
    return ("F", f)


def _middle_matches(y: Formula, y_prime: Formula) -> bool:
    """Y entails Y': equal, or the same claim known over a narrower time set"""
    if y == y_prime:
        return True
    return (isinstance(y, Knows) and isinstance(y_prime, Knows)
            and _core(y) == _core(y_prime) and y_prime.agent.times <= y.agent.times)


# Rule schemas

def _trust(f: Formula, trust: TrustRelation, contextual: bool) -> List[Tuple[Formula, str]]:
    out = []
    for prefix, body in split_prefixes(f):
        if not (isinstance(body, Knows) and isinstance(body.body, Knows)):
            continue
        outer, inner = body, body.body
        if contextual and (outer.context is None or outer.context != inner.context):
            continue
        pair = trust.pair_for(outer, inner)
        if pair is None:
            continue
        conclusion = wrap(prefix, Knows(outer.agent, inner.body, outer.context))
        out.append((conclusion, f"{pair[0]} > {pair[1]}"))
    return out


def _retime(f: Formula, targets: Sequence[AgentInstance], accept) -> List[Tuple[Formula, str]]:
    out = []
    for prefix, body in split_prefixes(f):
        if not isinstance(body, Knows):
            continue
        for target in targets:
            if target.name == body.agent.name and accept(body.agent.times, target.times):
                conclusion = wrap(prefix, Knows(target, body.body, body.context))
                out.append((conclusion, f"{body.agent} => {target}"))
    return out


def _and_elim(f: Formula, left: bool) -> List[Tuple[Formula, str]]:
    out = []
    for prefix, body in split_prefixes(f):
        if isinstance(body, And):
            out.append((wrap(prefix, body.left if left else body.right), ""))
    return out


def _distribution(fact: Formula, rule: Formula, contextual: bool) -> List[Formula]:
    out = []
    for prefix, body in split_prefixes(rule):
        if not prefix or not isinstance(body, Implies):
            continue
        if contextual and not _uniform_context(body.antecedent, prefix[-1].context):
            continue
        if fact == wrap(prefix, body.antecedent):
            out.append(wrap(prefix, body.consequent))
    return out


def _syllogism(first: Formula, second: Formula, contextual: bool) -> List[Formula]:
    out = []
    second_splits = {prefix_signature(p): (p, b) for p, b in split_prefixes(second) if p}
    for prefix, body in split_prefixes(first):
        if not prefix or not isinstance(body, Implies):
            continue
        match = second_splits.get(prefix_signature(prefix))
        if match is None or not isinstance(match[1], Implies):
            continue
        other = match[1]
        if not _middle_matches(body.consequent, other.antecedent):
            continue
        if contextual and not _uniform_context(body.consequent, prefix[-1].context):
            continue
        out.append(wrap(prefix, Implies(body.antecedent, other.consequent)))
    return out


def _merge(f: Formula, g: Formula) -> Optional[Formula]:
    if not (isinstance(f, Knows) and isinstance(g, Knows)) or not f.same_operator(g):
        return None
    if not (is_literal(f.body) and is_literal(g.body)) or f.body == g.body:
        return None
    return Knows(f.agent, And(f.body, g.body), f.context)


def conclusions(rule: str, premises: Sequence[Formula], trust: TrustRelation,
                targets: Sequence[AgentInstance] = (),
                tautologies: Iterable[Formula] = ()) -> List[Formula]:
    """
    Every conclusion a rule yields from an ordered premise list

    Args:
        rule: Rule id
        premises: One formula for unary rules, two for binary rules
        trust: Trust relation for the trust rules
        targets: Candidate instances for time-restrict, recall and generalization
        tautologies: Formulas registered for generalization
    """
    return [c for c, _ in _conclusions_with_detail(rule, premises, trust, targets, tautologies)]


def _conclusions_with_detail(rule, premises, trust, targets, tautologies) -> List[Tuple[Formula, str]]:
    if rule in UNARY_RULES:
        if len(premises) != 1:
            return []
        f = premises[0]
        if rule in (TRUST, CONTEXTUAL_TRUST):
            return _trust(f, trust, rule == CONTEXTUAL_TRUST)
        if rule == TIME_RESTRICT:
            return _retime(f, targets, lambda old, new: new < old)
        if rule == RECALL:
            return _retime(f, targets, lambda old, new: min(new) > max(old))
        if rule in (AND_ELIM_LEFT, AND_ELIM_RIGHT):
            return _and_elim(f, rule == AND_ELIM_LEFT)
        if rule == INTROSPECTION:
            return [(Knows(f.agent, f, f.context), "")] if isinstance(f, Knows) else []
        if rule == NEGATIVE_INTROSPECTION:
            if isinstance(f, Not) and isinstance(f.body, Knows):
                return [(Knows(f.body.agent, f, f.body.context), "")]
            return []
        if rule == CONDITION_S:
            lifted = condition_s_lift(f)
            return [(lifted, "")] if lifted is not None else []
        if rule == GENERALIZATION:
            if f not in set(tautologies):
                return []
            return [(Knows(t, f, trust.context_for(t.name)), "") for t in targets]
    if rule in BINARY_RULES:
        if len(premises) != 2:
            return []
        f, g = premises
        if rule in (DISTRIBUTION, CONTEXTUAL_DISTRIBUTION):
            return [(c, "") for c in _distribution(f, g, rule == CONTEXTUAL_DISTRIBUTION)]
        if rule in (SYLLOGISM, CONTEXTUAL_SYLLOGISM):
            return [(c, "") for c in _syllogism(f, g, rule == CONTEXTUAL_SYLLOGISM)]
        if rule == K_AND_MERGE:
            merged = _merge(f, g)
            return [(merged, "")] if merged is not None else []
    return []


def apply_rule(rule: str, premises: Sequence[Formula], trust: TrustRelation,
               targets: Sequence[AgentInstance] = (),
               tautologies: Iterable[Formula] = ()) -> Optional[Formula]:
    """First conclusion of the rule, or None when the schema does not match"""
    found = conclusions(rule, premises, trust, targets, tautologies)
    return found[0] if found else None


def check_trace(trace: DerivationTrace, trust: TrustRelation,
                tautologies: Iterable[Formula] = (), strict: bool = False) -> bool:
    """
    Replay every step of a trace through its rule

    Args:
        trace: Trace to check
        trust: Trust relation the trace was built under
        tautologies: Registered generalization premises
        strict: Raise TraceError on the first failing step instead of returning False
    """
    tautologies = list(tautologies)
    for index, step in enumerate(trace.steps):
        problem = None
        if any(p < 0 or p >= index for p in step.premises):
            problem = f"step {index} cites a premise that does not precede it"
        elif step.rule != PREMISE:
            premises = [trace.steps[p].conclusion for p in step.premises]
            targets = agents_in(step.conclusion)
            if step.conclusion not in conclusions(step.rule, premises, trust, targets, tautologies):
                problem = f"step {index} does not follow by {step.rule}: {step.conclusion}"
        if problem:
            if strict:
                raise TraceError(problem, index)
            return False
    return True


class InferenceEngine:
    """Forward chaining to a fixpoint, a goal or a round bound"""

    def __init__(self, trust: TrustRelation, rules: Sequence[str] = None,
                 tautologies: Iterable[Formula] = (), universe: Sequence[AgentInstance] = None,
                 max_modal_depth: int = MAX_MODAL_DEPTH, max_formulas: int = MAX_FORMULAS):
        self.logger = logging.getLogger(__name__)
        self.trust = trust
        self.rules = tuple(rules) if rules is not None else rules_for(trust.mode)
        self.tautologies = list(tautologies)
        self.universe = list(universe) if universe is not None else None
        self.max_modal_depth = max_modal_depth
        self.max_formulas = max_formulas
        self.last_rounds = 0

    # Public operations

    def closure(self, premises: Sequence[Formula], depth: int) -> Tuple[frozenset, int, bool]:
        """
        Close the premises under the rule set

        Returns:
            (formula set, rounds run, whether a fixpoint was reached)
        """
        search = _Search(self, premises)
        rounds, fixpoint = search.run(depth, None)
        return frozenset(search.known), rounds, fixpoint

    def derive(self, premises: Sequence[Formula], goal: Goal,
               depth: int) -> Union[DerivationTrace, NotDerivable]:
        """
        Search for a goal formula, or for any formula matching a predicate

        Returns:
            Trace of the goal's ancestors, or NotDerivable with the closed set

        Raises:
            SearchAborted: when the formula cap is exceeded
        """
        if depth < 1:
            raise ValueError("depth must be at least 1")
        matcher = goal if callable(goal) else (lambda f, g=goal: f == g)
        search = _Search(self, premises)
        rounds, fixpoint = search.run(depth, matcher)
        self.last_rounds = rounds
        if search.found is not None:
            trace = search.trace_to(search.found)
            self.logger.info(f"Derived {search.found} in {len(trace)} steps ({rounds} rounds)")
            return trace
        self.logger.info(
            f"Goal not derivable: {len(search.known)} formulas, {rounds} rounds, fixpoint={fixpoint}"
        )
        return NotDerivable(depth, rounds, fixpoint, frozenset(search.known))

    def derive_staged(self, premises: Sequence[Formula], facts: Sequence[Formula],
                      waypoints: Sequence[Formula], goal: Goal,
                      depth: int) -> Union[DerivationTrace, NotDerivable]:
        """
        Derive each waypoint in turn, then the goal

        The first stage starts from premises and facts; each later stage
        starts from the facts and the waypoint just reached, so the joined
        trace passes through every waypoint.
        """
        trace = DerivationTrace()
        index: Dict[Formula, int] = {}
        inputs = list(premises) + [f for f in facts if f not in premises]
        for target in list(waypoints) + [goal]:
            result = self.derive(inputs, target, depth)
            if isinstance(result, NotDerivable):
                return result
            self._join(trace, index, result)
            inputs = list(facts) + [result.final]
        return trace

    def check_trace(self, trace: DerivationTrace, strict: bool = False) -> bool:
        return check_trace(trace, self.trust, self.tautologies, strict)

    # Internals

    def _join(self, trace: DerivationTrace, index: Dict[Formula, int], stage: DerivationTrace):
        local = {}
        for position, step in enumerate(stage.steps):
            if step.conclusion in index:
                local[position] = index[step.conclusion]
                continue
            premises = tuple(local[p] for p in step.premises)
            local[position] = trace.add(DerivationStep(step.conclusion, step.rule, premises, step.detail))
            index[step.conclusion] = local[position]


class _Search:
    """One forward-chaining run with its indexes"""

    def __init__(self, engine: InferenceEngine, premises: Sequence[Formula]):
        self.engine = engine
        self.trust = engine.trust
        self.rules = engine.rules
        self.contextual = engine.trust.mode == Mode.CONTEXTUAL
        if self.contextual:
            for f in premises:
                if not _fully_tagged(f):
                    raise ContextError(f"untagged knowledge operator in contextual mode: {f}")
        self.universe = (engine.universe if engine.universe is not None
                         else instance_universe(premises, engine.trust))
        self.known: Dict[Formula, Tuple[str, Tuple[Formula, ...], str]] = {}
        self.found: Optional[Formula] = None
        self.matcher = None
        self.frontier: List[Formula] = []
        self.by_split: Dict[tuple, Formula] = {}
        self.by_antecedent = defaultdict(list)
        self.by_middle_first = defaultdict(list)
        self.by_middle_second = defaultdict(list)
        self.literals = defaultdict(list)
        self.premises = list(premises)
        self.rounds = 0

    def run(self, depth: int, matcher) -> Tuple[int, bool]:
        self.matcher = matcher
        for f in self.premises:
            self._add(f, PREMISE, (), "")
            if self.found is not None:
                return 0, False
        rounds = 0
        while rounds < depth:
            rounds += 1
            self.rounds = rounds
            frontier, self.frontier = self.frontier, []
            for f in frontier:
                self._expand(f)
                if self.found is not None:
                    return rounds, False
            self.engine.logger.debug(
                f"Round {rounds}: {len(self.frontier)} new, {len(self.known)} total"
            )
            if not self.frontier:
                return rounds, True
        return rounds, False

    def _add(self, f: Formula, rule: str, premises: Tuple[Formula, ...], detail: str):
        if f in self.known or self.found is not None:
            return
        if rule != PREMISE and f.modal_depth > self.engine.max_modal_depth:
            return
        self.known[f] = (rule, premises, detail)
        if len(self.known) > self.engine.max_formulas:
            raise SearchAborted(
                f"search aborted after {len(self.known)} formulas", len(self.known), self.rounds
            )
        self._index(f)
        self.frontier.append(f)
        if self.matcher is not None and self.matcher(f):
            self.found = f

    def _index(self, f: Formula):
        for prefix, body in split_prefixes(f):
            if not prefix:
                continue
            signature = prefix_signature(prefix)
            self.by_split.setdefault((signature, body), f)
            if isinstance(body, Implies):
                self.by_antecedent[(signature, body.antecedent)].append(f)
                self.by_middle_first[(signature, _core(body.consequent))].append(f)
                self.by_middle_second[(signature, _core(body.antecedent))].append(f)
        if isinstance(f, Knows) and is_literal(f.body):
            self.literals[(f.agent, f.context)].append(f)

    def _expand(self, f: Formula):
        for rule in self.rules:
            if rule in UNARY_RULES:
                for conclusion, detail in _conclusions_with_detail(
                        rule, [f], self.trust, self.universe, self.engine.tautologies):
                    self._add(conclusion, rule, (f,), detail)
            elif rule in (DISTRIBUTION, CONTEXTUAL_DISTRIBUTION):
                self._expand_distribution(f, rule)
            elif rule in (SYLLOGISM, CONTEXTUAL_SYLLOGISM):
                self._expand_syllogism(f, rule)
            elif rule == K_AND_MERGE:
                self._expand_merge(f)

    def _expand_distribution(self, f: Formula, rule: str):
        contextual = rule == CONTEXTUAL_DISTRIBUTION
        for prefix, body in split_prefixes(f):
            if not prefix:
                continue
            signature = prefix_signature(prefix)
            # f as the implication
            if isinstance(body, Implies):
                fact = self.by_split.get((signature, body.antecedent))
                if fact is not None:
                    for c in _distribution(fact, f, contextual):
                        self._add(c, rule, (fact, f), "")
            # f as the antecedent fact
            for implication in list(self.by_antecedent.get((signature, body), ())):
                for c in _distribution(f, implication, contextual):
                    self._add(c, rule, (f, implication), "")

    def _expand_syllogism(self, f: Formula, rule: str):
        contextual = rule == CONTEXTUAL_SYLLOGISM
        for prefix, body in split_prefixes(f):
            if not prefix or not isinstance(body, Implies):
                continue
            signature = prefix_signature(prefix)
            for second in list(self.by_middle_second.get((signature, _core(body.consequent)), ())):
                for c in _syllogism(f, second, contextual):
                    self._add(c, rule, (f, second), "")
            for first in list(self.by_middle_first.get((signature, _core(body.antecedent)), ())):
                for c in _syllogism(first, f, contextual):
                    self._add(c, rule, (first, f), "")

    def _expand_merge(self, f: Formula):
        if not (isinstance(f, Knows) and is_literal(f.body)):
            return
        for other in list(self.literals.get((f.agent, f.context), ())):
            merged = _merge(other, f)
            if merged is not None:
                self._add(merged, K_AND_MERGE, (other, f), "")

    def trace_to(self, goal: Formula) -> DerivationTrace:
        """Ancestors of the goal in derivation order"""
        needed = set()
        stack = [goal]
        while stack:
            f = stack.pop()
            if f in needed:
                continue
            needed.add(f)
            stack.extend(self.known[f][1])
        trace = DerivationTrace()
        positions: Dict[Formula, int] = {}
        for f, (rule, premises, detail) in self.known.items():
            if f in needed:
                step = DerivationStep(f, rule, tuple(positions[p] for p in premises), detail)
                positions[f] = trace.add(step)
        return trace


def _fully_tagged(f: Formula) -> bool:
    return all(node.context is not None for node in f.walk() if isinstance(node, Knows))
