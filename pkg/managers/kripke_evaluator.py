"""
Kripke evaluator for the FR logic checker
Builds the scenario model and evaluates formulas over it
"""
import itertools
import logging
from typing import Dict, Iterable, List, Optional, Set, Tuple

from models.data_models import KripkeModel, Outcome, Scenario
from models.errors import EvaluationError
from models.formulas import (
    MAX_TIME, Agent, AgentInstance, And, Atom, Formula, Implies, Knows, Not, Predicate,
)
from models.kets import Symbol


def all_atoms() -> List[Atom]:
    atoms = []
    for predicate in Predicate:
        if predicate.takes_value:
            atoms.extend(Atom(predicate, value) for value in (Symbol.PHI, Symbol.PSI))
        else:
            atoms.append(Atom(predicate))
    return atoms


def all_instances() -> List[AgentInstance]:
    """Every agent at every nonempty time set"""
    times = range(MAX_TIME + 1)
    instances = []
    for agent in Agent:
        for size in range(1, len(times) + 1):
            for subset in itertools.combinations(times, size):
                instances.append(AgentInstance(agent, frozenset(subset)))
    return instances


def atom_holds(scenario: Scenario, atom: Atom) -> bool:
    predicate = atom.predicate
    if predicate == Predicate.S1_EQ:
        return scenario.f1_outcome == atom.value
    if predicate == Predicate.S2_EQ:
        return scenario.f2_outcome == atom.value
    if predicate == Predicate.PCHI_L1_NONNULL:
        return scenario.w1_outcome == Outcome.NONNULL
    if predicate == Predicate.PCHI_L1_NULL:
        return scenario.w1_outcome == Outcome.NULL
    if predicate == Predicate.PCHI_L2_NONNULL:
        return scenario.w2_outcome == Outcome.NONNULL
    return scenario.w2_outcome == Outcome.NULL


def own_outcome(agent: Agent, scenario: Scenario):
    return {
        Agent.F1: scenario.f1_outcome,
        Agent.F2: scenario.f2_outcome,
        Agent.W1: scenario.w1_outcome,
        Agent.W2: scenario.w2_outcome,
    }[agent]


class KripkeEvaluator:
    """Scenario model construction and the satisfaction relation"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def build_scenario_model(self, scenarios: List[Scenario],
                             instances: Optional[Iterable[AgentInstance]] = None) -> KripkeModel:
        """
        Kripke model over outcome scenarios

        Args:
            scenarios: States of the model
            instances: Agent instances to relate; every instance by default

        Returns:
            Model whose R_i links states agreeing on agent i's own outcome
        """
        interpretation: Dict[Tuple[Scenario, Atom], bool] = {}
        for state in scenarios:
            for atom in all_atoms():
                interpretation[(state, atom)] = atom_holds(state, atom)

        relations: Dict[Agent, Set[Tuple[Scenario, Scenario]]] = {}
        for agent in Agent:
            relations[agent] = {
                (s, t) for s in scenarios for t in scenarios
                if own_outcome(agent, s) == own_outcome(agent, t)
            }
        access = {
            instance: relations[instance.name]
            for instance in (instances if instances is not None else all_instances())
        }
        self.logger.debug(f"Scenario model: {len(scenarios)} states, {len(access)} relations")
        return KripkeModel(list(scenarios), interpretation, access)

    def evaluate(self, model: KripkeModel, state: Scenario, formula: Formula) -> bool:
        """
        Satisfaction of a formula at a state

        Atoms are read from the interpretation, connectives classically with
        a -> b as !a | b, and K_i f holds when f holds at every R_i-successor.

        Raises:
            EvaluationError: on an atom or agent relation missing from the model
        """
        if isinstance(formula, Atom):
            try:
                return model.interpretation[(state, formula)]
            except KeyError:
                raise EvaluationError(f"no interpretation for {formula} at {state.label}")
        if isinstance(formula, Not):
            return not self.evaluate(model, state, formula.body)
        if isinstance(formula, And):
            return (self.evaluate(model, state, formula.left)
                    and self.evaluate(model, state, formula.right))
        if isinstance(formula, Implies):
            return (not self.evaluate(model, state, formula.antecedent)
                    or self.evaluate(model, state, formula.consequent))
        if isinstance(formula, Knows):
            if formula.agent not in model.access:
                raise EvaluationError(f"no accessibility relation for {formula.agent}")
            return all(
                self.evaluate(model, successor, formula.body)
                for successor in model.successors(formula.agent, state)
            )
        raise EvaluationError(f"cannot evaluate {formula!r}")

    def holds_everywhere(self, model: KripkeModel, formula: Formula) -> bool:
        return all(self.evaluate(model, s, formula) for s in model.states)
