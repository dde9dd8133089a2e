"""
Protocol manager for the FR logic checker
Encodes the extended Wigner's-friend protocol as an exact branch structure,
computes outcome distributions and samples repeated rounds
"""
import bisect
import logging
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from managers.quantum_engine import QuantumEngine
from models.data_models import Action, Outcome, ProtocolStep, Scenario, TrialRecord
from models.field_element import FieldElement
from models.formulas import Agent
from models.kets import BasisLabel, Ket, Projector, Subsystem, Symbol, product_basis

SQRT_HALF = FieldElement(b=Fraction(1, 2))       # 1/sqrt2
SQRT_THIRD = FieldElement(c=Fraction(1, 3))      # 1/sqrt3
SQRT_TWO_THIRDS = FieldElement(d=Fraction(1, 3))  # sqrt(2/3)
HALF = FieldElement(Fraction(1, 2))

LABS = {
    "L1": (Subsystem.S1, Subsystem.F1),
    "L2": (Subsystem.S2, Subsystem.F2),
}

# measurement as isometry: outcome phi is recorded as xi, psi as zeta
RECORD = {Symbol.PHI: Symbol.XI, Symbol.PSI: Symbol.ZETA}

UNIFORM_RANGE = 2 ** 64


def lab_ket(lab: str, system: Symbol, memory: Symbol) -> Ket:
    s, f = LABS[lab]
    return Ket.basis([BasisLabel(s, system), BasisLabel(f, memory)])


class ProtocolManager:
    """Exact model of one protocol round and its repetitions"""

    def __init__(self, engine: QuantumEngine = None):
        self.engine = engine or QuantumEngine()
        self.logger = logging.getLogger(__name__)
        self._global_state: Optional[Ket] = None

    def protocol_steps(self) -> List[ProtocolStep]:
        """The canonical timeline of one round"""
        return [
            ProtocolStep(0, Agent.F1, Action.PREPARE_MEASURE_SEND,
                         "F1 prepares S1, measures it in {phi, psi} and sends S2 to L2"),
            ProtocolStep(1, Agent.F2, Action.MEASURE_RECORD,
                         "F2 measures S2 in {phi, psi} and keeps the record"),
            ProtocolStep(2, Agent.W1, Action.MEASURE_ANNOUNCE,
                         "W1 measures L1 with P_chi and announces the outcome"),
            ProtocolStep(3, Agent.W2, Action.MEASURE_ANNOUNCE,
                         "W2 measures L2 with P_chi and announces the outcome"),
            ProtocolStep(4, None, Action.HALT_CHECK,
                         "halt if both announcements are nonnull, otherwise repeat"),
        ]

    # State preparation

    def _record(self, state: Ket, system: Subsystem, memory: Subsystem) -> Ket:
        """Isometry correlating a fresh memory with a system's basis outcome"""
        position = state.roster.index(system)
        return Ket(state.roster + (memory,), {
            key + (RECORD[key[position]],): amplitude
            for key, amplitude in state.amplitudes.items()
        })

    def _sent_state(self, f1_outcome: Symbol) -> Ket:
        """S2 as prepared by F1 in each branch of step 0"""
        phi = Ket.basis([BasisLabel(Subsystem.S2, Symbol.PHI)])
        if f1_outcome == Symbol.PHI:
            return phi
        psi = Ket.basis([BasisLabel(Subsystem.S2, Symbol.PSI)])
        return (phi + psi).scale(SQRT_HALF)

    def initial_state(self) -> Ket:
        """S1 = sqrt(1/3) phi + sqrt(2/3) psi"""
        return Ket((Subsystem.S1,), {
            (Symbol.PHI,): SQRT_THIRD,
            (Symbol.PSI,): SQRT_TWO_THIRDS,
        })

    def build_global_state(self) -> Ket:
        """
        Global state over (S1, F1, S2, F2) after steps 0 and 1

        Returns:
            (1/sqrt3)(phi xi phi xi + psi zeta phi xi + psi zeta psi zeta)
        """
        if self._global_state is not None:
            return self._global_state
        lab1 = self._record(self.initial_state(), Subsystem.S1, Subsystem.F1)
        state = Ket.zero(lab1.roster + (Subsystem.S2,))
        for key, amplitude in lab1.amplitudes.items():
            branch = Ket(lab1.roster, {key: amplitude})
            state = state + branch.tensor(self._sent_state(key[0]))
        state = self._record(state, Subsystem.S2, Subsystem.F2)
        if not state.is_normalized():
            raise ArithmeticError("global state lost normalization")
        self._global_state = state
        self.logger.debug(f"Global state built: {state!r}")
        return state

    def w_basis(self, lab: str) -> List[Ket]:
        """
        The super-observer basis of a lab; element 1 is chi

        Args:
            lab: 'L1' or 'L2'
        """
        phi_xi = lab_ket(lab, Symbol.PHI, Symbol.XI)
        psi_zeta = lab_ket(lab, Symbol.PSI, Symbol.ZETA)
        psi_xi = lab_ket(lab, Symbol.PSI, Symbol.XI)
        phi_zeta = lab_ket(lab, Symbol.PHI, Symbol.ZETA)
        return [
            (phi_xi + psi_zeta).scale(SQRT_HALF),
            (phi_xi - psi_zeta).scale(SQRT_HALF),
            (psi_xi + phi_zeta).scale(SQRT_HALF),
            (psi_xi - phi_zeta).scale(SQRT_HALF),
        ]

    def chi(self, lab: str) -> Ket:
        return self.w_basis(lab)[1]

    def chi_projector(self, lab: str) -> Projector:
        return Projector((self.chi(lab),))

    def chi_complement(self, lab: str) -> Projector:
        """1 - P_chi on the lab, spanned by the rest of the W basis"""
        basis = self.w_basis(lab)
        return Projector((basis[0], basis[2], basis[3]))

    def outcome_projector(self, lab: str, outcome: Outcome) -> Projector:
        if outcome == Outcome.NONNULL:
            return self.chi_projector(lab)
        return self.chi_complement(lab)

    def product_projectors(self, lab: str) -> List[Projector]:
        return [Projector((k,)) for k in product_basis(LABS[lab])]

    # Displays of the global state

    def factorization_terms(self) -> List[Ket]:
        """The three-line decomposition of the global state in W1/W2 terms"""
        a1, b1 = lab_ket("L1", Symbol.PHI, Symbol.XI), lab_ket("L1", Symbol.PSI, Symbol.ZETA)
        a2, b2 = lab_ket("L2", Symbol.PHI, Symbol.XI), lab_ket("L2", Symbol.PSI, Symbol.ZETA)
        first = (a1 + b1).tensor(a2 + b2.scale(HALF)).scale(SQRT_THIRD)
        second = (a1 - b1).tensor(a2 + b2).scale(FieldElement(c=Fraction(-1, 12)))
        third = self.chi("L1").tensor(self.chi("L2")).scale(FieldElement(c=Fraction(1, 6)))
        return [first, second, third]

    def w1_factorization_terms(self) -> List[Ket]:
        """The global state split into its chi-orthogonal part and the psi zeta psi zeta tail"""
        a1, b1 = lab_ket("L1", Symbol.PHI, Symbol.XI), lab_ket("L1", Symbol.PSI, Symbol.ZETA)
        a2, b2 = lab_ket("L2", Symbol.PHI, Symbol.XI), lab_ket("L2", Symbol.PSI, Symbol.ZETA)
        head = (a1 + b1).scale(SQRT_HALF).tensor(a2).scale(SQRT_TWO_THIRDS)
        tail = b1.tensor(b2).scale(SQRT_THIRD)
        return [head, tail]

    # Branch structure

    def lab_branch_state(self, f1_outcome: Symbol) -> Ket:
        """Normalized L2 state before W2 acts, given F1's outcome"""
        return self._record(self._sent_state(f1_outcome), Subsystem.S2, Subsystem.F2)

    def branch_state(self, f1_outcome: Symbol) -> Ket:
        """Normalized global state of one F1 branch"""
        lab1 = lab_ket("L1", f1_outcome, RECORD[f1_outcome])
        return lab1.tensor(self.lab_branch_state(f1_outcome))

    def branch_component(self, f1_outcome: Symbol) -> Ket:
        """Unnormalized L2 residual of the global state in an F1 branch"""
        lab1 = lab_ket("L1", f1_outcome, RECORD[f1_outcome])
        return self.build_global_state().partial_inner(lab1)

    def conditional_f2_given_w1(self, w1_outcome: Outcome) -> Dict[Symbol, FieldElement]:
        """
        Exact distribution of F2's record given W1's outcome

        W1 acts on L1 only, so the pair is jointly measurable.
        """
        state = self.build_global_state()
        w1 = self.outcome_projector("L1", w1_outcome)
        marginal = self.engine.born_probability(w1, state)
        conditional = {}
        for outcome in (Symbol.PHI, Symbol.PSI):
            record = Projector((Ket.basis([BasisLabel(Subsystem.S2, outcome)]),))
            joint = self.engine.born_probability(w1.tensor(record), state)
            conditional[outcome] = joint / marginal
        return conditional

    def outcome_distribution(self) -> List[Scenario]:
        """
        Exact joint distribution of the two announcements

        Returns:
            Four scenarios over (W1, W2) outcomes with friend outcomes unset
        """
        state = self.build_global_state()
        cells = []
        for w1 in (Outcome.NONNULL, Outcome.NULL):
            for w2 in (Outcome.NONNULL, Outcome.NULL):
                joint = self.outcome_projector("L1", w1).tensor(self.outcome_projector("L2", w2))
                probability = self.engine.born_probability(joint, state)
                cells.append(Scenario(None, None, w1, w2, probability))
        self.logger.info("Outcome distribution: " + ", ".join(
            f"({c.w1_outcome.value},{c.w2_outcome.value})={c.probability.to_text()}" for c in cells
        ))
        return cells

    def enumerate_scenarios(self) -> List[Scenario]:
        """
        Friend-definite scenarios: each F-branch of the global state carries
        its own Born weight into each announcement cell, without interference
        between branches
        """
        state = self.build_global_state()
        branches: Dict[Tuple[Symbol, Symbol], Ket] = {}
        for key, amplitude in state.amplitudes.items():
            branch_key = (key[0], key[2])
            previous = branches.get(branch_key, Ket.zero(state.roster))
            branches[branch_key] = previous + Ket(state.roster, {key: amplitude})
        scenarios = []
        for (f1, f2) in sorted(branches, key=lambda k: (k[0].value, k[1].value)):
            component = branches[(f1, f2)]
            for w1 in (Outcome.NONNULL, Outcome.NULL):
                for w2 in (Outcome.NONNULL, Outcome.NULL):
                    joint = self.outcome_projector("L1", w1).tensor(self.outcome_projector("L2", w2))
                    weight = component.inner(self.engine.project(joint, component))
                    if not weight.is_zero():
                        scenarios.append(Scenario(f1, f2, w1, w2, weight))
        return scenarios

    # Sampling

    def _thresholds(self) -> Tuple[List[Scenario], List[int]]:
        """Cumulative 64-bit integer thresholds for the announcement cells"""
        cells = self.outcome_distribution()
        thresholds = []
        cumulative = Fraction(0)
        for cell in cells[:-1]:
            cumulative += cell.probability.to_fraction()
            thresholds.append(int(cumulative * UNIFORM_RANGE))
        return cells, thresholds

    def _draw(self, rng: np.random.Generator) -> int:
        return int(rng.integers(0, UNIFORM_RANGE - 1, dtype=np.uint64, endpoint=True))

    def _run_until_halt(self, rng: np.random.Generator, max_trials: int,
                        cells: List[Scenario], thresholds: List[int]) -> List[TrialRecord]:
        records = []
        for trial_index in range(1, max_trials + 1):
            scenario = cells[bisect.bisect_right(thresholds, self._draw(rng))]
            records.append(TrialRecord(trial_index, scenario, scenario.halts))
            if scenario.halts:
                break
        return records

    def sample_until_halt(self, seed: int, max_trials: int) -> List[TrialRecord]:
        """
        Repeat rounds until both announcements are nonnull

        Args:
            seed: Generator seed; equal seeds give equal record lists
            max_trials: Cap on rounds; reaching it returns unhalted records

        Returns:
            Trial records in draw order
        """
        if max_trials < 1:
            raise ValueError("max_trials must be at least 1")
        cells, thresholds = self._thresholds()
        records = self._run_until_halt(np.random.default_rng(seed), max_trials, cells, thresholds)
        halted = records[-1].halted
        self.logger.info(
            f"Seed {seed}: {len(records)} trial(s), {'halted' if halted else 'not halted'}"
        )
        return records

    def sample_trials(self, seed: int, n: int) -> List[TrialRecord]:
        """n independent rounds, ignoring the halting rule"""
        cells, thresholds = self._thresholds()
        draws = np.random.default_rng(seed).integers(
            0, UNIFORM_RANGE - 1, size=n, dtype=np.uint64, endpoint=True
        )
        records = []
        for trial_index, draw in enumerate(draws.tolist(), start=1):
            scenario = cells[bisect.bisect_right(thresholds, draw)]
            records.append(TrialRecord(trial_index, scenario, scenario.halts))
        return records

    def halting_statistics(self, seed: int, runs: int, max_trials: int) -> dict:
        """
        Halting index over many independent repetitions

        Returns:
            Dictionary with mean, standard deviation and counts of halting indices
        """
        cells, thresholds = self._thresholds()
        rng = np.random.default_rng(seed)
        indices = []
        unhalted = 0
        for _ in range(runs):
            records = self._run_until_halt(rng, max_trials, cells, thresholds)
            if records[-1].halted:
                indices.append(records[-1].trial_index)
            else:
                unhalted += 1
        values = np.array(indices, dtype=float)
        statistics = {
            "runs": runs,
            "halted": len(indices),
            "unhalted": unhalted,
            "mean_index": float(values.mean()) if len(values) else float("nan"),
            "std_index": float(values.std(ddof=1)) if len(values) > 1 else float("nan"),
        }
        self.logger.info(f"Halting statistics: {statistics}")
        return statistics

    def halt_frequency(self, records: List[TrialRecord]) -> dict:
        """Empirical frequency of halting rounds with its binomial sigma"""
        n = len(records)
        halts = np.fromiter((r.halted for r in records), dtype=bool, count=n)
        p = float(self.halting_probability().to_fraction())
        return {
            "trials": n,
            "halts": int(halts.sum()),
            "frequency": float(halts.mean()) if n else float("nan"),
            "expected": p,
            "sigma": float(np.sqrt(p * (1 - p) / n)) if n else float("nan"),
        }

    def halting_probability(self) -> FieldElement:
        for cell in self.outcome_distribution():
            if cell.halts:
                return cell.probability
        raise ArithmeticError("no halting cell")
