"""
Identity checker for the FR logic checker
Runs the exact quantum identities behind the protocol and the premises
"""
import logging
from fractions import Fraction
from typing import List

from managers.protocol_manager import ProtocolManager
from models.data_models import IdentityResult, Outcome
from models.field_element import FieldElement
from models.kets import Ket, Projector, Subsystem, Symbol


def _gram_is_identity(gram) -> bool:
    return all(
        value == (1 if i == j else 0)
        for i, row in enumerate(gram) for j, value in enumerate(row)
    )


class IdentityChecker:
    """Evaluates every identity and reports PASS/FAIL lines"""

    def __init__(self, protocol: ProtocolManager = None):
        self.logger = logging.getLogger(__name__)
        self.protocol = protocol or ProtocolManager()
        self.engine = self.protocol.engine

    def _equal(self, name: str, actual: FieldElement, expected) -> IdentityResult:
        return IdentityResult(name, actual.to_text(), actual == expected)

    def _holds(self, name: str, passed: bool) -> IdentityResult:
        return IdentityResult(name, "true" if passed else "false", passed)

    def run_all(self) -> List[IdentityResult]:
        """
        Check the exact identities

        Returns:
            One result per identity, in a fixed order
        """
        protocol = self.protocol
        engine = self.engine
        state = protocol.build_global_state()
        chi1 = protocol.chi_projector("L1")
        chi2 = protocol.chi_projector("L2")
        results = []

        results.append(self._equal("<Psi, Psi>", state.norm_squared(), 1))
        results.append(self._equal(
            "amplitude(phi,xi,phi,xi)",
            state.amplitude((Symbol.PHI, Symbol.XI, Symbol.PHI, Symbol.XI)),
            FieldElement(c=Fraction(1, 3)),
        ))

        total = Ket.zero(state.roster)
        for term in protocol.factorization_terms():
            total = total + term.reorder(state.roster)
        results.append(self._holds("Factorization into W terms", total == state))

        total = Ket.zero(state.roster)
        for term in protocol.w1_factorization_terms():
            total = total + term.reorder(state.roster)
        results.append(self._holds("Factorization seen by W1", total == state))

        for lab in ("L1", "L2"):
            basis = protocol.w_basis(lab)
            results.append(self._holds(f"W basis of {lab} orthonormal",
                                       _gram_is_identity(engine.gram_matrix(basis))))
            results.append(self._holds(f"W basis of {lab} resolves the identity",
                                       engine.is_resolution_of_identity(basis, state)))

        both = chi1.tensor(chi2)
        results.append(self._equal("<Psi, chi(x)chi>",
                                   state.inner(protocol.chi("L1").tensor(protocol.chi("L2"))),
                                   FieldElement(c=Fraction(1, 6))))
        results.append(self._equal("P(both nonnull)", engine.born_probability(both, state),
                                   Fraction(1, 12)))
        results.append(self._equal("P(W1 nonnull)", engine.born_probability(chi1, state),
                                   Fraction(1, 6)))
        results.append(self._equal("P(W2 nonnull)", engine.born_probability(chi2, state),
                                   Fraction(1, 6)))

        branch = protocol.branch_state(Symbol.PSI)
        results.append(self._equal("P(W2 nonnull | F1=psi)", engine.born_probability(chi2, branch), 0))
        residual = protocol.branch_component(Symbol.PSI)
        results.append(self._equal("<chi, L2 in F1=psi branch>",
                                   protocol.chi("L2").inner(residual), 0))

        projected = engine.project(chi1, state)
        s2 = state.roster.index(Subsystem.S2)
        f2 = state.roster.index(Subsystem.F2)
        support_ok = all(
            key[s2] == Symbol.PSI and key[f2] == Symbol.ZETA for key in projected.support()
        )
        results.append(self._holds("P_chi L1 Psi supported on psi zeta in L2", support_ok))
        results.append(self._equal("|P_chi L1 Psi|^2", projected.norm_squared(), Fraction(1, 6)))
        results.append(self._equal("P(F2=psi | W1 nonnull)",
                                   protocol.conditional_f2_given_w1(Outcome.NONNULL)[Symbol.PSI], 1))

        cells = protocol.outcome_distribution()
        results.append(self._equal("Sum of outcome cells",
                                   sum((c.probability for c in cells), FieldElement.zero()), 1))
        results.append(self._holds("Outcome cells nonnegative",
                                   all(c.probability >= 0 for c in cells)))

        scenarios = protocol.enumerate_scenarios()
        results.append(self._equal("Sum of scenarios",
                                   sum((s.probability for s in scenarios), FieldElement.zero()), 1))
        followed = [s for s in scenarios if s.halts
                    and s.f1_outcome == Symbol.PSI and s.f2_outcome == Symbol.PSI]
        results.append(self._equal("P(psi,psi,nonnull,nonnull)",
                                   followed[0].probability if followed else FieldElement.zero(),
                                   Fraction(1, 12)))
        definite = sum((s.probability for s in scenarios if s.halts), FieldElement.zero())
        results.append(IdentityResult(
            "Friend-definite P(both nonnull) vs Born",
            f"{definite.to_text()} != 1/12",
            definite != Fraction(1, 12),
        ))

        product = protocol.product_projectors("L1")
        lab_basis = [p.span[0] for p in product]
        w_projectors = [Projector((k,)) for k in protocol.w_basis("L1")]
        results.append(self._holds(
            "Contexts C1 and C2 do not commute",
            any(not engine.projectors_commute(p, q, lab_basis) for p in product for q in w_projectors),
        ))

        failed = [r.name for r in results if not r.passed]
        if failed:
            self.logger.error(f"Identity checks failed: {failed}")
        else:
            self.logger.info(f"All {len(results)} identity checks passed")
        return results
