"""
Quantum engine for the FR logic checker
Exact linear algebra over Q(sqrt2, sqrt3): tensor products, inner products,
projections and Born probabilities
"""
import logging
from typing import Sequence

from models.errors import NormalizationError, RosterError
from models.field_element import FieldElement, field_arith
from models.kets import Ket, Projector, commutes


class QuantumEngine:
    """Stateless front end for the exact quantum operations"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def field_arith(self, x: FieldElement, y: FieldElement = None, op: str = "add") -> FieldElement:
        return field_arith(x, y, op)

    def tensor(self, u: Ket, v: Ket) -> Ket:
        """
        Tensor product of kets on disjoint rosters

        Args:
            u: Left factor
            v: Right factor

        Returns:
            Ket over the concatenated roster

        Raises:
            RosterError: if the rosters overlap
        """
        return u.tensor(v)

    def inner(self, u: Ket, v: Ket) -> FieldElement:
        return u.inner(v)

    def project(self, projector: Projector, v: Ket) -> Ket:
        """
        Apply P (x) Identity to v

        Args:
            projector: Projector whose roster is a sub-roster of v's
            v: State to project

        Returns:
            Projected ket over v's roster
        """
        missing = [s for s in projector.roster if s not in v.roster]
        if missing:
            raise RosterError(
                f"projector acts on {[s.value for s in missing]} missing from the state"
            )
        return projector.apply(v)

    def born_probability(self, projector: Projector, v: Ket) -> FieldElement:
        """
        Born probability <v, P v> of a normalized state

        Raises:
            NormalizationError: if <v, v> != 1
        """
        if not v.is_normalized():
            raise NormalizationError(
                f"Born probability needs a normalized state, norm^2 = {v.norm_squared().to_text()}"
            )
        probability = v.inner(self.project(projector, v))
        if probability < 0 or probability > 1:
            raise NormalizationError(f"probability {probability.to_text()} outside [0, 1]")
        self.logger.debug(f"Born probability for {projector!r}: {probability.to_text()}")
        return probability

    def is_resolution_of_identity(self, basis: Sequence[Ket], v: Ket) -> bool:
        """Sum of rank-1 projections onto `basis` reproduces v"""
        total = Ket.zero(v.roster)
        for b in basis:
            total = total + self.project(Projector((b,)), v)
        return total == v

    def gram_matrix(self, kets: Sequence[Ket]) -> list:
        return [[u.inner(w) for w in kets] for u in kets]

    def projectors_commute(self, p: Projector, q: Projector, basis: Sequence[Ket]) -> bool:
        return commutes(p, q, basis)
