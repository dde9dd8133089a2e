"""
Formula parser for the FR logic checker
Reads and prints the epistemic formula language
"""
import logging

from lark import Lark, Transformer
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError

from models.errors import FormulaSyntaxError
from models.formulas import (
    CONTEXTS, MAX_TIME, Agent, AgentInstance, And, Atom, Formula, Implies, Knows, Not, Predicate,
)
from models.kets import Symbol

# Precedence by hierarchy: implies -> conj -> unary. Implication is right associative.
FORMULA_GRAMMAR = r"""
    ?start: implies

    ?implies: conj
            | conj "->" implies              -> implication

    ?conj: unary
         | conj "&" unary                    -> conjunction

    ?unary: "!" unary                        -> negation
          | knows
          | atom
          | "(" implies ")"

    knows: "K[" AGENT "@" times ["|" CONTEXT] "]" unary

    times: "<" INT                           -> before
         | ">=" INT                          -> onward
         | INT ("," INT)*                    -> listed

    atom: SYSTEM "=" VALUE                   -> system_atom
        | CHI "=" INT                        -> chi_null
        | CHI "!=" INT                       -> chi_nonnull

    AGENT: /[FW][0-9]+/
    CONTEXT: /C[0-9]+/
    SYSTEM: /S[0-9]+/
    CHI: /PchiL[0-9]+/
    VALUE: /[a-z]+/

    %import common.INT
    %import common.WS
    %ignore WS
"""

_SYSTEM_PREDICATES = {"S1": Predicate.S1_EQ, "S2": Predicate.S2_EQ}
_CHI_PREDICATES = {
    ("PchiL1", False): Predicate.PCHI_L1_NULL,
    ("PchiL1", True): Predicate.PCHI_L1_NONNULL,
    ("PchiL2", False): Predicate.PCHI_L2_NULL,
    ("PchiL2", True): Predicate.PCHI_L2_NONNULL,
}


class _TimeSet:
    def __init__(self, times, position):
        self.times = frozenset(times)
        self.position = position


class FormulaBuilder(Transformer):
    """Turns the parse tree into formula nodes, validating names and times"""

    def implication(self, children):
        antecedent, consequent = children
        return Implies(antecedent, consequent)

    def conjunction(self, children):
        left, right = children
        return And(left, right)

    def negation(self, children):
        return Not(children[0])

    def knows(self, children):
        agent_token, times, context_token, body = children
        try:
            agent = Agent(str(agent_token))
        except ValueError:
            raise FormulaSyntaxError(f"unknown agent {agent_token}", agent_token.start_pos)
        context = None
        if context_token is not None:
            context = CONTEXTS.get(str(context_token))
            if context is None:
                raise FormulaSyntaxError(f"unknown context {context_token}", context_token.start_pos)
        try:
            instance = AgentInstance(agent, times.times)
        except FormulaSyntaxError as e:
            raise FormulaSyntaxError(e.message, times.position)
        return Knows(instance, body, context)

    def before(self, children):
        bound = children[0]
        return _TimeSet(range(0, min(int(bound), MAX_TIME + 1)), bound.start_pos)

    def onward(self, children):
        bound = children[0]
        return _TimeSet(range(int(bound), MAX_TIME + 1), bound.start_pos)

    def listed(self, children):
        for token in children:
            if int(token) > MAX_TIME:
                raise FormulaSyntaxError(f"time {token} outside 0..{MAX_TIME}", token.start_pos)
        return _TimeSet((int(t) for t in children), children[0].start_pos)

    def system_atom(self, children):
        name, value = children
        predicate = _SYSTEM_PREDICATES.get(str(name))
        if predicate is None:
            raise FormulaSyntaxError(f"unknown atom {name}", name.start_pos)
        if str(value) not in (Symbol.PHI.value, Symbol.PSI.value):
            raise FormulaSyntaxError(f"value must be phi or psi, got {value}", value.start_pos)
        return Atom(predicate, Symbol(str(value)))

    def _chi(self, children, nonnull: bool) -> Atom:
        name, zero = children
        predicate = _CHI_PREDICATES.get((str(name), nonnull))
        if predicate is None:
            raise FormulaSyntaxError(f"unknown atom {name}", name.start_pos)
        if int(zero) != 0:
            raise FormulaSyntaxError(f"projector outcome compares with 0, got {zero}", zero.start_pos)
        return Atom(predicate)

    def chi_null(self, children):
        return self._chi(children, False)

    def chi_nonnull(self, children):
        return self._chi(children, True)


class FormulaParser:
    """LALR parser for epistemic formulas with a canonical printer"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.parser = Lark(FORMULA_GRAMMAR, parser="lalr", maybe_placeholders=True)
        self.builder = FormulaBuilder()

    def parse(self, text: str) -> Formula:
        """
        Parse a formula

        Args:
            text: Formula text, e.g. "K[F1@<3](S1=psi -> PchiL2=0)"

        Returns:
            Formula tree

        Raises:
            FormulaSyntaxError: with the offending position in `text`
        """
        try:
            tree = self.parser.parse(text)
        except UnexpectedEOF:
            raise FormulaSyntaxError("unexpected end of formula", len(text))
        except UnexpectedInput as e:
            position = getattr(e, "pos_in_stream", None)
            if position is None or position < 0:
                position = len(text)
            raise FormulaSyntaxError(f"unexpected input at position {position}", position)
        try:
            return self.builder.transform(tree)
        except VisitError as e:
            if isinstance(e.orig_exc, FormulaSyntaxError):
                raise e.orig_exc
            raise

    def print(self, formula: Formula) -> str:
        """Canonical text; parse(print(f)) == f"""
        return formula.key

    def parse_many(self, texts) -> list:
        return [self.parse(t) for t in texts]
