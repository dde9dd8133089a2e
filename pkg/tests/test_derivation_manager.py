"""
Unit tests for DerivationManager
"""
import os
import unittest
from unittest.mock import patch

from config import MAX_TRACE_STEPS
from managers.derivation_manager import (
    DerivationManager, announcement_pairs, canonical_instance, contradiction_for,
    hierarchy_pairs, normalize, self_pairs,
)
from managers.formula_parser import FormulaParser
from managers.inference_engine import InferenceEngine, check_trace
from models.data_models import DerivationStep, DerivationTrace, Mode
from models.errors import DerivationError, PhysicsVerificationError, SearchAborted
from models.formulas import (
    PRODUCT_CONTEXT, W_CONTEXT, Agent, AgentInstance, Knows, erase_contexts,
    is_global_contradiction,
)

SLOW_SKIPPED = bool(os.environ.get("FR_LOGIC_QUICK_TESTS"))


def instance(agent: Agent, *times: int) -> AgentInstance:
    return AgentInstance.at(agent, *times)


class TestNormalization(unittest.TestCase):
    """Epochs, contexts and trust pairs"""

    @classmethod
    def setUpClass(cls):
        cls.parser = FormulaParser()

    def test_canonical_epochs(self):
        cases = [
            (instance(Agent.F1, 1), instance(Agent.F1, 0, 1, 2)),
            (instance(Agent.F2, 2), instance(Agent.F2, 1, 2)),
            (instance(Agent.F2, 0), instance(Agent.F2, 0)),
            (instance(Agent.W1, 3), instance(Agent.W1, 2, 3)),
            (instance(Agent.W1, 2, 3, 4), instance(Agent.W1, 2, 3, 4)),
            (instance(Agent.W2, 3), instance(Agent.W2, 3, 4)),
            (instance(Agent.W2, 4), instance(Agent.W2, 3, 4)),
        ]
        for given, expected in cases:
            with self.subTest(given=str(given)):
                self.assertEqual(canonical_instance(given), expected)

    def test_normalize_naive(self):
        f = self.parser.parse("K[F1@<3](K[F1@1](S1=psi) -> K[W2@4](PchiL2=0))")
        expected = "K[F1@<3](K[F1@<3](S1=psi) -> K[W2@>=3](PchiL2=0))"
        self.assertEqual(normalize(f, Mode.NAIVE), self.parser.parse(expected))

    def test_normalize_contextual_tags(self):
        f = normalize(self.parser.parse("K[W2@4]K[F2@2](S2=psi)"), Mode.CONTEXTUAL)
        self.assertEqual(f.context, W_CONTEXT)
        self.assertEqual(f.body.context, PRODUCT_CONTEXT)
        self.assertEqual(erase_contexts(f), normalize(self.parser.parse("K[W2@4]K[F2@2](S2=psi)"), Mode.NAIVE))

    def test_hierarchy_pairs(self):
        pairs = hierarchy_pairs()
        self.assertEqual(len(pairs), 4)
        self.assertEqual(pairs[0], (instance(Agent.F1, 4), instance(Agent.W2, 3, 4)))
        self.assertEqual(pairs[-1], (instance(Agent.F2, 1, 2), instance(Agent.F1, 0, 1, 2)))
        self.assertNotIn((instance(Agent.W1, 2, 3, 4), instance(Agent.F1, 0, 1, 2)), pairs)

    def test_announcement_and_self_pairs(self):
        announced = announcement_pairs()
        self.assertEqual(len(announced), 6)
        self.assertIn((instance(Agent.F2, 4), instance(Agent.W2, 3, 4)), announced)
        self.assertEqual(len(self_pairs()), 4)

    def test_contradiction_shape(self):
        naive = contradiction_for(instance(Agent.W2, 3, 4), Mode.NAIVE)
        self.assertTrue(is_global_contradiction(naive))
        self.assertEqual(naive, self.parser.parse("K[W2@>=3](PchiL2!=0) & !K[W2@>=3](PchiL2!=0)"))
        tagged = contradiction_for(instance(Agent.W2, 3, 4), Mode.CONTEXTUAL)
        self.assertEqual(erase_contexts(tagged), naive)


class TestPremises(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.manager = DerivationManager()

    def test_timeline_table(self):
        self.assertEqual(self.manager.timeline_table(), [
            ("F1", "<3 | 3 | 4"),
            ("F2", "0 | 1,2 | 3 | 4"),
            ("W1", "<2 | 2,3 | 4"),
            ("W2", "<3 | >=3"),
        ])

    def test_physics_claims_pass(self):
        claims = self.manager.verify_premise_physics()
        self.assertEqual(len(claims), 5)
        self.assertTrue(all(passed for _, passed in claims))

    def test_physics_failure_blocks_encoding(self):
        manager = DerivationManager()
        with patch.object(DerivationManager, "verify_premise_physics",
                          return_value=[("prop8: PchiL1!=0 makes S2=psi certain", False)]):
            with self.assertRaises(PhysicsVerificationError) as ctx:
                manager.encode_premises(Mode.NAIVE)
        self.assertIn("prop8", str(ctx.exception))

    def test_encode_naive(self):
        premises = self.manager.encode_premises(Mode.NAIVE)
        self.assertEqual(len(premises.entries), 9)
        self.assertEqual(len(premises.facts), 10)
        self.assertIs(self.manager.encode_premises(Mode.NAIVE), premises)
        self.assertEqual(premises.by_source("prop7").formula.modal_depth, 5)
        self.assertEqual(len(premises.tautologies), 9)
        with self.assertRaises(KeyError):
            premises.by_source("prop4")

    def test_encode_contextual_is_fully_tagged(self):
        premises = self.manager.encode_premises(Mode.CONTEXTUAL)
        for entry in premises.entries + premises.facts:
            for node in entry.formula.walk():
                if isinstance(node, Knows):
                    self.assertIsNotNone(node.context, entry.source)
        display = premises.by_source("prop8").display
        self.assertEqual(display.context, W_CONTEXT)

    def test_modes_differ_only_in_tags(self):
        self.assertEqual(self.manager.material_diff(), [])

    def test_krabre(self):
        expected = "K[W2@>=3]K[W1@2,3](K[W1@2,3](PchiL1!=0) -> K[W2@>=3](PchiL2=0))"
        self.assertEqual(self.manager.krabre(Mode.NAIVE), FormulaParser().parse(expected))

    def test_trust_relation_modes(self):
        naive = self.manager.trust_relation(Mode.NAIVE)
        contextual = self.manager.trust_relation(Mode.CONTEXTUAL)
        self.assertEqual(naive.pairs, contextual.pairs)
        self.assertIsNone(naive.context_for(Agent.W1))
        self.assertEqual(contextual.context_for(Agent.W1), W_CONTEXT)

    def test_scenario_is_reachable(self):
        self.assertTrue(self.manager.scenario_is_reachable())

    def test_formula_cap_aborts_search(self):
        with self.assertRaises(SearchAborted):
            DerivationManager(max_formulas=10).reproduce_contradiction()

    def test_shallow_depth_is_not_enough(self):
        with self.assertRaises(DerivationError):
            self.manager.reproduce_contradiction(depth=1)

    def test_overlong_trace_is_rejected(self):
        step = DerivationStep(self.manager.krabre(Mode.NAIVE), "premise")
        overlong = DerivationTrace([step] * (MAX_TRACE_STEPS + 1))
        with patch.object(InferenceEngine, "derive_staged", return_value=overlong), \
                patch.object(InferenceEngine, "check_trace", return_value=True):
            with self.assertRaises(DerivationError) as ctx:
                self.manager.reproduce_contradiction()
        self.assertIn(f"more than {MAX_TRACE_STEPS}", str(ctx.exception))


@unittest.skipIf(SLOW_SKIPPED, "full proof search")
class TestVerdicts(unittest.TestCase):
    """The naive contradiction and the contextual block"""

    @classmethod
    def setUpClass(cls):
        cls.manager = DerivationManager()
        cls.certificate = cls.manager.reproduce_contradiction()

    def test_w2_reaches_contradiction(self):
        trace = self.certificate.trace
        self.assertEqual(self.certificate.agent, instance(Agent.W2, 3, 4))
        self.assertEqual(trace.final, contradiction_for(instance(Agent.W2, 3, 4), Mode.NAIVE))
        self.assertTrue(trace.contains(self.manager.krabre(Mode.NAIVE)))
        self.assertEqual(trace.rules_used()[-1], "condition-s")
        self.assertLessEqual(len(trace), MAX_TRACE_STEPS)

    def test_trace_replays(self):
        trust = self.manager.trust_relation(Mode.NAIVE)
        self.assertTrue(check_trace(self.certificate.trace, trust, strict=True))

    def test_trust_steps_follow_hierarchy(self):
        steps = self.manager.trust_steps(self.certificate.trace)
        self.assertIn("F2@1,2 > F1@<3", steps)
        self.assertIn("W1@>=2 > F2@1,2", steps)
        self.assertIn("W2@>=3 > W1@>=2", steps)

    def test_variant_for_w2(self):
        self.assertEqual(self.manager.variant_for(Agent.W2).trace.final, self.certificate.trace.final)

    def test_agent_variants(self):
        certificates = self.manager.reproduce_agent_variants()
        holders = [c.agent for c in certificates]
        self.assertEqual(holders, [instance(Agent.F1, 4), instance(Agent.F2, 4), instance(Agent.W1, 4)])
        for certificate in certificates:
            with self.subTest(agent=str(certificate.agent)):
                self.assertTrue(certificate.trace.contains(certificate.waypoints[0]))
                self.assertTrue(is_global_contradiction(certificate.trace.final))
                self.assertLessEqual(len(certificate.trace), MAX_TRACE_STEPS)

    def test_contextual_block(self):
        block = self.manager.certify_block()
        self.assertTrue(block.result.fixpoint)
        self.assertFalse(any(is_global_contradiction(f) for f in block.result.formulas))
        self.assertNotIn(self.manager.krabre(Mode.CONTEXTUAL), block.result.formulas)
        self.assertEqual(block.excluded, (self.manager.krabre(Mode.CONTEXTUAL),))
        self.assertGreaterEqual(block.depth, block.naive_depth + 4)

    def test_contextual_fixpoint_inside_naive(self):
        comparison = self.manager.compare_fixpoints()
        self.assertTrue(comparison.naive_fixpoint)
        self.assertTrue(comparison.contextual_fixpoint)
        self.assertTrue(comparison.included)
        self.assertLessEqual(comparison.contextual_size, comparison.naive_size)


if __name__ == '__main__':
    unittest.main()
