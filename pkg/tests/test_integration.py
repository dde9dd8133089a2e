"""
Integration tests for the FR logic checker
Tests end-to-end workflows and component interactions
"""
import io
import json
import os
import shutil
import tempfile
import unittest
from contextlib import redirect_stderr
from fractions import Fraction
from pathlib import Path

from app_config import AppConfig
from main import EXIT_OK, run
from managers.derivation_manager import P1_BODY, P2_BODY, DerivationManager
from managers.formula_parser import FormulaParser
from managers.kripke_evaluator import KripkeEvaluator
from managers.protocol_manager import ProtocolManager
from managers.report_manager import BLOCKED_LINE, ReportManager
from models.data_models import Outcome
from models.kets import Symbol

SLOW_SKIPPED = bool(os.environ.get("FR_LOGIC_QUICK_TESTS"))


class TestIntegration(unittest.TestCase):
    """Integration tests for the complete system"""

    def setUp(self):
        """Set up test environment"""
        self.temp_dir = Path(tempfile.mkdtemp())
        self.app_config = AppConfig(self.temp_dir / "settings.json", self.temp_dir / "logs")
        self.protocol = ProtocolManager()
        self.parser = FormulaParser()

    def tearDown(self):
        """Clean up test environment"""
        self.app_config.close_logging()
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_friend_definite_model_misses_quantum_certainty(self):
        """P(F2=psi | W1 nonnull) = 1, yet W1 cannot know S2=psi classically"""
        self.assertEqual(self.protocol.conditional_f2_given_w1(Outcome.NONNULL)[Symbol.PSI], 1)
        scenarios = self.protocol.enumerate_scenarios()
        evaluator = KripkeEvaluator()
        model = evaluator.build_scenario_model(scenarios)
        followed = next(s for s in scenarios
                        if s.halts and s.f1_outcome == Symbol.PSI and s.f2_outcome == Symbol.PSI)
        self.assertFalse(evaluator.evaluate(model, followed, self.parser.parse("K[W1@3](S2=psi)")))

    def test_premise_bodies_against_the_classical_model(self):
        """F2's inference survives in the classical model; F1's needs interference"""
        evaluator = KripkeEvaluator()
        model = evaluator.build_scenario_model(self.protocol.enumerate_scenarios())
        self.assertTrue(evaluator.holds_everywhere(model, self.parser.parse(P2_BODY)))
        self.assertFalse(evaluator.holds_everywhere(model, self.parser.parse(P1_BODY)))

    def test_scenario_weights_against_born_rule(self):
        definite = sum(s.probability.to_fraction() for s in self.protocol.enumerate_scenarios() if s.halts)
        self.assertEqual(definite, Fraction(1, 4))
        self.assertEqual(self.protocol.halting_probability(), Fraction(1, 12))

    def test_simulation_output_round_trip(self):
        """simulate --format json parses back into the records it printed"""
        out = io.StringIO()
        with redirect_stderr(io.StringIO()):
            code = run(["simulate", "--seed", "4", "--max-trials", "400", "--format", "json"],
                       out, self.app_config)
        self.assertEqual(code, EXIT_OK)
        records = [json.loads(line) for line in out.getvalue().splitlines()]
        trials = [r for r in records if r["type"] == "trial"]
        expected = self.protocol.sample_until_halt(4, 400)
        self.assertEqual(len(trials), len(expected))
        self.assertEqual([t["halted"] for t in trials], [r.halted for r in expected])

    @unittest.skipIf(SLOW_SKIPPED, "full proof search")
    def test_naive_trace_renders_as_json(self):
        certificate = DerivationManager().reproduce_contradiction()
        reports = ReportManager()
        text = reports.render((), reports.contradiction_records(certificate), "json")
        records = [json.loads(line) for line in text.splitlines()]
        steps = [r for r in records if r["type"] == "step"]
        self.assertEqual(len(steps), len(certificate.trace))
        self.assertEqual(records[-1]["agent"], "W2@>=3")
        for record in steps:
            self.assertTrue(all(p < record["step"] for p in record["premises"]))

    @unittest.skipIf(SLOW_SKIPPED, "full proof search")
    def test_report_command(self):
        out_dir = self.temp_dir / "reports"
        out = io.StringIO()
        with redirect_stderr(io.StringIO()):
            code = run(["report", "--out", str(out_dir)], out, self.app_config)
        self.assertEqual(code, EXIT_OK)
        written = (out_dir / "verdict_report.txt").read_text(encoding="utf-8")
        self.assertEqual(written, out.getvalue())
        self.assertIn("CONTRADICTION for W2@>=3", written)
        self.assertIn(BLOCKED_LINE, written)
        self.assertIn("contextual (tags erased) within naive: yes", written)
        self.assertIn("P(both nonnull) = 1/12 PASS", written)


if __name__ == '__main__':
    unittest.main()
