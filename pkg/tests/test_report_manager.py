"""
Unit tests for ReportManager
"""
import json
import tempfile
import unittest
from pathlib import Path

from managers.formula_parser import FormulaParser
from managers.report_manager import BLOCKED_LINE, ReportManager, format_table, to_json_line
from models.data_models import (
    BlockCertificate, ContradictionCertificate, DerivationStep, DerivationTrace, IdentityResult,
    NotDerivable, Outcome, Scenario, TrialRecord,
)
from models.field_element import FieldElement
from models.formulas import Agent, AgentInstance


def trial(index: int, halted: bool) -> TrialRecord:
    outcome = Outcome.NONNULL if halted else Outcome.NULL
    return TrialRecord(index, Scenario(None, None, outcome, outcome, FieldElement.zero()), halted)


class TestReportManager(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        parser = FormulaParser()
        cls.fact = parser.parse("K[F1@1](S1=psi)")
        cls.rule = parser.parse("K[F1@1](S1=psi -> PchiL2=0)")
        cls.goal = parser.parse("K[F1@1](PchiL2=0)")
        cls.trace = DerivationTrace()
        cls.trace.add(DerivationStep(cls.fact, "premise"))
        cls.trace.add(DerivationStep(cls.rule, "premise"))
        cls.trace.add(DerivationStep(cls.goal, "distribution", (0, 1)))

    def setUp(self):
        self.reports = ReportManager()

    def test_json_line_is_stable(self):
        self.assertEqual(to_json_line({"b": 1, "a": [1, 2]}), '{"a":[1,2],"b":1}')

    def test_format_table(self):
        lines = format_table(["seed", "trial", "W1", "W2", "halted"],
                             [[7, 1, "null", "null", "no"]])
        self.assertEqual(lines[0], "seed | trial | W1   | W2   | halted")
        self.assertEqual(lines[1], "-+-".join(["-" * 4, "-" * 5, "-" * 4, "-" * 4, "-" * 6]))
        self.assertEqual(lines[2], "7    | 1     | null | null | no")

    def test_trace_lines(self):
        lines = self.reports.format_trace(self.trace)
        self.assertEqual(lines[0], f"1. {self.fact} [premise]")
        self.assertEqual(lines[2], f"3. {self.goal} [distribution: premises 1,2]")

    def test_trace_records(self):
        records = self.reports.trace_records(self.trace)
        self.assertEqual(records[2]["premises"], [1, 2])
        self.assertEqual(records[2]["rule"], "distribution")
        self.assertEqual(records[0]["type"], "step")

    def test_contradiction_lines(self):
        certificate = ContradictionCertificate(self.trace, AgentInstance.at(Agent.F1, 1), (self.goal,))
        lines = self.reports.contradiction_lines(certificate)
        self.assertEqual(lines[0], "CONTRADICTION for F1@1 (3 steps)")
        self.assertEqual(lines[1], f"via {self.goal}")
        records = self.reports.contradiction_records(certificate)
        self.assertEqual(records[-1]["verdict"], "CONTRADICTION")
        self.assertEqual(records[-1]["final"], str(self.goal))

    def test_block_lines(self):
        result = NotDerivable(44, 9, True, frozenset({self.fact, self.goal}))
        certificate = BlockCertificate(result, 44, 5, (self.rule,))
        lines = self.reports.block_lines(certificate)
        self.assertEqual(lines[0], BLOCKED_LINE)
        self.assertIn("fixpoint size: 2", lines)
        self.assertIn("naive contradiction depth: 5", lines)
        self.assertEqual(lines[-1], f"not derivable: {self.rule}")
        record = self.reports.block_records(certificate)[0]
        self.assertEqual(record["verdict"], "BLOCKED")
        self.assertTrue(record["fixpoint"])

    def test_simulation_summary(self):
        runs = [(7, [trial(1, False), trial(2, True)]), (8, [trial(1, False)])]
        lines = self.reports.simulation_lines(runs)
        self.assertEqual(lines[-2], "seed 7: halted at trial 2")
        self.assertEqual(lines[-1], "seed 8: not halted after 1 trial(s)")
        self.assertIn("7    | 2     | nonnull | nonnull | yes", lines)

    def test_simulation_records(self):
        records = self.reports.simulation_records([(7, [trial(1, False), trial(2, True)])])
        self.assertEqual([r["type"] for r in records], ["trial", "trial", "summary"])
        self.assertEqual(records[-1]["halting_index"], 2)
        unhalted = self.reports.simulation_records([(3, [trial(1, False)])])
        self.assertIsNone(unhalted[-1]["halting_index"])

    def test_identity_lines(self):
        results = [IdentityResult("P(both nonnull)", "1/12", True), IdentityResult("x", "0", False)]
        lines = self.reports.identity_lines(results)
        self.assertEqual(lines, ["P(both nonnull) = 1/12 PASS", "x = 0 FAIL", "1/2 identities passed"])

    def test_render_json(self):
        text = self.reports.render(["ignored"], [{"type": "a"}, {"type": "b"}], "json")
        decoded = [json.loads(line) for line in text.splitlines()]
        self.assertEqual(decoded, [{"type": "a"}, {"type": "b"}])
        self.assertEqual(self.reports.render(["x", "y"], fmt="text"), "x\ny\n")

    def test_write(self):
        self.assertIsNone(self.reports.write("a.txt", "x\n"))
        with tempfile.TemporaryDirectory() as tmp:
            reports = ReportManager(Path(tmp) / "nested")
            path = reports.write("a.txt", "x\n")
            self.assertEqual(path.read_text(encoding="utf-8"), "x\n")


if __name__ == '__main__':
    unittest.main()
