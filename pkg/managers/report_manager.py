"""
Report manager for the FR logic checker
Renders traces, trial records and verdicts as text or JSON lines and
writes them to the reports directory
"""
import json
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from models.data_models import (
    BlockCertificate, ContradictionCertificate, DerivationStep, DerivationTrace,
    FixpointComparison, IdentityResult, TrialRecord,
)

BANNER = "=" * 70
BLOCKED_LINE = "BLOCKED at fixpoint (no contradiction derivable)"


def to_json_line(record: dict) -> str:
    """Stable one-line JSON: sorted keys, no whitespace"""
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def format_table(headers: Sequence[str], rows: Iterable[Sequence[object]]) -> List[str]:
    """Plain ASCII table with a header rule"""
    rows = [[str(cell) for cell in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    def line(cells: Sequence[str]) -> str:
        return " | ".join(cell.ljust(widths[i]) for i, cell in enumerate(cells)).rstrip()

    rule = "-+-".join("-" * w for w in widths)
    return [line(headers), rule] + [line(row) for row in rows]


class ReportManager:
    """Text and JSON-lines rendering of everything the CLI prints"""

    def __init__(self, out_dir: Optional[Path] = None):
        self.logger = logging.getLogger(__name__)
        self.out_dir = Path(out_dir) if out_dir else None

    # Traces

    def format_step(self, number: int, step: DerivationStep) -> str:
        """
        One numbered trace line

        Args:
            number: 1-based position of the step
            step: Step to render; its premise indices are 0-based

        Returns:
            "n. <formula> [rule-id: premises i,j]", or "n. <formula> [premise]"
        """
        if step.premises:
            cited = ",".join(str(i + 1) for i in step.premises)
            return f"{number}. {step.conclusion} [{step.rule}: premises {cited}]"
        return f"{number}. {step.conclusion} [{step.rule}]"

    def format_trace(self, trace: DerivationTrace) -> List[str]:
        return [self.format_step(n, step) for n, step in enumerate(trace.steps, start=1)]

    def trace_records(self, trace: DerivationTrace) -> List[dict]:
        records = []
        for n, step in enumerate(trace.steps, start=1):
            records.append({
                "type": "step",
                "step": n,
                "formula": str(step.conclusion),
                "rule": step.rule,
                "premises": [i + 1 for i in step.premises],
                "detail": step.detail,
            })
        return records

    # Verdicts

    def contradiction_lines(self, certificate: ContradictionCertificate) -> List[str]:
        lines = [f"CONTRADICTION for {certificate.agent} ({len(certificate.trace)} steps)"]
        for waypoint in certificate.waypoints:
            lines.append(f"via {waypoint}")
        lines.extend(self.format_trace(certificate.trace))
        return lines

    def contradiction_records(self, certificate: ContradictionCertificate) -> List[dict]:
        records = self.trace_records(certificate.trace)
        records.append({
            "type": "verdict",
            "verdict": "CONTRADICTION",
            "agent": str(certificate.agent),
            "steps": len(certificate.trace),
            "waypoints": [str(w) for w in certificate.waypoints],
            "final": str(certificate.trace.final),
        })
        return records

    def block_lines(self, certificate: BlockCertificate) -> List[str]:
        result = certificate.result
        lines = [
            BLOCKED_LINE,
            f"fixpoint size: {result.size}",
            f"rounds: {result.rounds}",
            f"depth bound: {certificate.depth}",
            f"naive contradiction depth: {certificate.naive_depth}",
        ]
        lines.extend(f"not derivable: {f}" for f in certificate.excluded)
        return lines

    def block_records(self, certificate: BlockCertificate) -> List[dict]:
        result = certificate.result
        return [{
            "type": "verdict",
            "verdict": "BLOCKED",
            "fixpoint": result.fixpoint,
            "fixpoint_size": result.size,
            "rounds": result.rounds,
            "depth": certificate.depth,
            "naive_depth": certificate.naive_depth,
            "excluded": [str(f) for f in certificate.excluded],
        }]

    # Simulation

    def trial_rows(self, seed: int, records: Sequence[TrialRecord]) -> List[List[object]]:
        return [
            [seed, r.trial_index, r.scenario.w1_outcome.value, r.scenario.w2_outcome.value,
             "yes" if r.halted else "no"]
            for r in records
        ]

    def simulation_lines(self, runs: Sequence[tuple]) -> List[str]:
        """
        Trial table plus per-seed halting summary

        Args:
            runs: (seed, records) pairs in output order
        """
        rows = []
        for seed, records in runs:
            rows.extend(self.trial_rows(seed, records))
        lines = format_table(["seed", "trial", "W1", "W2", "halted"], rows)
        lines.append("")
        for seed, records in runs:
            last = records[-1]
            if last.halted:
                lines.append(f"seed {seed}: halted at trial {last.trial_index}")
            else:
                lines.append(f"seed {seed}: not halted after {last.trial_index} trial(s)")
        return lines

    def simulation_records(self, runs: Sequence[tuple]) -> List[dict]:
        records = []
        for seed, trials in runs:
            for r in trials:
                records.append({
                    "type": "trial",
                    "seed": seed,
                    "trial": r.trial_index,
                    "w1": r.scenario.w1_outcome.value,
                    "w2": r.scenario.w2_outcome.value,
                    "halted": r.halted,
                })
            records.append({
                "type": "summary",
                "seed": seed,
                "trials": len(trials),
                "halted": trials[-1].halted,
                "halting_index": trials[-1].trial_index if trials[-1].halted else None,
            })
        return records

    # Identities

    def identity_lines(self, results: Sequence[IdentityResult]) -> List[str]:
        lines = [r.line for r in results]
        failed = sum(1 for r in results if not r.passed)
        lines.append(f"{len(results) - failed}/{len(results)} identities passed")
        return lines

    def identity_records(self, results: Sequence[IdentityResult]) -> List[dict]:
        return [
            {"type": "identity", "name": r.name, "value": r.value, "passed": r.passed}
            for r in results
        ]

    # One-page report

    def verdict_report(self, contradiction: ContradictionCertificate,
                       variants: Sequence[ContradictionCertificate],
                       block: BlockCertificate,
                       comparison: FixpointComparison,
                       identities: Sequence[IdentityResult],
                       physics: Sequence[tuple]) -> List[str]:
        """
        The verdict report: both modes side by side

        Returns:
            Lines of the report, without trailing newlines
        """
        lines = [BANNER, "FR verdict report", BANNER, "", "Naive trust:"]
        lines.extend(self.contradiction_lines(contradiction))
        lines.append("")
        lines.append("Per-agent variants:")
        for certificate in variants:
            lines.append(f"  {certificate.agent}: CONTRADICTION in {len(certificate.trace)} steps "
                         f"via {', '.join(str(w) for w in certificate.waypoints)}")
        lines.extend(["", "Contextual trust:"])
        lines.extend(self.block_lines(block))
        lines.extend([
            "",
            "Monotonicity:",
            f"  naive fixpoint size: {comparison.naive_size}",
            f"  contextual fixpoint size: {comparison.contextual_size}",
            f"  contextual (tags erased) within naive: {'yes' if comparison.included else 'no'}",
        ])
        lines.extend(["", "Premise physics:"])
        for claim, passed in physics:
            lines.append(f"  {'PASS' if passed else 'FAIL'} {claim}")
        lines.extend(["", "Exact identities:"])
        lines.extend(f"  {line}" for line in self.identity_lines(identities))
        lines.append(BANNER)
        return lines

    # Output

    def render(self, lines: Sequence[str] = (), records: Sequence[dict] = (),
               fmt: str = "text") -> str:
        if fmt == "json":
            return "".join(to_json_line(r) + "\n" for r in records)
        return "".join(line + "\n" for line in lines)

    def write(self, name: str, content: str) -> Optional[Path]:
        """
        Write a rendered report under the output directory

        Returns:
            Path written, or None when no output directory is set
        """
        if self.out_dir is None:
            return None
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        path.write_text(content, encoding="utf-8")
        self.logger.info(f"Report written: {path}")
        return path
