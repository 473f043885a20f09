"""
Pipeline Logger for the report command.

Captures the stages of a process -> fit -> compare run, with per-center
first-arrival diagnostics, and saves them as JSON for later inspection.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)


@dataclass
class PipelineStep:
    """Represents a single step in the report pipeline."""
    step_name: str
    step_type: str  # "stage", "diagnostic", "result"
    timestamp: str
    input_data: Optional[dict] = None
    output_data: Optional[dict] = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


class PipelineLogger:
    """Logs and saves the steps of one report run."""

    def __init__(self, output_dir: Path, run_id: str):
        """Initialize the pipeline logger.

        Args:
            output_dir: Report directory; logs go to its ``pipeline_logs`` subdirectory
            run_id: Identifier for this run
        """
        self.output_dir = Path(output_dir)
        self.run_id = run_id
        self.steps: list[PipelineStep] = []
        self.stage_counts: dict[str, int] = {}

        self.logs_dir = self.output_dir / "pipeline_logs"
        self.logs_dir.mkdir(parents=True, exist_ok=True)

        logger.debug(f"PipelineLogger initialized: {self.logs_dir}")

    def log_step(
        self,
        step_name: str,
        step_type: str,
        input_data: Optional[dict] = None,
        output_data: Optional[dict] = None,
        **metadata,
    ) -> PipelineStep:
        """Record one step and return it."""
        step = PipelineStep(
            step_name=step_name,
            step_type=step_type,
            timestamp=datetime.now().isoformat(),
            input_data=input_data,
            output_data=output_data,
            metadata=metadata,
        )
        self.steps.append(step)
        self.stage_counts[step_type] = self.stage_counts.get(step_type, 0) + 1
        return step

    def log_stage(self, stage: str, input_data: Optional[dict] = None, output_data: Optional[dict] = None, **metadata):
        return self.log_step(stage, "stage", input_data, output_data, **metadata)

    def log_first_arrivals(self, centers) -> None:
        """One diagnostic step per processed center (CenterResult objects)."""
        for result in centers:
            self.log_step(
                f"first_arrival_{result.center_ghz:g}ghz",
                "diagnostic",
                output_data=result.to_dict(),
                center_ghz=result.center_ghz,
            )

    def save_summary(self):
        """Save a compact summary of all steps."""
        summary = {
            "run_id": self.run_id,
            "total_steps": len(self.steps),
            "step_counts": self.stage_counts,
            "steps": [
                {
                    "step_name": s.step_name,
                    "step_type": s.step_type,
                    "timestamp": s.timestamp,
                    "metadata": s.metadata,
                }
                for s in self.steps
            ],
        }

        with open(self.logs_dir / "pipeline_summary.json", "w", encoding="utf-8") as f:
            json.dump(summary, f, indent=2, ensure_ascii=False)

        logger.info(f"Pipeline summary saved: {len(self.steps)} steps logged")

    def save_full_log(self):
        """Save every step with its inputs and outputs."""
        full_log = {
            "run_id": self.run_id,
            "timestamp": datetime.now().isoformat(),
            "total_steps": len(self.steps),
            "steps": [s.to_dict() for s in self.steps],
        }

        with open(self.logs_dir / "full_pipeline_log.json", "w", encoding="utf-8") as f:
            json.dump(full_log, f, indent=2, ensure_ascii=False)

        logger.debug(f"Full pipeline log saved to {self.logs_dir / 'full_pipeline_log.json'}")
