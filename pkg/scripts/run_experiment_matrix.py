"""Run the full experiment matrix: every scenario preset against every partitioner."""
import sys
from pathlib import Path

# Add package source directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "lb_lab" / "src"))

from lb_lab.config import OUTPUT_ROOT
from lb_lab.errors import LbLabError
from lb_lab.models.partition import PartitionerKind
from lb_lab.services.config_loader import load_spec
from lb_lab.services.harness_service import compare
from lb_lab.utils.logging import logger

SCENARIOS = ["contraction_toy", "contraction", "gravity", "rotation_contraction"]


def run_matrix(full_scale: bool = False) -> None:
    """Compare all partitioners on each scenario (desk sizes unless `full_scale`)."""
    suffix = "_full" if full_scale else ""
    logger.info(f"Starting experiment matrix ({'full' if full_scale else 'desk'} scale)...")

    for scenario in SCENARIOS:
        preset = scenario + suffix
        try:
            specs = [load_spec(preset=preset, overrides={"partitioner": kind.value}) for kind in PartitionerKind]
            report, results = compare(specs, out_dir=OUTPUT_ROOT / preset, xlsx=True)
            calls = ", ".join(f"{label}={r.lb_call_count}" for label, r in sorted(results.items()))
            logger.info(f"{preset}: winner {report.winner}; load-balancing calls {calls}")
        except LbLabError as e:
            logger.error(f"Error running {preset}: {e}")
            raise

    logger.info("Experiment matrix completed successfully!")


if __name__ == "__main__":
    run_matrix(full_scale="--full" in sys.argv[1:])
