"""Run bootstrap.

Responsibilities:
- Create the output directory of a run.
- Attach the per-run log file.

Keeps side-effects out of the runner at the composition root.
"""
from pathlib import Path

from lb_lab.config import APP_NAME, APP_VERSION
from lb_lab.errors import TraceWriteError
from lb_lab.utils.logging import add_run_log, logger, remove_run_log


def bootstrap(output_dir: Path) -> int:
    """Prepare `output_dir` and return the handler id of its run.log sink."""
    output_dir = Path(output_dir)
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise TraceWriteError(output_dir, str(e)) from e
    handler_id = add_run_log(output_dir / "run.log")
    logger.info(f"{APP_NAME} {APP_VERSION} writing to {output_dir}")
    return handler_id


def shutdown(handler_id: int) -> None:
    remove_run_log(handler_id)
