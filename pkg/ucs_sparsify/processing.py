import asyncio
from typing import Callable, Optional, TypeVar

from rich.console import Console
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    TextColumn,
    TimeElapsedColumn,
)

R = TypeVar("R")

# A step callback receives the number of completed steps so far.
StepCallback = Callable[[int], None]


def _no_progress(_: int) -> None:
    pass


async def run_with_progress(
    work: Callable[[StepCallback], R],
    total: int,
    description: str,
    enabled: bool = True,
    progress_cols: Optional[tuple] = None,
    **task_fields,
) -> R:
    """
    Runs a blocking computation in a worker thread while a progress bar follows it.

    Args:
        work: A function taking a step callback and returning the computation's result.
        total: The number of steps ``work`` will report.
        description: The description to display on the progress bar.
        enabled: When False, runs ``work`` without rendering anything.
        progress_cols: An optional tuple of progress columns for Rich Progress.
        **task_fields: Additional fields to add to the progress task.
    """
    if not enabled:
        return await asyncio.to_thread(work, _no_progress)

    if not progress_cols:
        progress_cols = (
            TextColumn("[bold blue]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
        )
    with Progress(*progress_cols, console=Console(stderr=True)) as progress:
        p_task = progress.add_task(description, total=total, **task_fields)

        def advance(done: int) -> None:
            progress.update(p_task, completed=done)

        return await asyncio.to_thread(work, advance)
