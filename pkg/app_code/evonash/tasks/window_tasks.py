import logging

from evonash.errors import EvoNashError
from evonash.extensions import celery_app
from evonash.walkforward import window_job

# Set up logging
logger = logging.getLogger(__name__)

__all__ = ['run_window_task']


@celery_app.task(bind=True, name='evonash.tasks.run_window_task')
def run_window_task(self, config_json, window_index, baseline_json=None):
    """
    Celery task to run one walk-forward window.

    Args:
        config_json (str): Serialized RunConfig
        window_index (int): Window to run
        baseline_json (str): Serialized BaselineSpec, or None for the engine

    Returns:
        dict: WindowResult.to_dict()
    """
    try:
        logger.info(f"Executing window task: {window_index}")
        result = window_job(config_json, window_index, baseline_json)
        logger.info(f"Window task completed: {window_index}")
        return result.to_dict()

    except EvoNashError as e:
        # Deterministic failures; retrying would fail the same way
        logger.error(f"Error executing window task {window_index}: {str(e)}")
        raise
    except Exception as e:
        logger.error(f"Error executing window task {window_index}: {str(e)}")
        raise self.retry(exc=e, countdown=10, max_retries=3)
