import os
import logging
from dotenv import load_dotenv

from evonash.config import config
from evonash.extensions import celery_app

__version__ = "0.3.0"

# Set up logging
logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def init_app(config_name=None):
    """Configure logging and the task backend for the requested environment.

    Args:
        config_name (str): One of the keys of ``evonash.config.config``;
            defaults to ``EVONASH_ENV`` or 'default'

    Returns:
        type: The active configuration class
    """
    # Load environment variables
    load_dotenv()

    if config_name is None:
        config_name = os.getenv('EVONASH_ENV', 'default')
    settings = config[config_name]

    logging.basicConfig(level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
                        format=LOG_FORMAT)
    if settings.LOG_TO_FILE:
        log_dir = os.path.join(settings.OUTPUT_DIR, 'logs')
        os.makedirs(log_dir, exist_ok=True)
        file_handler = logging.FileHandler(os.path.join(log_dir, 'evonash.log'))
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logging.getLogger('evonash').addHandler(file_handler)

    celery_app.conf.update(
        broker_url=settings.CELERY_BROKER_URL,
        result_backend=settings.CELERY_RESULT_BACKEND,
        task_always_eager=settings.CELERY_TASK_ALWAYS_EAGER,
        task_eager_propagates=True,
    )

    logger.info(f"evonash {__version__} initialized with {config_name} configuration")
    return settings
