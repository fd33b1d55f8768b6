import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    """Base configuration class"""
    OUTPUT_DIR = os.environ.get('EVONASH_OUTPUT_DIR', 'runs')
    LOG_LEVEL = os.environ.get('EVONASH_LOG_LEVEL', 'INFO')
    LOG_TO_FILE = os.environ.get('EVONASH_LOG_TO_FILE', 'false').lower() == 'true'

    # Window jobs: 'local' (in-process / process pool) or 'celery'
    TASK_BACKEND = os.environ.get('EVONASH_TASK_BACKEND', 'local')
    DEFAULT_JOBS = int(os.environ.get('EVONASH_JOBS', '1'))

    # Celery / Redis configuration
    CELERY_BROKER_URL = os.environ.get('REDIS_URL', 'redis://localhost:6379/0')
    CELERY_RESULT_BACKEND = os.environ.get('REDIS_URL', 'redis://localhost:6379/0')
    CELERY_TASK_ALWAYS_EAGER = False
    # Seconds to wait for one window result from a worker
    CELERY_RESULT_TIMEOUT = int(os.environ.get('EVONASH_RESULT_TIMEOUT', '3600'))


class DevelopmentConfig(Config):
    """Development configuration"""
    LOG_LEVEL = os.environ.get('EVONASH_LOG_LEVEL', 'DEBUG')


class TestingConfig(Config):
    """Testing configuration"""
    TESTING = True
    LOG_LEVEL = 'WARNING'
    TASK_BACKEND = 'local'
    DEFAULT_JOBS = 1
    CELERY_TASK_ALWAYS_EAGER = True
    CELERY_BROKER_URL = 'memory://'
    CELERY_RESULT_BACKEND = 'cache+memory://'


class ProductionConfig(Config):
    """Production configuration"""
    LOG_TO_FILE = True

    # Some hosts export the TLS scheme under a non-standard name
    broker_url = os.environ.get('REDIS_URL')
    if broker_url and broker_url.startswith('redis+ssl://'):
        broker_url = broker_url.replace('redis+ssl://', 'rediss://', 1)

    CELERY_BROKER_URL = broker_url or Config.CELERY_BROKER_URL
    CELERY_RESULT_BACKEND = broker_url or Config.CELERY_RESULT_BACKEND


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': Config
}
