import os

from celery import Celery

REDIS_URL = os.environ.get('REDIS_URL', 'redis://localhost:6379/0')

# Configure Celery; init_app pushes the broker settings of the active config
celery_app = Celery(
    'evonash',
    broker=REDIS_URL,
    backend=REDIS_URL,
    include=['evonash.tasks.window_tasks']
)
celery_app.conf.update(
    task_serializer='json',
    result_serializer='json',
    accept_content=['json'],
)
