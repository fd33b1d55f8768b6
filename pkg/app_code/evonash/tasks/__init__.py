from evonash.tasks.window_tasks import *
