import logging
from abc import ABC, abstractmethod

from evonash.errors import ConfigurationError, ContractError

# Set up logging
logger = logging.getLogger(__name__)


class AgentBase(ABC):
    """
    Base class for per-window trainers (best responses and baselines).

    A trainer is built fresh for every window, so state and history only
    ever describe the window it was created for.
    """

    # Keys every request must carry; subclasses extend this
    required_keys = ()

    def __init__(self, name=None, window=None, **kwargs):
        """
        Args:
            name (str): Label used in log lines; defaults to the class name
            window (int): Walk-forward window the trainer belongs to
            **kwargs: Trainer settings (stored in ``config``)
        """
        self.name = name or self.__class__.__name__
        self.window = window
        self.state = {}
        self.history = []
        self.config = kwargs

        logger.debug(f"{self.name} created for window {window}")

    @abstractmethod
    def process(self, data, **kwargs):
        """
        Run one task on a window's data.

        Args:
            data (dict): Task inputs (features, regimes, returns, ...)
            **kwargs: Task options

        Returns:
            dict: Task outputs
        """

    def _dispatch(self, method_map, task, data, **kwargs):
        if task not in method_map:
            raise ConfigurationError(f"{self.__class__.__name__} has no task '{task}'")
        missing = [key for key in self.required_keys if key not in data]
        if missing:
            raise ContractError(f"{self.name}: request is missing {', '.join(missing)}")
        return method_map[task](data, **kwargs)

    def update_state(self, key, value):
        self.state[key] = value

    def get_state(self, key, default=None):
        return self.state.get(key, default)

    def add_to_history(self, entry):
        self.history.append(entry)

    def get_history(self):
        return self.history

    def __repr__(self):
        return f"<{self.__class__.__name__} name={self.name} window={self.window}>"
