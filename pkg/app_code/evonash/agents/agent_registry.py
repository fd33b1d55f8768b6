from evonash.errors import ConfigurationError

ROLES = ('best_response', 'baseline')


class AgentRegistry:
    """
    Registry of trainer classes keyed by the names used in run configs
    (``[training.br] method`` and ``BaselineSpec.kind``).
    """

    def __init__(self):
        self.agent_types = {}
        self.roles = {}

    def register(self, agent_type, agent_class, role):
        """Register an agent class under a name and a role"""
        if role not in ROLES:
            raise ValueError(f"Unknown agent role '{role}'")
        self.agent_types[agent_type] = agent_class
        self.roles[agent_type] = role

    def get_agent(self, agent_type, role=None, **kwargs):
        """
        Create a fresh agent instance.

        Args:
            agent_type (str): Registered name
            role (str): When given, the registered role must match
            **kwargs: Passed to the agent constructor
        """
        if agent_type not in self.agent_types:
            raise ConfigurationError(f"Agent type '{agent_type}' is not registered")
        if role is not None and self.roles[agent_type] != role:
            raise ConfigurationError(f"Agent type '{agent_type}' is not a {role} agent")
        return self.agent_types[agent_type](**kwargs)

    def list_agent_types(self, role=None):
        """List registered agent types, optionally for one role"""
        return [name for name in self.agent_types if role is None or self.roles[name] == role]
