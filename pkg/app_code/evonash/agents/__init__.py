from evonash.agents.agent_registry import AgentRegistry
from evonash.agents.agent_base import AgentBase
from evonash.agents.league_agent import RidgeBestResponseAgent, RLHybridBestResponseAgent
from evonash.agents.baseline_agents import BASELINE_AGENTS
from evonash.agents.orchestrator import RunOrchestrator

# Create a global agent registry
agent_registry = AgentRegistry()

# Register all agent types
agent_registry.register("ridge", RidgeBestResponseAgent, role="best_response")
agent_registry.register("rl_hybrid", RLHybridBestResponseAgent, role="best_response")
for kind, agent_class in BASELINE_AGENTS.items():
    agent_registry.register(kind, agent_class, role="baseline")

# Create the orchestrator
orchestrator = RunOrchestrator(agent_registry)
