"""Run configuration files: commented INI text resolved into a RunConfig.

Section names map onto the nested settings models: ``[execution]`` fills
``RunConfig.execution``, ``[training.psro]`` fills ``RunConfig.training.psro``
and ``[run]`` holds the top-level keys (seed, output_dir, benchmarks).
``[stress.<name>]`` sections add scenarios or override default ones by name.
"""
import configparser
import logging
import os

from pydantic import ValidationError

from evonash.errors import ConfigurationError
from evonash.models.settings import DEFAULT_STRESS_SCENARIOS, RunConfig

# Set up logging
logger = logging.getLogger(__name__)

TOP_SECTION = 'run'
STRESS_PREFIX = 'stress.'
NULL_VALUES = ('', 'none', 'null')


def _value(text):
    return None if text.strip().lower() in NULL_VALUES else text.strip()


def _nest(tree, path, key, value, section):
    node = tree
    for part in path:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigurationError(f"[{section}] conflicts with the key '{part}'")
        node = child
    node[key] = value


def config_to_dict(text):
    """
    Parse INI text into the nested dictionary RunConfig validates.

    Args:
        text (str): Raw configuration text

    Returns:
        dict
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#', ';'))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigurationError(f"cannot parse run config: {e}")

    tree = {}
    stress = {s.name: s.model_dump() for s in DEFAULT_STRESS_SCENARIOS}
    for section in parser.sections():
        items = {k: _value(v) for k, v in parser.items(section)}
        if section == TOP_SECTION:
            for key, value in items.items():
                _nest(tree, [], key, value, section)
        elif section.startswith(STRESS_PREFIX):
            name = section[len(STRESS_PREFIX):]
            stress[name] = {**stress.get(name, {}), **items, 'name': name}
        else:
            path = section.split('.')
            for key, value in items.items():
                _nest(tree, path, key, value, section)
    tree['stress'] = list(stress.values())
    return tree


def resolve_config(text, overrides=None):
    """
    Validate configuration text, applying command-line overrides on top.

    Args:
        text (str): Raw configuration text
        overrides (dict): Top-level values such as ``seed`` or ``output_dir``

    Returns:
        RunConfig
    """
    data = config_to_dict(text)
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"invalid run config: {e}")


def load_run_config(path, overrides=None):
    """
    Read and resolve a run configuration file.

    Returns:
        tuple: (RunConfig, raw text echoed into the evidence bundle)
    """
    if not os.path.isfile(path):
        raise ConfigurationError(f"config file not found: {path}")
    with open(path, 'r', encoding='utf-8', newline='') as f:
        text = f.read()
    cfg = resolve_config(text, overrides)
    logger.info(f"Loaded run config {path} (seed={cfg.seed})")
    return cfg, text
