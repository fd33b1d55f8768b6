"""Evidence bundles: one hash-stamped directory per run.

Everything under the bundle root except ``derived/`` is covered by
MANIFEST.json. Files are written with sorted JSON keys, ISO dates and
'\\n' line endings and carry no timestamps, so identical runs produce
identical bytes.
"""
import hashlib
import json
import logging
import os
import shutil
from dataclasses import dataclass

import pandas as pd

from evonash.errors import ConfigurationError, DataError
from evonash.models.base import to_builtin
from evonash.models.results import DAILY_COLUMNS
from evonash.models.settings import RunConfig

# Set up logging
logger = logging.getLogger(__name__)

MANIFEST = 'MANIFEST.json'
DERIVED = 'derived'
CONFIG_TEXT = 'config.cfg'
RESOLVED_CONFIG = 'resolved_config.json'
REPORT = 'report.json'
WINDOWS = 'windows.csv'
OOS_DAILY = 'oos_daily.csv'
ANNUAL = 'annual_returns.csv'
DIAGNOSTICS = 'diagnostics'


def dumps(data):
    return json.dumps(to_builtin(data), sort_keys=True, indent=2) + '\n'


def _write_text(path, text):
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    return path


def write_json(path, data):
    return _write_text(path, dumps(data))


def write_csv(path, frame, index=False):
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    frame.to_csv(path, index=index, lineterminator='\n')
    return path


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            h.update(chunk)
    return h.hexdigest()


def _hashed_files(root):
    names = []
    for dirpath, dirnames, filenames in os.walk(root):
        rel_dir = os.path.relpath(dirpath, root)
        if rel_dir == DERIVED or rel_dir.startswith(DERIVED + os.sep):
            continue
        for name in filenames:
            rel = os.path.normpath(os.path.join(rel_dir, name)).replace(os.sep, '/')
            if rel != MANIFEST:
                names.append(rel)
    return sorted(names)


def bundle_hash(files):
    """Hash over sorted 'name:sha256' lines"""
    lines = ''.join(f"{name}:{files[name]}\n" for name in sorted(files))
    return hashlib.sha256(lines.encode('utf-8')).hexdigest()


def write_manifest(root):
    files = {name: file_sha256(os.path.join(root, name)) for name in _hashed_files(root)}
    manifest = {'files': files, 'bundle_hash': bundle_hash(files)}
    write_json(os.path.join(root, MANIFEST), manifest)
    return manifest


def verify_bundle(root):
    """True when every manifest entry matches the file on disk"""
    with open(os.path.join(root, MANIFEST), 'r', encoding='utf-8') as f:
        manifest = json.load(f)
    current = {name: file_sha256(os.path.join(root, name)) for name in _hashed_files(root)}
    return current == manifest['files'] and bundle_hash(current) == manifest['bundle_hash']


def _daily_out(daily):
    out = daily[DAILY_COLUMNS].copy()
    out.index = out.index.strftime('%Y-%m-%d')
    out.index.name = 'date'
    return out.reset_index()


def prepare_bundle_dir(root):
    """
    Make ``root`` ready for a fresh bundle.

    An earlier bundle in ``root`` (it has a MANIFEST.json) is removed along
    with its derived outputs. Any other non-empty directory is refused.
    """
    if not os.path.isdir(root):
        if os.path.exists(root):
            raise ConfigurationError(f"bundle path {root} is not a directory")
        os.makedirs(root)
        return root
    entries = os.listdir(root)
    if not entries:
        return root
    if MANIFEST not in entries:
        raise ConfigurationError(f"output directory {root} is not empty and holds no bundle")
    logger.info(f"Replacing the bundle in {root}")
    for name in entries:
        path = os.path.join(root, name)
        if os.path.isdir(path) and not os.path.islink(path):
            shutil.rmtree(path)
        else:
            os.remove(path)
    return root


def write_bundle(root, report, cfg, config_text):
    """
    Write a run's evidence bundle.

    Args:
        root (str): Bundle directory; see prepare_bundle_dir
        report (WalkForwardReport): Aggregated results
        cfg (RunConfig): Resolved configuration
        config_text (str): Raw configuration text, echoed byte for byte

    Returns:
        dict: The manifest
    """
    from evonash.walkforward import annual_returns

    prepare_bundle_dir(root)
    _write_text(os.path.join(root, CONFIG_TEXT), config_text)
    write_json(os.path.join(root, RESOLVED_CONFIG), cfg.model_dump(mode='json'))
    write_json(os.path.join(root, REPORT), report.summary())
    write_csv(os.path.join(root, WINDOWS), pd.DataFrame([w.summary_row() for w in report.windows]))
    write_csv(os.path.join(root, OOS_DAILY), _daily_out(report.daily))
    write_csv(os.path.join(root, ANNUAL), annual_returns(report.daily))
    for w in report.windows:
        write_json(os.path.join(root, DIAGNOSTICS, f"window_{w.index:03d}.json"),
                   {'window': w.index, 'checkpoint': w.checkpoint_id,
                    'validation_score': w.validation_score, 'gap_trace': w.gap_trace,
                    **w.diagnostics})
    manifest = write_manifest(root)
    logger.info(f"Wrote bundle {root} ({len(manifest['files'])} files, "
                f"hash {manifest['bundle_hash'][:12]})")
    return manifest


def write_derived(root, name, data):
    """Write a derived artifact (not covered by the manifest)"""
    path = os.path.join(root, DERIVED, name)
    if isinstance(data, pd.DataFrame):
        return write_csv(path, data)
    return write_json(path, data)


@dataclass
class Bundle:
    root: str
    config: RunConfig
    config_text: str
    report: dict
    windows: pd.DataFrame
    daily: pd.DataFrame

    @property
    def name(self):
        return os.path.basename(os.path.normpath(self.root))

    @property
    def strategy_returns(self):
        return self.daily['strategy_return']


def read_bundle(root):
    """Load a bundle written by ``write_bundle``"""
    required = [CONFIG_TEXT, RESOLVED_CONFIG, REPORT, WINDOWS, OOS_DAILY]
    missing = [name for name in required if not os.path.isfile(os.path.join(root, name))]
    if missing:
        raise DataError(f"{root} is not an evidence bundle (missing {', '.join(missing)})")
    with open(os.path.join(root, CONFIG_TEXT), 'r', encoding='utf-8', newline='') as f:
        config_text = f.read()
    with open(os.path.join(root, RESOLVED_CONFIG), 'r', encoding='utf-8') as f:
        config = RunConfig.model_validate(json.load(f))
    with open(os.path.join(root, REPORT), 'r', encoding='utf-8') as f:
        report = json.load(f)
    windows = pd.read_csv(os.path.join(root, WINDOWS), float_precision='round_trip')
    daily = pd.read_csv(os.path.join(root, OOS_DAILY), float_precision='round_trip',
                        parse_dates=['date']).set_index('date')
    return Bundle(root=root, config=config, config_text=config_text, report=report,
                  windows=windows, daily=daily)
