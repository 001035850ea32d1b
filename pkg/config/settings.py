# config/settings.py

import os
import configparser

from dotenv import load_dotenv

from config.cotype.settings import CotypeConfigHandler
from utils.exceptions import ConfigurationError

DEFAULT_CONFIG_FILE = 'config/config.ini'
MAX_COEFFICIENTS_ENV = 'SUMMABILITY_MAX_COEFFICIENTS'
SCENARIO_PREFIX = 'scenario:'


class Config:
    def __init__(self, config_file=None, create_missing=False):
        load_dotenv()
        self.config = configparser.ConfigParser()
        self.config_file = config_file or DEFAULT_CONFIG_FILE
        self.create_missing = create_missing
        self.load_config()
        # The cotype table lives in its own section, owned by a handler
        self.cotype_handler = CotypeConfigHandler(self)

    def load_config(self):
        # Defaults first so a partial file only overrides what it names
        self._create_default_config()
        if os.path.exists(self.config_file):
            try:
                self.config.read(self.config_file)
            except configparser.Error as e:
                raise ConfigurationError(f"Cannot parse {self.config_file}: {e}")
        elif self.create_missing:
            self.save()

    def _create_default_config(self):
        """
        Populates the default settings.
        Written to disk only when create_missing is set and no file exists.
        """
        self.config['numerics'] = {
            'max_coefficients': str(2 ** 24),
            'ascent_restarts': '16',
            'ascent_tol': '1e-10',
            'ascent_max_iters': '1000',
            'bruteforce_resolution': '64',
            'bruteforce_budget': str(2 ** 20)
        }
        self.config['bounds'] = {
            'default_coincidence_s': '1'
        }
        self.config['experiments'] = {
            'n_grid': '2,4,8,16,32,64',
            'seeds': '0,1,2,3,4',
            'analytic_tolerance': '1e-9',
            'randomized_tolerance': '0.15',
            'workers': '1'
        }
        self.config['output'] = {
            'directory': 'artifacts',
            'format': 'table'
        }
        self.config['logging'] = {
            'level': 'INFO',
            'file': '',
            'format': 'text'
        }
        # Cotype of classical spaces: cot(l_s) = max(s, 2), cot(c0) = inf
        self.config['cotype'] = {
            'scalar': '2',
            'l1': '2',
            'l2': '2',
            'c0': 'inf',
            'lp_rule': 'max(s,2)'
        }

    def get(self, section, key, fallback=None):
        """Get a configuration value."""
        return self.config.get(section, key, fallback=fallback)

    def getint(self, section, key, fallback=None):
        """Get an integer configuration value."""
        try:
            return self.config.getint(section, key, fallback=fallback)
        except ValueError:
            raise ConfigurationError(f"[{section}] {key} must be an integer", f"{section}.{key}")

    def getfloat(self, section, key, fallback=None):
        """Get a float configuration value."""
        try:
            return self.config.getfloat(section, key, fallback=fallback)
        except ValueError:
            raise ConfigurationError(f"[{section}] {key} must be a number", f"{section}.{key}")

    def getlist(self, section, key, cast=str, fallback=None):
        """Get a comma-separated list."""
        raw = self.config.get(section, key, fallback=None)
        if raw is None:
            return fallback
        try:
            return [cast(item.strip()) for item in raw.split(',') if item.strip()]
        except ValueError:
            raise ConfigurationError(f"[{section}] {key} has a malformed entry: {raw}", f"{section}.{key}")

    def set(self, section, key, value):
        """Set a configuration value."""
        if not self.config.has_section(section):
            self.config.add_section(section)
        self.config.set(section, key, str(value))

    def save(self):
        """Save configuration changes to file."""
        config_dir = os.path.dirname(self.config_file)
        if config_dir:
            os.makedirs(config_dir, exist_ok=True)
        with open(self.config_file, 'w') as f:
            self.config.write(f)

    def get_max_coefficients(self):
        """Tensor memory budget; the environment variable wins over the file."""
        override = os.environ.get(MAX_COEFFICIENTS_ENV)
        if override:
            try:
                return int(override)
            except ValueError:
                raise ConfigurationError(f"{MAX_COEFFICIENTS_ENV} must be an integer", MAX_COEFFICIENTS_ENV)
        return self.getint('numerics', 'max_coefficients', 2 ** 24)

    def get_scenario_overrides(self, name):
        """Flat key-value overrides from a [scenario:<name>] section."""
        section = f"{SCENARIO_PREFIX}{name}"
        if not self.config.has_section(section):
            return {}
        return dict(self.config.items(section))

    def get_cotype(self, kind, exponent=None):
        """Cotype of a space descriptor kind, delegated to the cotype table."""
        return self.cotype_handler.get_cotype(kind, exponent)
