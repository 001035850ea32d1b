# config/cotype/settings.py

# This file defines the CotypeConfigHandler class.
# It does NOT re-read config.ini; it expects a Config instance.

import math

from utils.exceptions import ConfigurationError


def _parse_cotype(raw, key):
    value = raw.strip().lower()
    if value in ('inf', 'infinity', '∞'):
        return math.inf
    try:
        cotype = float(value)
    except ValueError:
        raise ConfigurationError(f"Cotype entry {key}={raw} is not a number", f"cotype.{key}")
    if cotype < 2:
        raise ConfigurationError(f"Cotype entry {key}={raw} is below 2", f"cotype.{key}")
    return cotype


class CotypeConfigHandler:
    def __init__(self, main_config_instance):
        self.main_config = main_config_instance

    def get_rule(self):
        return self.main_config.get('cotype', 'lp_rule', 'max(s,2)').replace(' ', '')

    def get_table(self):
        # Every key except the rule is an explicit entry
        entries = {}
        for key, raw in self.main_config.config.items('cotype'):
            if key == 'lp_rule':
                continue
            entries[key] = _parse_cotype(raw, key)
        return entries

    def get_cotype(self, kind, exponent=None):
        """
        Cotype for 'scalar_field', 'c0' or 'sequence_space' (with exponent s).
        Explicit table entries win; otherwise l_s uses the configured rule.
        """
        table = self.get_table()
        if kind == 'scalar_field':
            return table.get('scalar', 2.0)
        if kind == 'c0':
            return table.get('c0', math.inf)
        if kind != 'sequence_space':
            raise ConfigurationError(f"No cotype table entry for space kind '{kind}'", 'cotype')
        if exponent is None:
            raise ConfigurationError("Sequence space cotype lookup needs an exponent", 'cotype')
        if math.isinf(exponent):
            return table.get('c0', math.inf)

        key = f"l{exponent:g}"
        if key in table:
            return table[key]

        rule = self.get_rule()
        if rule == 'max(s,2)':
            return max(float(exponent), 2.0)
        raise ConfigurationError(f"Unknown cotype rule '{rule}'", 'cotype.lp_rule')
