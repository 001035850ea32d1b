# tests/test_utils.py
"""
Test suite for seeding, logging setup and error serialization.
"""

import json
import logging

from utils.exceptions import RegionError, SizeError
from utils.logger import setup_logging
from utils.seeding import derive_seed, spawn_generator


class TestSeeding:
    """Test per-work-item seed derivation"""

    def test_derive_seed_is_stable(self):
        """Test derived seeds depend only on the master seed and keys"""
        assert derive_seed(0, 16) == derive_seed(0, 16)
        assert derive_seed(0, 16) != derive_seed(0, 32)
        assert derive_seed(0, 16) != derive_seed(1, 16)

    def test_generators_are_independent_of_order(self):
        """Test each work item's stream is the same whichever order items are drawn in"""
        forward = [spawn_generator(5, 8, restart).random() for restart in range(3)]
        backward = [spawn_generator(5, 8, restart).random() for restart in reversed(range(3))]
        assert forward == backward[::-1]
        assert len(set(forward)) == 3


class TestErrors:
    """Test error payloads"""

    def test_region_error_to_dict(self):
        """Test region errors serialize with their details"""
        error = RegionError("q too large", condition="q not in [1,2]", formula='exact_index_c0')
        assert error.to_dict() == {
            'error': 'REGION_ERROR',
            'message': 'q too large',
            'details': {'condition': 'q not in [1,2]', 'formula': 'exact_index_c0'},
        }

    def test_size_error_keeps_budget(self):
        """Test size errors keep requested and budget"""
        error = SizeError("too big", requested=10, budget=5)
        assert error.details == {'requested': 10, 'budget': 5}


class TestLogging:
    """Test logging configuration"""

    def test_json_log_file(self, tmp_config, tmp_path):
        """Test JSON log lines are written to the configured file"""
        log_file = tmp_path / 'logs' / 'run.log'
        tmp_config.set('logging', 'file', str(log_file))
        tmp_config.set('logging', 'format', 'json')
        setup_logging(tmp_config)
        logging.getLogger('summability.test').warning('sweep finished')
        for handler in logging.getLogger().handlers:
            handler.flush()

        entry = json.loads(log_file.read_text().splitlines()[-1])
        assert entry['message'] == 'sweep finished'
        assert entry['levelname'] == 'WARNING'
