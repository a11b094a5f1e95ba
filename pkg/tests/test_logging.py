"""
Unit tests for the logging helpers.
"""
import json
import unittest

import numpy as np
import structlog

from osdyn.models import State
from osdyn.utils.logging import plain_values, run_context


class TestLoggingHelpers(unittest.TestCase):
    """Unit tests for event conversion and run context."""

    def test_plain_values(self):
        """Test that numerical values become JSON-ready data."""
        event = {
            "event": "orbit",
            "residual": np.float64(1e-11),
            "moduli": np.array([0.5, 0.25]),
            "floquet": (complex(0.5, 0.1), complex(0.5, -0.1)),
            "state": State(v=1.0, h=0.0),
        }
        out = plain_values(None, "info", event)
        self.assertEqual(out["moduli"], [0.5, 0.25])
        self.assertEqual(out["floquet"], [[0.5, 0.1], [0.5, -0.1]])
        self.assertEqual(out["state"], {"v": 1.0, "h": 0.0})
        self.assertIsInstance(out["residual"], float)
        json.dumps(out)

    def test_run_context(self):
        """Test that run context is bound inside the block and reset after it."""
        with run_context(command="check", config="scenario.toml"):
            bound = structlog.contextvars.get_contextvars()
            self.assertEqual(bound["command"], "check")
        self.assertNotIn("command", structlog.contextvars.get_contextvars())


if __name__ == "__main__":
    unittest.main()
