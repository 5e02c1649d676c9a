import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

# "pinned" is derandomized so every run draws the same examples.  Use
# HYPOTHESIS_PROFILE=explore with --hypothesis-seed=N to draw a different stream.
settings.register_profile(
    "pinned",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
    database=None,
)
settings.register_profile(
    "explore",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
    database=None,
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "pinned"))
