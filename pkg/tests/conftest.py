import hypothesis
from hypothesis import settings

settings.register_profile(
    "lab", deadline=None, max_examples=40, derandomize=True,
    suppress_health_check=[hypothesis.HealthCheck.too_slow],
)
settings.load_profile("lab")
