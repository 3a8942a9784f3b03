"""Pytest wiring: absltest helpers read absl flags, which pytest never parses."""
from absl import flags


def pytest_configure(config):
  del config
  if not flags.FLAGS.is_parsed():
    flags.FLAGS.mark_as_parsed()
