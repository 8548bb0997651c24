"""Test infrastructure and unit tests for the krein-lab library and its front end."""
