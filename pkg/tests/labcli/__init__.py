"""Unit tests for the labcli package's settings, verbs and verification suites."""
