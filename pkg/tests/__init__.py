"""Unit and integration tests for chaoscomm."""
