"""Tests for grmkit."""
