"""
Test suite for arr2kirby.

Unit tests per library module, end-to-end corpus checks (marked slow) and
tests for the FastMCP server and observability package.
"""
