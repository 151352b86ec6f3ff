"""Refinement of graph partitions under a change budget."""
