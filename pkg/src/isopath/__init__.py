"""Exact minimum isometric path partition on graphs of bounded treewidth,
with gadget generators and claim verifiers for the matching hardness
constructions."""

__version__ = "0.1.0"
