"""protoforge: a self-hosted workbench for exploratory UI prototyping.

Guides a one-line problem statement through structured design-space
exploration (a 3x2 matrix of Person/Approach/Interaction at Idea/Grounding
fidelity), scopes the chosen design into requirements, a specification, and
placeholder data, then builds a single-file HTML prototype step by step with
human approval at every step. All model traffic runs through one gateway
with deterministic record/replay.
"""

__version__ = "0.1.0"
