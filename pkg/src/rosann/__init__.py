"""Annotation workbench for robot interaction recordings.

Reads ROS bag files directly, extracts playable media with a
frame-accurate timeline index, manages tiered interval annotations with
codebooks and transcripts, computes summary statistics, and serves it
all over HTTP for the bundled web interface.  An LLM-assisted loop can
draft annotations from the transcript and privacy-filtered frames.
"""

from rosann.errors import RosannError

__version__ = "0.1.0"

__all__ = ["RosannError", "__version__"]
