"""Adaptive ROI subsampling for visual tracking.

Kalman-filter ROI prediction composed with pluggable detectors under a
keyframing schedule, a CMOS sensor power model, and success-plot/AUC
evaluation.
"""

__version__ = "0.1.0"
