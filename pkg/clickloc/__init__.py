"""clickloc - sperm whale click localization by sparse coding.

Turns click waveforms into pooled sparse-code features and regresses the
range and azimuth of the emitting animal.
"""

__version__ = "1.0.0"
__author__ = "clickloc Project"
