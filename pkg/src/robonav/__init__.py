"""Overhead-camera robot navigation: calibration, colour segmentation, distances, planning."""
from robonav.imaging import ImageRGB, histogram, read_ppm, scale_illumination, write_ppm
from robonav.kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "ImageRGB", "histogram", "read_ppm", "scale_illumination", "write_ppm"]
