"""Input validation helpers for the raster types used throughout the package.

Conventions:
  ColorImage  -- uint8 array of shape (H, W, 3), RGB
  GrayImage   -- float64 array of shape (H, W), intensities in [0, 255]
  BinaryImage -- bool array of shape (H, W), True = foreground
"""

import numpy as np

from .exceptions import ImageTooSmall, InvalidParameter


def check_color_image(img, min_size=3):
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise InvalidParameter(f"color image must have shape (H, W, 3), got {img.shape}")
    if img.shape[0] < min_size or img.shape[1] < min_size:
        raise ImageTooSmall(f"color image must be at least {min_size}x{min_size}, got {img.shape[:2]}")
    if img.dtype != np.uint8:
        if np.issubdtype(img.dtype, np.integer) or np.issubdtype(img.dtype, np.floating):
            lo, hi = img.min(), img.max()
            if lo < 0 or hi > 255:
                raise InvalidParameter("color channels must lie in [0, 255]")
            img = img.astype(np.uint8)
        else:
            raise InvalidParameter(f"unsupported color image dtype {img.dtype}")
    return img


def check_gray_image(img, min_size=3):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise InvalidParameter(f"gray image must be 2-D, got shape {img.shape}")
    if img.shape[0] < min_size or img.shape[1] < min_size:
        raise ImageTooSmall(f"gray image must be at least {min_size}x{min_size}, got {img.shape}")
    if not np.all(np.isfinite(img)):
        raise InvalidParameter("gray image contains non-finite values")
    return img


def check_binary_image(img):
    img = np.asarray(img)
    if img.ndim != 2:
        raise InvalidParameter(f"binary image must be 2-D, got shape {img.shape}")
    if img.dtype != bool:
        vals = np.unique(img)
        if not np.all(np.isin(vals, (0, 1))):
            raise InvalidParameter("binary image values must be 0/1")
        img = img.astype(bool)
    return img


def check_odd_window(window, minimum=3):
    if not isinstance(window, (int, np.integer)):
        raise InvalidParameter(f"window must be an integer, got {window!r}")
    if window < minimum or window % 2 == 0:
        raise InvalidParameter(f"window must be odd and >= {minimum}, got {window}")
    return int(window)


def check_positive(value, name):
    if not np.isfinite(value) or value <= 0:
        raise InvalidParameter(f"{name} must be > 0, got {value!r}")
    return float(value)
