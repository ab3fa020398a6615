"""Multilevel image thresholding by histogram sampling."""
