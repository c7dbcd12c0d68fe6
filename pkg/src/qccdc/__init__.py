"""qccdc: a surface-code to trapped-ion QCCD compiler and design-space
exploration toolkit."""

__version__ = "0.1.0"
