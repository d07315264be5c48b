"""
    Fast reflect-beam training for IRS-assisted multiuser downlinks.
"""

__version__ = "0.1.0"
