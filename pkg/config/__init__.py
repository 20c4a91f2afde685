"""
Configuration module
"""
from .config import Config, SearchConfig, load_config

__all__ = ['Config', 'SearchConfig', 'load_config']
