"""Persistent group cache."""
from mcdw.cache.store import CacheError, GroupCache, cache_key, read_tables, write_tables

__all__ = [
    'CacheError',
    'GroupCache',
    'cache_key',
    'read_tables',
    'write_tables',
]
