"""Output storage."""

from osdyn.storage.local import CsvRowWriter, LocalStorageManager

__all__ = ["CsvRowWriter", "LocalStorageManager"]
