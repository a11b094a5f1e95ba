"""
Local storage manager for command outputs on the local filesystem.
"""

import json
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import pandas as pd
from pydantic import BaseModel

CSV_OPTIONS: Dict[str, Any] = {"index": False, "lineterminator": "\n", "encoding": "utf-8"}


class LocalStorageManager:
    """Storage manager for local filesystem operations."""

    def __init__(self, output_dir: Union[str, Path]) -> None:
        """
        Initialize the local storage manager.

        Args:
            output_dir: Directory against which relative output paths are resolved
        """
        self.output_dir = Path(output_dir)

    def resolve(self, path: Union[str, Path]) -> Path:
        """
        Resolve an output path and make sure its parent directory exists.

        Args:
            path: Absolute path, or a path relative to the output directory

        Returns:
            The resolved path
        """
        target = Path(path)
        if not target.is_absolute():
            target = self.output_dir / target
        os.makedirs(target.parent, exist_ok=True)
        return target

    def save_frame(self, frame: pd.DataFrame, path: Union[str, Path]) -> Path:
        """
        Write a table as CSV with a header row and shortest round-trip floats.

        Args:
            frame: Table to write
            path: Output file

        Returns:
            Path where the table was saved
        """
        output_path = self.resolve(path)
        frame.to_csv(output_path, **CSV_OPTIONS)
        return output_path

    def save_text(self, text: str, path: Union[str, Path]) -> Path:
        output_path = self.resolve(path)
        with open(output_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        return output_path

    def save_json(self, data: Union[BaseModel, Dict[str, Any], List[Any]], path: Union[str, Path]) -> Path:
        """
        Save a record as indented JSON.

        Args:
            data: Pydantic model or plain JSON-compatible data
            path: Output file

        Returns:
            Path where the record was saved
        """
        output_path = self.resolve(path)
        payload = data.model_dump(mode="json") if isinstance(data, BaseModel) else data
        with open(output_path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
        return output_path

    def read_text(self, path: Union[str, Path]) -> str:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()

    def row_writer(self, path: Union[str, Path], columns: Optional[Sequence[str]] = None) -> "CsvRowWriter":
        """Open an incremental CSV writer that truncates ``path`` first."""
        return CsvRowWriter(self.resolve(path), columns)


class CsvRowWriter:
    """Appends rows to a CSV file one at a time; the first row fixes the columns."""

    def __init__(self, path: Path, columns: Optional[Sequence[str]] = None) -> None:
        self.path = path
        self.columns: Optional[List[str]] = list(columns) if columns else None
        self.rows = 0
        if self.path.exists():
            self.path.unlink()

    def write(self, row: Dict[str, Any]) -> None:
        """
        Append one row, writing the header before the first one.

        Args:
            row: Column values; missing columns are left empty
        """
        if self.columns is None:
            self.columns = list(row.keys())
        frame = pd.DataFrame([row], columns=self.columns)
        frame.to_csv(self.path, mode="a", header=self.rows == 0, **CSV_OPTIONS)
        self.rows += 1
