from datetime import datetime
from typing import Any, Dict, List, Optional

from pydantic import BaseModel

CSV_SCHEMA_VERSION = "1"


class OutputFile(BaseModel):
    name: str
    sha256: str
    size_bytes: int


class RunManifest(BaseModel):
    command: str
    code_version: str
    csv_schema_version: str = CSV_SCHEMA_VERSION
    config: Dict[str, Any] = {}
    parameters: Dict[str, Any] = {}
    seed: int
    threads: int
    started_at: datetime
    wall_clock_seconds: float
    status: str = "ok"
    failure: Optional[str] = None
    outputs: List[OutputFile] = []
