import argparse
import enum
import logging
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from muskat import __version__, outputs
from muskat.config import settings
from muskat.core.errors import ConfigError
from muskat.schemas.manifest import RunManifest
from muskat.schemas.simulation import SimConfig

logger = logging.getLogger(__name__)


class ExitCode(enum.IntEnum):
    OK = 0
    INVARIANT_FAILURE = 1
    USAGE = 2
    NUMERICAL_FAILURE = 3


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, str]:
    """Flat `key = value` lines; `#` starts a comment"""
    values: Dict[str, str] = {}
    errors = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, separator, value = line.partition("=")
        key = key.strip()
        if not separator or not key:
            errors.append(f"line {number}: expected 'key = value', got {raw.strip()!r}")
            continue
        if key in values:
            errors.append(f"line {number}: duplicate key {key!r}")
            continue
        values[key] = value.strip()
    if errors:
        raise ConfigError("malformed config", errors=errors, path=source)
    return values


def load_config(path: Path) -> SimConfig:
    """Read and validate a run config; every failure is a ConfigError"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config file not found", path=str(path))
    raw = parse_config_text(path.read_text(), source=str(path))
    samples = raw.get("samples_path")
    if samples and not Path(samples).is_absolute():
        raw["samples_path"] = str(path.parent / samples)
    try:
        return SimConfig.model_validate(raw)
    except ValidationError as exc:
        errors = [
            f"{'.'.join(str(part) for part in error['loc']) or 'config'}: {error['msg']}"
            for error in exc.errors()
        ]
        raise ConfigError("invalid config", errors=errors, path=str(path)) from exc


def unsigned(text: str) -> int:
    """argparse type for UINT flags"""
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return value


def positive(text: str) -> int:
    value = unsigned(text)
    if value == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def add_common_flags(parser: argparse.ArgumentParser, with_config: bool = True) -> None:
    if with_config:
        parser.add_argument(
            "--config", type=Path, required=True, help="run config (key = value)"
        )
    parser.add_argument(
        "--out", type=Path, default=None, help="output directory (MUSKAT_OUT_DIR)"
    )
    parser.add_argument(
        "--seed", type=unsigned, default=None, help="random seed (MUSKAT_SEED)"
    )
    parser.add_argument(
        "--threads", type=positive, default=None, help="worker threads (MUSKAT_THREADS)"
    )


@dataclass
class RunOptions:
    """Command options after flag > environment > default resolution.

    `seed` stays None when neither the flag nor MUSKAT_SEED is given, so a
    seed in the run config can still apply.
    """

    command: str
    out_dir: Path
    seed: Optional[int]
    threads: int
    started_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))
    clock: float = field(default_factory=time.perf_counter)

    @classmethod
    def from_args(cls, command: str, args: argparse.Namespace) -> "RunOptions":
        seed = args.seed
        if seed is None and "SEED" in settings.model_fields_set:
            seed = settings.SEED
        return cls(
            command=command,
            out_dir=args.out if args.out is not None else settings.OUT_DIR,
            seed=seed,
            threads=args.threads if args.threads is not None else settings.THREADS,
        )

    def effective_seed(self, config: Optional[SimConfig] = None) -> int:
        if self.seed is not None:
            return self.seed
        if config is not None and config.seed is not None:
            return config.seed
        return settings.SEED

    def prepare_out_dir(self) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir

    def finish(
        self,
        paths: List[Path],
        config: Optional[SimConfig] = None,
        parameters: Optional[Dict[str, Any]] = None,
        failure: Optional[str] = None,
    ) -> Path:
        """Write the manifest for `paths` and check its digests"""
        manifest = RunManifest(
            command=self.command,
            code_version=__version__,
            config=config.model_dump(mode="json") if config is not None else {},
            parameters=parameters or {},
            seed=self.effective_seed(config),
            threads=self.threads,
            started_at=self.started_at,
            wall_clock_seconds=time.perf_counter() - self.clock,
            status="failed" if failure else "ok",
            failure=failure,
            outputs=outputs.inventory(paths),
        )
        path = outputs.write_manifest(self.out_dir, manifest)
        outputs.verify_manifest(path)
        return path
