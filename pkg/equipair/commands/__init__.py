"""Command classes behind the ``equipair`` entry point.

Each command declares its flags and runs against a fully resolved
:class:`RunConfig`. ``execute`` returns the process exit code:
0 success, 1 runtime failure, 2 usage or validation error.
"""

import abc
import json
import sys
from dataclasses import dataclass, field, replace
from logging import getLogger

from ..core import file_manager
from ..core.errors import ContractViolation, EquipairError, LoadError
from ..model import EncoderConfig
from ..train import LossConfig, TrainConfig

logger = getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

TOP_LEVEL_KEYS = ("seed", "task", "data", "out")
SECTIONS = {"encoder": EncoderConfig, "train": TrainConfig, "loss": LossConfig}


def read_config_file(path):
    """Sections of a .json or .toml run configuration."""
    if path.endswith(".toml"):
        try:
            import tomllib  # Standard library in Python 3.11+
        except ImportError:
            import tomli as tomllib
        try:
            with open(path, "rb") as f:
                doc = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise LoadError(f"invalid TOML: {e}", path) from None
    else:
        with open(path, "r", encoding="utf-8") as f:
            try:
                doc = json.load(f)
            except json.JSONDecodeError as e:
                raise LoadError(f"invalid JSON: {e.msg}", path, e.lineno) from None
    if not isinstance(doc, dict):
        raise LoadError("run configuration must be a table", path)
    return doc


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    task: str = None
    data: str = None
    out: str = None
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    options: dict = field(default_factory=dict)

    @classmethod
    def resolve(cls, command, file_doc=None, flags=None, sections=None):
        """Defaults, then the config file, then flags (None means unset).

        ``flags`` holds top-level keys, command options and dotted
        ``section.key`` overrides.
        """
        file_doc = dict(file_doc or {})
        flags = {k: v for k, v in (flags or {}).items() if v is not None}
        top, options, parts = {}, {}, {name: {} for name in SECTIONS}
        for key, value in file_doc.items():
            if key in SECTIONS:
                if not isinstance(value, dict):
                    raise ContractViolation(f"config section '{key}' must be a table")
                parts[key].update(value)
            elif key in TOP_LEVEL_KEYS:
                top[key] = value
            else:
                options[key] = value
        for key, value in flags.items():
            section, _, name = key.partition(".")
            if name:
                parts[section][name] = value
            elif key in TOP_LEVEL_KEYS:
                top[key] = value
            else:
                options[key] = value
        if "seed" in top:
            parts["train"]["seed"] = top["seed"]
        unknown = set(options) - set(sections or ())
        if unknown:
            raise ContractViolation(f"Unknown settings for '{command}': {sorted(unknown)}")
        built = {name: SECTIONS[name].from_dict(values) for name, values in parts.items()}
        return cls(
            command=command,
            seed=built["train"].seed,
            task=top.get("task"),
            data=top.get("data"),
            out=top.get("out"),
            options=options,
            **built,
        )

    def with_options(self, **options):
        return replace(self, options={**self.options, **options})

    def to_dict(self):
        return {
            "command": self.command,
            "seed": self.seed,
            "task": self.task,
            "data": self.data,
            "out": self.out,
            "encoder": self.encoder.to_dict(),
            "train": self.train.to_dict(),
            "loss": self.loss.to_dict(),
            **self.options,
        }

    def write(self, out_dir):
        path = file_manager.run_config_path(file_manager.ensure_dir(out_dir))
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=4, sort_keys=True)
            f.write("\n")
        return path


class CommandBase(abc.ABC):
    """One subcommand.

    ``options`` lists the command-specific settings a config file may carry
    besides the shared sections.
    """

    name: str
    help: str
    options: tuple = ()

    def add_arguments(self, parser):
        pass

    def flags(self, args):
        """Flag values keyed as RunConfig.resolve expects."""
        return {}

    def resolve(self, args) -> RunConfig:
        doc = read_config_file(args.config) if getattr(args, "config", None) else {}
        return RunConfig.resolve(self.name, doc, self.flags(args), self.options)

    @abc.abstractmethod
    def run(self, run_config: RunConfig) -> int:
        pass

    def execute(self, args) -> int:
        try:
            run_config = self.resolve(args)
            return self.run(run_config)
        except (ContractViolation, LoadError) as e:
            logger.debug(f"{self.name} rejected its input", exc_info=True)
            self.report({"ERROR"}, str(e))
            return EXIT_USAGE
        except FileNotFoundError as e:
            self.report({"ERROR"}, f"{e.strerror}: {e.filename}")
            return EXIT_USAGE
        except OSError as e:
            logger.error(f"{self.name} failed", exc_info=True)
            self.report({"ERROR"}, str(e))
            return EXIT_FAILURE
        except EquipairError as e:
            logger.error(f"{self.name} failed", exc_info=True)
            self.report({"ERROR"}, f"{type(e).__name__}: {e}")
            return EXIT_FAILURE

    def report(self, levels, message):
        level = next(iter(levels))
        logger.debug(f"[{level}] {message}")
        if "ERROR" in levels:
            print(f"error: {message}", file=sys.stderr)
        elif "WARNING" in levels:
            print(f"warning: {message}", file=sys.stderr)
        else:
            print(message)
