import importlib
import os
from logging import getLogger

from .errors import ContractViolation

logger = getLogger(__name__)

BUILTIN_ENCODERS = {
    "vn_two_scale": {
        "name": "Two-scale vector-neuron DGCNN",
        "encoder": ".vn:TwoScaleVNEncoder",
    },
    "vn_single_scale": {
        "name": "Single-scale vector-neuron DGCNN",
        "encoder": ".vn:SingleScaleVNEncoder",
    },
    "dgcnn": {
        "name": "Plain edge-convolution DGCNN",
        "encoder": ".dgcnn:EdgeConvEncoder",
    },
    "pointnet": {
        "name": "Plain per-point PointNet",
        "encoder": ".pointnet:PointNetEncoder",
    },
}


class Config:
    config_dir: str
    encoders_config_path: str
    encoders: dict
    threads: "int | None"

    def __getattr__(self, name):
        f = not name.startswith("_get_") and getattr(self, f"_get_{name}", None)
        if f:
            setattr(self, name, None)
            v = f()
            setattr(self, name, v)
            return v
        try:
            m = super().__getattr__  # type: ignore
        except AttributeError:
            pass
        else:
            return m(name)
        c = self.__class__
        raise AttributeError(
            f"{c.__module__}.{c.__qualname__} has no attribute '{name}'"
        )

    def _get_config_dir(self):
        """Get the standard config directory."""
        env = os.environ.get("EQUIPAIR_CONFIG_DIR")
        if env:
            return os.path.expanduser(env)
        home = os.path.expanduser("~")
        if os.name == "nt":  # Windows
            config_dir = os.path.join(home, "AppData", "Roaming")
        else:  # Linux/macOS
            config_dir = os.path.join(home, ".config")
        return os.path.join(config_dir, "equipair")

    def _get_encoders_config_path(self):
        """Get the path to the encoders.toml file."""
        return os.path.join(self.config_dir, "encoders.toml")

    def _get_threads(self):
        raw = os.environ.get("EQUIPAIR_THREADS", "").strip()
        if not raw:
            return None
        try:
            n = int(raw)
        except ValueError:
            logger.warning(f"Ignoring EQUIPAIR_THREADS={raw!r}: not an integer")
            return None
        if n < 0:
            logger.warning(f"Ignoring EQUIPAIR_THREADS={n}: negative")
            return None
        # 0 lets the executor pick
        return n or None

    def _load_encoders(self):
        """Built-in encoder kinds, overridden by entries of encoders.toml."""
        encoders = {k: dict(v) for k, v in BUILTIN_ENCODERS.items()}
        config_path = self.encoders_config_path
        if not os.path.exists(config_path):
            return encoders

        try:
            import tomllib  # Standard library in Python 3.11+
        except ImportError:
            try:
                import tomli as tomllib
            except ImportError:
                logger.error(
                    f"Either 'tomllib' (Python 3.11+) or 'tomli' is required to read {config_path}"
                )
                return encoders

        try:
            with open(config_path, "rb") as f:
                user = tomllib.load(f)
        except Exception as e:
            logger.error(
                f"Error loading encoders config from {config_path}: {e}", exc_info=True
            )
            return encoders
        for kind, entry in user.items():
            if isinstance(entry, dict):
                encoders[kind] = entry
            else:
                logger.warning(f"Skipping encoder entry '{kind}': not a table")
        return encoders

    def _get_encoders(self):
        return self._load_encoders()

    def reload_encoders(self):
        self.encoders = self._load_encoders()

    def get_encoder(self, kind, encoder_config):
        entry: dict = self.encoders.get(kind)
        if not entry:
            raise ContractViolation(
                f"Unknown encoder kind '{kind}'. Known: {sorted(self.encoders)}"
            )
        encoder_spec = entry.get("encoder")
        if not encoder_spec or ":" not in encoder_spec:
            raise ContractViolation(
                f"Invalid encoder spec '{encoder_spec}' for kind '{kind}'. Expected format 'module:ClassName'."
            )
        module_part, class_part = encoder_spec.rsplit(":", 1)
        if module_part.startswith("."):
            module_name = f"equipair.encoders{module_part}"
        else:
            module_name = module_part

        module = importlib.import_module(module_name)
        EncoderClass = getattr(module, class_part)
        params = entry.get("params", {})
        return EncoderClass(encoder_config, **params)


config = Config()
