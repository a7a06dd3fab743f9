import abc


class EncoderBase(abc.ABC):
    """Abstract base class for point-cloud encoders.

    An encoder owns three parameter groups, each under a caller-chosen
    name prefix: the feature extractor, the invariant map used for
    cross-object fusion, and the pose head.
    """

    equivariant = False

    def __init__(self, config, **params):
        self.config = config
        self.params = params

    @abc.abstractmethod
    def init_params(self, rng, prefix: str) -> dict:
        """Initial feature-extractor weights, keyed by full parameter name."""

    @abc.abstractmethod
    def encode(self, points, params, prefix: str):
        """
        Extract per-point features.

        Args:
            points: (M, 3) centered valid points.
            params: mapping name -> Variable.
        """

    @abc.abstractmethod
    def init_invariant_params(self, rng, prefix: str) -> dict:
        pass

    @abc.abstractmethod
    def invariant(self, feature, params, prefix: str):
        """Global (C,) feature used to condition the other object."""

    @abc.abstractmethod
    def init_head_params(self, rng, prefix: str) -> dict:
        pass

    @abc.abstractmethod
    def head(self, feature, params, prefix: str):
        """Return (t_hat, v1, v2), three 3-vector Variables."""

    @abc.abstractmethod
    def fuse(self, invariant, feature):
        """Scale each feature channel by the matching invariant scalar."""

    def _get_out_channels(self):
        return self.config.widths[-1]

    def __getattr__(self, name):
        f = not name.startswith("_get_") and getattr(self, f"_get_{name}", None)
        if f:
            # no placeholder: evaluation threads may race on first access
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
