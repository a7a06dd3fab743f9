from logging import getLogger

from ..core import file_manager
from ..core.errors import DivergenceError
from ..data.io import load_dataset
from ..model.checkpoint import save_checkpoint
from ..train import BRANCHES
from ..train.report import write_history
from ..train.trainer import train_branch
from . import EXIT_FAILURE, EXIT_OK, CommandBase, RunConfig

logger = getLogger(__name__)


class TrainCommand(CommandBase):
    name = "train"
    help = "Train one branch (or both jointly) on a dataset's train split"
    options = ("branch",)

    def add_arguments(self, parser):
        parser.add_argument("--branch", choices=BRANCHES, required=True)
        parser.add_argument("--data", required=True, help="Dataset directory")
        parser.add_argument("--config", help="Run configuration (.json or .toml)")
        parser.add_argument("--out", required=True, help="Output directory")
        parser.add_argument("--epochs", type=int, default=None)
        parser.add_argument("--batch-size", type=int, default=None)
        parser.add_argument("--learning-rate", type=float, default=None)
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--encoder", default=None, help="Encoder kind")

    def flags(self, args):
        return {
            "branch": args.branch,
            "data": args.data,
            "out": args.out,
            "seed": args.seed,
            "train.epochs": args.epochs,
            "train.batch_size": args.batch_size,
            "train.learning_rate": args.learning_rate,
            "encoder.kind": args.encoder,
        }

    def run(self, run_config: RunConfig) -> int:
        branch = run_config.options["branch"]
        dataset = load_dataset(run_config.data)
        pairs = dataset.split("train")
        try:
            result = train_branch(
                branch, pairs, run_config.train, run_config.loss, run_config.encoder
            )
        except DivergenceError as e:
            self.report({"ERROR"}, f"training diverged at epoch {e.epoch}: {e.cause}")
            return EXIT_FAILURE
        out = file_manager.ensure_dir(run_config.out)
        save_checkpoint(file_manager.checkpoint_path(out, branch), result.trained)
        write_history(file_manager.history_path(out), result.history)
        run_config.write(out)
        self.report(
            {"INFO"},
            f"Trained branch {branch} for {len(result.history)} epochs: "
            f"loss {result.history[0]:.6g} -> {result.history[-1]:.6g}",
        )
        return EXIT_OK
