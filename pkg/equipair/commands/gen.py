from logging import getLogger

from ..data import NUM_POINTS
from ..data.io import save_dataset
from ..data.synthetic import TASKS, gen_synthetic
from . import EXIT_OK, CommandBase, RunConfig

logger = getLogger(__name__)


class GenCommand(CommandBase):
    name = "gen"
    help = "Generate a synthetic lid or peg dataset"
    options = ("count", "num_points")

    def add_arguments(self, parser):
        parser.add_argument("--task", choices=TASKS, required=True)
        parser.add_argument("--count", type=int, required=True, help="Number of pairs")
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--out", required=True, help="Dataset directory")
        parser.add_argument("--num-points", type=int, default=None)
        parser.add_argument("--config", help="Run configuration (.json or .toml)")

    def flags(self, args):
        return {
            "task": args.task,
            "count": args.count,
            "seed": args.seed,
            "out": args.out,
            "num_points": args.num_points,
        }

    def run(self, run_config: RunConfig) -> int:
        count = run_config.options["count"]
        num_points = run_config.options.get("num_points", NUM_POINTS)
        run_config = run_config.with_options(num_points=num_points)
        manifest, pairs = gen_synthetic(run_config.task, count, run_config.seed, num_points)
        save_dataset(run_config.out, manifest, pairs)
        run_config.write(run_config.out)
        self.report(
            {"INFO"},
            f"Generated {len(pairs)} {run_config.task} pairs in {run_config.out} "
            f"(train {len(manifest.train)}, test {len(manifest.test)})",
        )
        return EXIT_OK
