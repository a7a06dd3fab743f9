from logging import getLogger

from ..core.errors import ContractViolation
from ..data.io import load_off, save_xyz
from ..data.sampling import poisson_disk_sample
from . import EXIT_OK, CommandBase, RunConfig

logger = getLogger(__name__)


class SampleCommand(CommandBase):
    name = "sample"
    help = "Blue-noise sample the surface of an OFF mesh into an .xyz cloud"
    options = ("mesh", "n")

    def add_arguments(self, parser):
        parser.add_argument("--mesh", required=True, help="Triangle mesh in OFF format")
        parser.add_argument("--out", required=True, help="Output .xyz file")
        parser.add_argument("--n", type=int, default=1024, help="Number of points")
        parser.add_argument("--seed", type=int, default=None)

    def flags(self, args):
        return {"mesh": args.mesh, "out": args.out, "n": args.n, "seed": args.seed}

    def run(self, run_config: RunConfig) -> int:
        n = run_config.options["n"]
        if n <= 0:
            raise ContractViolation(f"--n must be positive, got {n}")
        mesh = load_off(run_config.options["mesh"])
        cloud, radius = poisson_disk_sample(mesh, n, run_config.seed, return_radius=True)
        save_xyz(run_config.out, cloud)
        self.report({"INFO"}, f"Wrote {len(cloud)} points to {run_config.out} (min spacing {radius:.6g})")
        return EXIT_OK
