from logging import getLogger

from ..core.errors import ContractViolation
from ..data.io import load_dataset
from ..model.checkpoint import load_checkpoint
from ..train.evaluate import evaluate_joint, evaluate_two_step
from ..train.report import report
from . import EXIT_OK, CommandBase, RunConfig

logger = getLogger(__name__)


def _require_prefix(params, prefix, path):
    foreign = [n for n in params.names() if not n.startswith(prefix)]
    if foreign or not params.tensors:
        raise ContractViolation(f"{path} does not hold '{prefix}*' tensors only")


class EvalCommand(CommandBase):
    name = "eval"
    help = "Evaluate two-step (or joint) checkpoints on a dataset split"
    options = ("ckpt_b", "ckpt_a", "ckpt_joint", "oracle_gt", "split")

    def add_arguments(self, parser):
        parser.add_argument("--data", required=True, help="Dataset directory")
        parser.add_argument("--ckpt-b", default=None, help="Branch B checkpoint")
        parser.add_argument("--ckpt-a", default=None, help="Branch A checkpoint")
        parser.add_argument("--ckpt-joint", default=None, help="Joint-variant checkpoint")
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--out", required=True, help="Output directory")
        parser.add_argument(
            "--oracle-gt",
            action="store_true",
            default=None,
            help="Use ground-truth poses in place of predictions",
        )
        parser.add_argument("--split", choices=("train", "test"), default=None)

    def flags(self, args):
        return {
            "data": args.data,
            "ckpt_b": args.ckpt_b,
            "ckpt_a": args.ckpt_a,
            "ckpt_joint": args.ckpt_joint,
            "seed": args.seed,
            "out": args.out,
            "oracle_gt": args.oracle_gt,
            "split": args.split,
        }

    def run(self, run_config: RunConfig) -> int:
        opts = run_config.options
        split = opts.get("split", "test")
        pairs = load_dataset(run_config.data).split(split)
        if opts.get("oracle_gt"):
            ev = evaluate_two_step(None, None, pairs, run_config.seed, oracle=True)
        elif opts.get("ckpt_joint"):
            params = load_checkpoint(opts["ckpt_joint"])
            if params.variant != "joint":
                raise ContractViolation(f"{opts['ckpt_joint']} is a '{params.variant}' checkpoint")
            ev = evaluate_joint(params, pairs, run_config.seed)
        else:
            if not (opts.get("ckpt_b") and opts.get("ckpt_a")):
                raise ContractViolation("eval needs --ckpt-b and --ckpt-a, --ckpt-joint or --oracle-gt")
            params_b = load_checkpoint(opts["ckpt_b"])
            params_a = load_checkpoint(opts["ckpt_a"])
            _require_prefix(params_b, "b.", opts["ckpt_b"])
            _require_prefix(params_a, "a.", opts["ckpt_a"])
            diff = params_b.config.first_difference(params_a.config)
            if diff:
                raise ContractViolation(
                    f"checkpoint encoder configs differ in '{diff}': "
                    f"{getattr(params_b.config, diff)!r} vs {getattr(params_a.config, diff)!r}"
                )
            ev = evaluate_two_step(params_b, params_a, pairs, run_config.seed)
        ev.config["split"] = split
        report(ev, run_config.out)
        run_config.write(run_config.out)
        o = ev.overall
        self.report(
            {"INFO"},
            f"{o.n} pairs: rmse_t {o.rmse_t:.4g}, rmse_r {o.rmse_r_deg:.4g} deg, chamfer {o.chamfer:.4g}",
        )
        return EXIT_OK
