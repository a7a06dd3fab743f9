from ..data.validate import validate_dataset
from . import EXIT_FAILURE, EXIT_OK, CommandBase, RunConfig


class ValidateCommand(CommandBase):
    name = "validate"
    help = "Check every dataset invariant"

    def add_arguments(self, parser):
        parser.add_argument("--data", required=True, help="Dataset directory")

    def flags(self, args):
        return {"data": args.data}

    def run(self, run_config: RunConfig) -> int:
        problems = validate_dataset(run_config.data)
        for problem in problems:
            self.report({"ERROR"}, problem)
        if problems:
            self.report({"ERROR"}, f"{len(problems)} violation(s) in {run_config.data}")
            return EXIT_FAILURE
        self.report({"INFO"}, f"{run_config.data}: all checks passed")
        return EXIT_OK
