"""
Run configuration for the schurext command line.
"""

from dataclasses import dataclass
from typing import Optional

from src.entities.errors import ConfigError

COMMANDS = ("chordal", "admissible", "complete", "factorize", "apply", "verify-pmn", "counterexample")
FILL_STRATEGIES = ("reject", "auto")


@dataclass
class RunConfig:
    command: str
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    kernel_path: Optional[str] = None
    tol: float = 1e-9                   # relative PSD tolerance
    trials: int = 1000                  # sampled kernels / random draws
    seed: int = 0
    fill_strategy: str = "reject"       # reject | auto (route non-chordal input through fill-in)
    n: int = 2                          # verify-pmn block count
    k: int = 2                          # verify-pmn block size
    max_ampliation: int = 3
    verify_trials: int = 100            # kernels used by complete to verify its output
    grid_step: float = 0.01             # counterexample grid
    grid_radius: float = 1.0
    phases: int = 36
    verbose: bool = False

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.fill_strategy not in FILL_STRATEGIES:
            raise ConfigError(f"--fill must be one of {', '.join(FILL_STRATEGIES)}")
        if not self.tol >= 0.0:
            raise ConfigError("--tol must be >= 0")
        if self.trials < 1:
            raise ConfigError("--trials must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("--seed must be a 64-bit unsigned integer")
        if self.verify_trials < 0:
            raise ConfigError("--verify-trials must be >= 0")
        if self.max_ampliation < 1:
            raise ConfigError("--max-ampliation must be >= 1")
        if not self.grid_step > 0.0 or not self.grid_radius > 0.0:
            raise ConfigError("--grid-step and --grid-radius must be positive")
        if self.phases < 1:
            raise ConfigError("--phases must be >= 1")
        if self.command == "apply" and not self.kernel_path:
            raise ConfigError("apply needs --kernel")
        if self.command not in ("verify-pmn", "counterexample") and not self.input_path:
            raise ConfigError(f"{self.command} needs an input file")
        return self

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        """Build a validated config from an argparse namespace."""
        return cls(
            command=args.command,
            input_path=getattr(args, "input", None),
            output_path=args.out,
            kernel_path=getattr(args, "kernel", None),
            tol=args.tol,
            trials=args.trials,
            seed=args.seed,
            fill_strategy=args.fill,
            n=getattr(args, "n", 2),
            k=getattr(args, "k", 2),
            max_ampliation=args.max_ampliation,
            verify_trials=args.verify_trials,
            grid_step=getattr(args, "grid_step", 0.01),
            grid_radius=getattr(args, "grid_radius", 1.0),
            phases=getattr(args, "phases", 36),
            verbose=args.verbose,
        ).validate()
