"""
Command-line front end for schurext.

Every subcommand reads JSON, runs one engine operation and writes a JSON
report to stdout (or atomically to --out). Exit codes: 0 ok, 1 input error,
2 structural failure (not chordal, breach, not certified), 3 not admissible,
4 usage.
"""

import argparse
import logging
import os
import sys
import tempfile
from typing import List, Optional

from src.config import FILL_STRATEGIES, RunConfig
from src.engine.admissibility import admissible_chordal, admissible_sampled
from src.engine.completion_engine import CompletionEngine
from src.engine.cones import verify_pmn
from src.engine.schur_engine import SchurEngine
from src.entities.errors import (AsymmetricInput, CompletionFailure, ConfigError, DimensionMismatch,
                                 DomainError, InputError, NotAdmissible, NotChordalError, NotPSD,
                                 SchurExtError, UnspecifiedEntry)
from src.entities.multiplier import BlockMultiplier, schur_apply
from src.entities.pattern import clique_tree, is_chordal
from src.utils import serialization

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_STRUCTURAL = 2
EXIT_ADMISSIBILITY = 3
EXIT_USAGE = 4


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that reports usage errors instead of exiting with status 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument('--tol', type=float, default=1e-9, help='Relative PSD tolerance')
    common.add_argument('--trials', type=int, default=1000, help='Number of random trials')
    common.add_argument('--seed', type=int, default=0, help='Random seed')
    common.add_argument('--fill', type=str, default='reject', choices=FILL_STRATEGIES,
                        help='How complete treats non-chordal patterns')
    common.add_argument('--max-ampliation', type=int, default=3, help='Largest ampliation checked')
    common.add_argument('--verify-trials', type=int, default=100,
                        help='Random kernels used to verify a completion')
    common.add_argument('--out', type=str, default=None, help='Write the JSON report here')
    common.add_argument('--verbose', action='store_true', help='Log debug detail to stderr')

    parser = ArgumentParser(prog='schurext',
                            description='Positive completion and factorization of block Schur multipliers')
    sub = parser.add_subparsers(dest='command', parser_class=ArgumentParser)
    sub.required = True

    for name, help_text in (('chordal', 'Decide chordality of a pattern'),
                            ('admissible', 'Check admissibility of a partial multiplier'),
                            ('complete', 'Positive completion of a partial multiplier'),
                            ('factorize', 'Two-sided factorization of a full multiplier')):
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        cmd.add_argument('input', help='Input JSON file')

    apply_cmd = sub.add_parser('apply', parents=[common], help='Apply a multiplier to a scalar kernel')
    apply_cmd.add_argument('input', help='Multiplier JSON file')
    apply_cmd.add_argument('--kernel', type=str, required=True, help='Kernel JSON file')

    pmn = sub.add_parser('verify-pmn', parents=[common], help='Check the cone equalities over M_k')
    pmn.add_argument('--n', type=int, default=2, help='Number of blocks')
    pmn.add_argument('--k', type=int, default=2, help='Block size')

    demo = sub.add_parser('counterexample', parents=[common],
                          help='Show a 4-cycle multiplier with no positive completion')
    demo.add_argument('--grid-step', type=float, default=0.01, help='Real grid spacing')
    demo.add_argument('--grid-radius', type=float, default=1.0, help='Grid half-width')
    demo.add_argument('--phases', type=int, default=36, help='Phases per complex entry')
    return parser


def write_output(document, path: Optional[str]) -> None:
    """Write JSON to stdout, or to `path` via a temporary file and rename."""
    text = serialization.dumps(document)
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.schurext-', suffix='.json')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_chordal(config: RunConfig) -> int:
    p = serialization.pattern_from_json(serialization.load_json(config.input_path))
    verdict = is_chordal(p)
    report = {"n": p.n, "chordal": verdict.chordal}
    if verdict.chordal:
        tree = clique_tree(p)
        report["order"] = list(verdict.order)
        report["cliques"] = [sorted(c) for c in tree.cliques]
        report["tree_edges"] = [list(e) for e in tree.tree_edges]
    else:
        report["cycle"] = list(verdict.cycle)
    write_output(report, config.output_path)
    return EXIT_OK if verdict.chordal else EXIT_STRUCTURAL


def cmd_admissible(config: RunConfig) -> int:
    phi = serialization.multiplier_from_json(serialization.load_json(config.input_path))
    if is_chordal(phi.pattern).chordal:
        verdict = admissible_chordal(phi, config.tol)
        report = {"method": "chordal", "admissible": verdict.admissible, "min_eig": verdict.min_eig,
                  "clique": list(verdict.clique) if verdict.clique else None}
        ok = verdict.admissible
    else:
        sampled = admissible_sampled(phi, config.trials, config.seed, config.tol)
        report = {"method": "sampled", "admissible": not sampled.violation, "min_eig": sampled.min_eig,
                  "trial": sampled.trial if sampled.violation else None,
                  "kernel": serialization.encode_matrix(sampled.kernel) if sampled.violation else None}
        ok = not sampled.violation
    write_output(report, config.output_path)
    return EXIT_OK if ok else EXIT_ADMISSIBILITY


def cmd_complete(config: RunConfig) -> int:
    phi = serialization.multiplier_from_json(serialization.load_json(config.input_path))
    engine = CompletionEngine(admissibility_tol=config.tol)
    verdict = is_chordal(phi.pattern)
    if not verdict.chordal and config.fill_strategy == "reject":
        write_output({"chordal": False, "cycle": list(verdict.cycle)}, config.output_path)
        return EXIT_STRUCTURAL

    try:
        result = engine.complete_with_fill_in(phi)
    except NotAdmissible as exc:
        rejected = exc.verdict
        write_output({"admissible": False, "clique": list(rejected.clique), "min_eig": rejected.min_eig},
                     config.output_path)
        return EXIT_ADMISSIBILITY

    check = engine.verify_extension(phi, result.psi, trials=config.verify_trials, seed=config.seed,
                                    max_ampliation=config.max_ampliation)
    document = serialization.completion_to_json(result)
    try:
        document["gram"] = serialization.gram_to_json(engine.gram_factorize(result))
    except NotPSD as exc:
        logger.warning("completion has no Gram factorization within tolerance: %s", exc)
        document["gram"] = None
    document["verification"] = serialization.extension_report_to_json(check)
    write_output(document, config.output_path)
    return EXIT_OK if check.passed else EXIT_STRUCTURAL


def cmd_factorize(config: RunConfig) -> int:
    phi = serialization.multiplier_from_json(serialization.load_json(config.input_path))
    if not isinstance(phi, BlockMultiplier):
        print(f"error: pattern leaves {len(phi.pattern.missing_pairs())} pairs unspecified; "
              "run `schurext complete` first", file=sys.stderr)
        return EXIT_USAGE
    engine = SchurEngine(tol=config.tol)
    fac = engine.factorize(phi)
    document = serialization.factorization_to_json(fac)
    document["cb_norm_lower_sampled"] = engine.cb_norm_lower_sampled(phi, config.trials, config.seed)
    write_output(document, config.output_path)
    return EXIT_OK


def cmd_apply(config: RunConfig) -> int:
    phi = serialization.multiplier_from_json(serialization.load_json(config.input_path))
    k = serialization.kernel_from_json(serialization.load_json(config.kernel_path))
    if k.n != phi.n:
        raise InputError("n", f"kernel has n={k.n}, multiplier has n={phi.n}")
    outside = [(x, y) for x in range(k.n) for y in range(k.n)
               if (x, y) not in phi.pattern and k.entries[x, y] != 0]
    if outside:
        raise InputError("entries", f"kernel is nonzero at {outside[0]}, outside the pattern")
    out = schur_apply(phi, k)
    write_output({"n": phi.n, "d": phi.d, "entries": serialization.encode_matrix(out)},
                 config.output_path)
    return EXIT_OK


def cmd_verify_pmn(config: RunConfig) -> int:
    report = verify_pmn(config.n, config.k, trials=config.trials, seed=config.seed, tol=config.tol)
    write_output(report.to_json(), config.output_path)
    return EXIT_OK if report.breaches == 0 else EXIT_STRUCTURAL


def cmd_counterexample(config: RunConfig) -> int:
    record = CompletionEngine().counterexample_c4(grid_step=config.grid_step,
                                                  grid_radius=config.grid_radius,
                                                  phases=config.phases)
    write_output(serialization.counterexample_to_json(record), config.output_path)
    return EXIT_OK if record.certified else EXIT_STRUCTURAL


HANDLERS = {
    "chordal": cmd_chordal,
    "admissible": cmd_admissible,
    "complete": cmd_complete,
    "factorize": cmd_factorize,
    "apply": cmd_apply,
    "verify-pmn": cmd_verify_pmn,
    "counterexample": cmd_counterexample,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = RunConfig.from_args(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(level=logging.DEBUG if config.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)

    try:
        return HANDLERS[config.command](config)
    except (InputError, DomainError, AsymmetricInput, DimensionMismatch, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotChordalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    except (NotAdmissible, CompletionFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except UnspecifiedEntry as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchurExtError as exc:
        logger.error("%s", exc)
        return EXIT_INPUT


if __name__ == '__main__':
    sys.exit(main())
