"""
Acceptance run for schurext: exercises every engine end to end on random
instances and prints a pass/fail summary. Exit status is 0 iff every check passes.
"""

import contextlib
import io
import json
import os
import sys
import tempfile
import time
from fractions import Fraction
from itertools import combinations

import numpy as np

from src.engine.cones import cmin_member_exact, dmax_sample, verify_pmn
from src.engine.schur_engine import SchurEngine
from src.entities.multiplier import BlockMultiplier, ScalarKernel, schur_apply
from src.entities.pattern import Pattern, fill_in
from src.main import main
from src.utils import serialization
from src.utils.linalg import (HermitianMatrix, complex_gaussian, eigh, operator_norm, psd_check,
                              random_hermitian, random_psd)


def print_section(title):
    print(f"\n{title}")
    print("=" * 50)


def run_cli(argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
        code = main(argv)
    return code, out.getvalue()


def check_chordal_completion(workdir, instances=200):
    rng = np.random.default_rng(1)
    failures = 0
    for t in range(instances):
        n, d = int(rng.integers(2, 13)), int(rng.integers(1, 4))
        edges = [(x, y) for x, y in combinations(range(n), 2) if rng.random() < 0.3]
        pattern, _ = fill_in(Pattern.from_edges(n, edges))
        full = random_psd(n * d, rng)
        phi = BlockMultiplier.from_matrix(full, n, d).restrict(pattern)
        path = os.path.join(workdir, f"instance_{t}.json")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(serialization.dumps(serialization.multiplier_to_json(phi)))
        code, out = run_cli(["complete", path, "--verify-trials", "10", "--seed", str(t)])
        if code != 0:
            failures += 1
            continue
        result = serialization.completion_from_json(json.loads(out))
        loaded = serialization.multiplier_from_json(serialization.load_json(path))
        exact = all(np.array_equal(result.psi.block(*p), loaded.block(*p)) for p in pattern.pairs)
        if not exact or result.min_eig < -1e-8 * result.psi.assemble().norm:
            failures += 1
    return failures == 0, f"{instances - failures}/{instances} completed"


def check_cone_equalities(trials=500):
    worst, breaches = 0.0, 0
    for n in range(1, 5):
        for k in range(1, 5):
            report = verify_pmn(n, k, trials=trials, seed=n * 10 + k)
            breaches += report.breaches
            worst = max(worst, report.max_err)
    return breaches == 0 and worst <= 1e-8, f"breaches={breaches} max_err={worst:.2e}"


def check_positivity_equivalences(instances=100):
    rng = np.random.default_rng(3)
    engine = SchurEngine()
    disagreements = 0
    for psd in (True, False):
        for _ in range(instances):
            n, d = int(rng.integers(1, 9)), int(rng.integers(1, 3))
            if psd:
                matrix = random_psd(n * d, rng)
            else:
                h = random_hermitian(n * d, rng).entries
                # trace zero and nonzero, so some eigenvalue is negative
                matrix = h - np.trace(h).real / (n * d) * np.eye(n * d) if n * d > 1 else -np.ones((1, 1))
            report = engine.positivity_equivalences(BlockMultiplier.from_matrix(matrix, n, d),
                                                    trials=10, max_ampliation=2)
            if report.verdicts["a"] != report.verdicts["d"] or report.verdicts["a"] != psd:
                disagreements += 1
            if not psd and not report.j_falsifies:
                disagreements += 1
    return disagreements == 0, f"disagreements={disagreements}"


def check_norm_bound(multipliers=50, kernels=1000):
    rng = np.random.default_rng(4)
    engine = SchurEngine()
    violations = 0
    for _ in range(multipliers):
        n, d = int(rng.integers(2, 7)), int(rng.integers(1, 3))
        phi = BlockMultiplier.from_matrix(random_hermitian(n * d, rng), n, d)
        upper = SchurEngine.cb_norm_upper(engine.factorize(phi))
        for _ in range(kernels):
            t = complex_gaussian((n, n), rng)
            if operator_norm(schur_apply(phi, ScalarKernel(t))) > upper * operator_norm(t) + 1e-8:
                violations += 1
        if engine.cb_norm_lower_sampled(phi, trials=100) > upper + 1e-8:
            violations += 1
    return violations == 0, f"violations={violations}"


def check_counterexample():
    start = time.perf_counter()
    code, out = run_cli(["counterexample"])
    document = json.loads(out)
    edges_ok = all(e["min_eig"] >= -1e-12 for e in document["edges"])
    ok = code == 0 and document["epsilon"] > 0 and edges_ok
    return ok, f"epsilon={document['epsilon']:.4f} in {time.perf_counter() - start:.1f}s"


def check_dmax_inclusion(count=1000):
    failures = 0
    generators = {1: [HermitianMatrix(np.ones((1, 1)))],
                  2: [HermitianMatrix(np.ones((2, 2))), HermitianMatrix(np.diag([1.0, 0.0]))],
                  4: [random_psd(4, np.random.default_rng(5), rank=2)]}
    for k, gens in generators.items():
        for n in range(1, 16 // k + 1):
            if n * k > 16:
                continue
            samples = dmax_sample(gens, n=n, count=count // 10, seed=n * k)
            failures += sum(1 for s in samples if not cmin_member_exact(s).member)
    return failures == 0, f"failures={failures}"


def _minor_oracle(a):
    """PSD iff every principal minor is >= 0, evaluated in exact rationals."""
    dim = a.shape[0]
    exact = [[Fraction(int(a[i, j])) for j in range(dim)] for i in range(dim)]
    for size in range(1, dim + 1):
        for idx in combinations(range(dim), size):
            rows = [[exact[i][j] for j in idx] for i in idx]
            det = Fraction(1)
            for col in range(size):
                pivot = next((r for r in range(col, size) if rows[r][col] != 0), None)
                if pivot is None:
                    det = Fraction(0)
                    break
                if pivot != col:
                    rows[col], rows[pivot] = rows[pivot], rows[col]
                    det = -det
                det *= rows[col][col]
                for r in range(col + 1, size):
                    factor = rows[r][col] / rows[col][col]
                    rows[r] = [rows[r][j] - factor * rows[col][j] for j in range(size)]
            if det < 0:
                return False
    return True


def check_eigensolver(matrices=1000):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(matrices):
        m = random_hermitian(int(rng.integers(1, 33)), rng)
        dec = eigh(m)
        scale = max(1.0, m.norm)
        residual = np.linalg.norm(m.entries @ dec.vectors - dec.vectors * dec.values) / scale
        ortho = np.linalg.norm(dec.vectors.conj().T @ dec.vectors - np.eye(m.dim)) / m.dim
        worst = max(worst, residual, ortho)
    disagreements = 0
    for _ in range(200):
        dim = int(rng.integers(1, 7))
        g = rng.integers(-2, 3, size=(dim, dim))
        a = g @ g.T if rng.random() < 0.5 else g + g.T
        if psd_check(HermitianMatrix(a.astype(float))).positive != _minor_oracle(a):
            disagreements += 1
    return worst <= 1e-12 and disagreements == 0, f"worst={worst:.2e} disagreements={disagreements}"


def check_determinism(workdir):
    path = os.path.join(workdir, "instance_0.json")
    commands = [["chordal", path], ["admissible", path], ["complete", path, "--verify-trials", "10"],
                ["verify-pmn", "--trials", "20"], ["counterexample", "--grid-step", "0.1"]]
    unstable = [c[0] for c in commands if len({run_cli(c)[1] for _ in range(3)}) != 1]
    return not unstable, f"unstable={unstable}"


def main_acceptance():
    results = []
    with tempfile.TemporaryDirectory() as workdir:
        checks = [
            ("chordal completion", lambda: check_chordal_completion(workdir)),
            ("cone equalities", check_cone_equalities),
            ("positivity equivalences", check_positivity_equivalences),
            ("norm bound", check_norm_bound),
            ("4-cycle counterexample", check_counterexample),
            ("D_max inside C_min", check_dmax_inclusion),
            ("eigensolver", check_eigensolver),
            ("determinism", lambda: check_determinism(workdir)),
        ]
        for name, check in checks:
            print_section(name)
            start = time.perf_counter()
            ok, detail = check()
            elapsed = time.perf_counter() - start
            print(f"{'PASS' if ok else 'FAIL'}  {detail}  ({elapsed:.1f}s)")
            results.append((name, ok, elapsed))

    print_section("Summary")
    print(f"{'Check':<28}{'Result':<8}Time")
    print("-" * 50)
    for name, ok, elapsed in results:
        print(f"{name:<28}{'PASS' if ok else 'FAIL':<8}{elapsed:.1f}s")
    return 0 if all(ok for _, ok, _ in results) else 1


if __name__ == "__main__":
    sys.exit(main_acceptance())
