"""Command-line front end: measurement files, transfer values, comparisons, sweeps.

Exit codes: 0 success, 1 usage or input problems, 2 measurement not
informationally complete, 3 memory budget exceeded.  Every emitted file
embeds the run configuration (JSON field, or a leading ``# config:`` comment
line in CSV) and the seed, so runs can be reproduced exactly.  Execution is
sequential and single threaded; results depend only on the seed and the cell
or sample index, never on scheduling.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import asdict

import numpy as np

from .errors import (
    BudgetExceededError,
    ConvergenceWarning,
    NotInformationallyCompleteError,
    PomSchemaError,
    QttfError,
    SearchTimeoutError,
)
from .estimation import haar_mse_sweep
from .fisher import measurement_matrices
from .operators import build_basis
from .pom import (
    Pom,
    admix_white_noise,
    duplicate_outcome,
    load_pom,
    mub_povm,
    pom_to_dict,
    random_pom,
    save_pom,
    sic_povm,
)
from .transfer import (
    DEFAULT_MEMORY_BUDGET,
    qttf_auto,
    qttf_closed_minimal,
    qttf_closed_minimal_bases,
    qttf_monte_carlo,
    qttf_series,
)
from .errors import NotMinimalBasesError, NotMinimallyCompleteError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_IC = 2
EXIT_BUDGET = 3

BUILTINS = {
    "sic2": lambda: sic_povm(2),
    "sic3": lambda: sic_povm(3),
    "mub2": lambda: mub_povm(2),
    "mub3": lambda: mub_povm(3),
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_csv(rows, columns, config, out_path=None) -> None:
    buffer = io.StringIO()
    buffer.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[col]) for col in columns])
    text = buffer.getvalue()
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload, out_path=None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _output_pom(pom: Pom, out_path=None) -> None:
    if out_path:
        save_pom(pom, out_path)
    else:
        _emit_json(pom_to_dict(pom))


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise _UsageError(f"expected a comma-separated integer list, got {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise _UsageError(f"expected a comma-separated number list, got {text!r}") from exc


def _load(path) -> Pom:
    try:
        return load_pom(path)
    except FileNotFoundError as exc:
        raise _UsageError(f"cannot read measurement file {path!r}: {exc}") from exc


def _cell_rng(*key_parts) -> np.random.Generator:
    return np.random.default_rng([int(part) for part in key_parts])


def bootstrap_ci(values, rng, n_resamples: int = 1000, level: float = 0.95):
    """Percentile bootstrap confidence interval for the mean."""
    values = np.asarray(values, dtype=float)
    if values.size == 1:
        return float(values[0]), float(values[0])
    idx = rng.integers(0, values.size, size=(n_resamples, values.size))
    means = values[idx].mean(axis=1)
    tail = (1.0 - level) / 2
    return float(np.quantile(means, tail)), float(np.quantile(means, 1.0 - tail))


def run_fig1(
    dims,
    mus,
    ranks,
    epsilon: float,
    n_poms: int,
    n_haar: int,
    seed: int,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> list[dict]:
    """Halved relative error of the order-2 series against Monte Carlo.

    One row per (dim, mu, rank) cell at the given noise admixture.  Base
    measurements and Monte-Carlo states are keyed by (seed, dim, mu, rank,
    index) only, so runs at different epsilon are paired draw for draw.
    """
    rows = []
    for dim in dims:
        basis = build_basis(dim)
        for mu in mus:
            m_float = mu * dim * dim
            n_outcomes = int(round(m_float))
            if abs(m_float - n_outcomes) > 1e-9:
                raise _UsageError(f"mu={mu} gives non-integral outcome count for dim={dim}")
            for rank in ranks:
                if n_poms == 0:
                    continue
                mu_key = int(round(mu * 1000))
                values = []
                skipped = False
                for index in range(n_poms):
                    base = random_pom(
                        dim, n_outcomes, rank, _cell_rng(seed, dim, mu_key, rank, index)
                    )
                    pom = admix_white_noise(base, epsilon) if epsilon > 0 else base
                    try:
                        with warnings.catch_warnings():
                            warnings.simplefilter("ignore", ConvergenceWarning)
                            aq = qttf_series(
                                pom, basis, alpha=1.0, max_order=2, memory_budget=memory_budget
                            ).value
                    except BudgetExceededError as exc:
                        print(f"fig1 cell skipped: {exc}", file=sys.stderr)
                        skipped = True
                        break
                    mc = qttf_monte_carlo(
                        pom, basis, n_haar, _cell_rng(seed, dim, mu_key, rank, index, 1)
                    )
                    values.append((aq - mc.value) / (2.0 * mc.value))
                if skipped:
                    row_vals = {"halved_rel_err": float("nan"), "ci_lo": float("nan"), "ci_hi": float("nan")}
                    values = []
                else:
                    lo, hi = bootstrap_ci(values, _cell_rng(seed, dim, mu_key, rank, 999983))
                    row_vals = {
                        "halved_rel_err": float(np.mean(values)),
                        "ci_lo": lo,
                        "ci_hi": hi,
                    }
                rows.append(
                    {
                        "D": dim,
                        "mu": float(mu),
                        "rank": rank,
                        "epsilon": float(epsilon),
                        "limit": dim / (2.0 * (dim + 2)),
                        # Per-measurement samples, for paired analyses; not a CSV column.
                        "values": [float(v) for v in values],
                        **row_vals,
                    }
                )
    return rows


def search_counterexample_pair(
    dim: int,
    m_choices,
    rank: int,
    attempts: int,
    n_samples: int,
    seed: int,
    gap_sigmas: float = 5.0,
):
    """Random search for measurements where conditioning and accuracy disagree.

    Returns (pom_low_kappa, pom_high_kappa, info) with
    kappa(first) < kappa(second) while qttf(first) - qttf(second) exceeds
    gap_sigmas combined standard errors: the better-conditioned measurement
    is tomographically worse.
    """
    basis = build_basis(dim)
    m_choices = list(m_choices)
    candidates = []
    for index in range(attempts):
        n_outcomes = m_choices[index % len(m_choices)]
        pom = random_pom(
            dim,
            n_outcomes,
            rank,
            _cell_rng(seed, index),
            label=f"search(dim={dim},m={n_outcomes},rank={rank},seed={seed},index={index})",
        )
        kappa = measurement_matrices(pom, basis).kappa_c_tilde
        estimate = qttf_monte_carlo(pom, basis, n_samples, _cell_rng(seed, index, 1))
        for other_pom, other_kappa, other_est in candidates:
            for (p1, k1, e1), (p2, k2, e2) in (
                ((pom, kappa, estimate), (other_pom, other_kappa, other_est)),
                ((other_pom, other_kappa, other_est), (pom, kappa, estimate)),
            ):
                sigma = float(np.hypot(e1.std_error, e2.std_error))
                if k1 < k2 - 1e-6 and e1.value - e2.value >= gap_sigmas * sigma:
                    info = {
                        "kappa_1": k1,
                        "kappa_2": k2,
                        "qttf_1": e1.value,
                        "qttf_2": e2.value,
                        "qttf_gap": e1.value - e2.value,
                        "combined_stderr": sigma,
                        "attempts_used": index + 1,
                    }
                    return p1, p2, info
        candidates.append((pom, kappa, estimate))
    raise SearchTimeoutError(
        f"no conditioning/accuracy counterexample found in {attempts} attempts"
    )


def run_fig2_rows(
    poms,
    basis,
    purity: float,
    n_states: int,
    n_shots: int,
    n_trials: int,
    n_samples: int,
    seed: int,
) -> list[dict]:
    rows = []
    for index, pom in enumerate(poms):
        matrices = measurement_matrices(pom, basis)
        sweep = haar_mse_sweep(
            pom,
            basis,
            purity,
            n_states,
            n_shots,
            n_trials,
            _cell_rng(seed, 71, index),
            n_qttf_samples=n_samples,
        )
        rows.append(
            {
                "label": pom.label,
                "m": pom.n_outcomes,
                "kappa_c_tilde": matrices.kappa_c_tilde,
                "qttf_mc": sweep.qttf_mc.value,
                "qttf_mc_stderr": sweep.qttf_mc.std_error,
                "aqttf": sweep.qttf_series2.value,
                "scaled_mse": sweep.mean_scaled_mse,
            }
        )
    return rows


def _cmd_pom(args) -> int:
    if args.pom_command == "builtin":
        _output_pom(BUILTINS[args.name](), args.out)
        return EXIT_OK
    if args.pom_command == "random":
        pom = random_pom(args.dim, args.m, args.rank, args.seed)
        _output_pom(pom, args.out)
        return EXIT_OK
    pom = _load(args.input)
    if args.duplicate is None and args.epsilon is None:
        raise _UsageError("transform needs --duplicate and/or --epsilon")
    if args.duplicate is not None:
        if args.weights is None:
            raise _UsageError("--duplicate requires --weights")
        if not 1 <= args.duplicate <= pom.n_outcomes:
            raise _UsageError(
                f"--duplicate outcome number must be in [1, {pom.n_outcomes}] (1-based)"
            )
        try:
            pom = duplicate_outcome(pom, args.duplicate - 1, _float_list(args.weights))
        except ValueError as exc:
            raise _UsageError(str(exc)) from exc
    if args.epsilon is not None:
        if args.epsilon < 0:
            raise _UsageError("--epsilon must be >= 0")
        pom = admix_white_noise(pom, args.epsilon)
    _output_pom(pom, args.out)
    return EXIT_OK


def _cmd_qttf(args) -> int:
    pom = _load(args.pom)
    basis = build_basis(pom.dim)
    if args.method == "auto":
        estimate = qttf_auto(
            pom, basis, n_samples=args.samples, rng=args.seed, memory_budget=args.memory_budget
        )
    elif args.method == "closed":
        try:
            estimate = qttf_closed_minimal(pom, basis)
        except NotMinimallyCompleteError:
            try:
                estimate = qttf_closed_minimal_bases(pom, basis)
            except NotMinimalBasesError as exc:
                raise _UsageError(f"no closed form applies: {exc}") from exc
    elif args.method == "series":
        estimate = qttf_series(
            pom, basis, alpha=args.alpha, max_order=args.order, memory_budget=args.memory_budget
        )
    else:
        estimate = qttf_monte_carlo(pom, basis, args.samples, args.seed)
    payload = asdict(estimate)
    payload["config"] = {
        "command": "qttf",
        "pom": str(args.pom),
        "method": args.method,
        "alpha": args.alpha,
        "order": args.order,
        "samples": args.samples,
        "memory_budget": args.memory_budget,
    }
    payload["seed"] = args.seed
    _emit_json(payload, args.out)
    return EXIT_OK


def _cmd_compare(args) -> int:
    if len(args.poms) < 2:
        raise _UsageError("compare needs at least two measurement files")
    poms = [_load(path) for path in args.poms]
    dims = {pom.dim for pom in poms}
    if len(dims) != 1:
        raise _UsageError(f"measurements have mixed dimensions {sorted(dims)}")
    basis = build_basis(poms[0].dim)
    rows = []
    for pom in poms:
        matrices = measurement_matrices(pom, basis)
        estimate = qttf_auto(pom, basis, n_samples=args.samples, rng=args.seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            aq = qttf_series(pom, basis, alpha=1.0, max_order=2)
        rows.append(
            {
                "label": pom.label,
                "m": pom.n_outcomes,
                "kappa_c": matrices.kappa_c,
                "kappa_c_tilde": matrices.kappa_c_tilde,
                "tr_fbar_inv": aq.params["contributions"][0],
                "qttf": estimate.value,
                "qttf_stderr": estimate.std_error,
                "qttf_method": estimate.method,
                "aqttf": aq.value,
            }
        )
    best = min(rows, key=lambda row: row["qttf"])
    notes = [f"best by qttf: {best['label']} ({best['qttf']:.4f})"]
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            a, b = rows[i], rows[j]
            if a["kappa_c_tilde"] > b["kappa_c_tilde"]:
                a, b = b, a  # a has the smaller kappa
            dq = a["qttf"] - b["qttf"]
            sigma = max(2.0 * float(np.hypot(a["qttf_stderr"], b["qttf_stderr"])), 1e-6)
            if b["kappa_c_tilde"] - a["kappa_c_tilde"] <= 1e-9:
                continue
            if dq > sigma:
                notes.append(
                    f"inversion: {a['label']} (kappa={a['kappa_c_tilde']:.4f}) is better "
                    f"conditioned than {b['label']} (kappa={b['kappa_c_tilde']:.4f}) but "
                    f"tomographically worse (qttf {a['qttf']:.4f} vs {b['qttf']:.4f})"
                )
            elif abs(dq) <= sigma:
                notes.append(
                    f"inversion: {a['label']} and {b['label']} have equal qttf "
                    f"({a['qttf']:.4f} vs {b['qttf']:.4f}) despite kappa "
                    f"{a['kappa_c_tilde']:.4f} vs {b['kappa_c_tilde']:.4f}; conditioning "
                    "is not a tomographic ranking"
                )
    config = {
        "command": "compare",
        "poms": [str(p) for p in args.poms],
        "samples": args.samples,
        "seed": args.seed,
    }
    columns = [
        "label",
        "m",
        "kappa_c",
        "kappa_c_tilde",
        "tr_fbar_inv",
        "qttf",
        "qttf_stderr",
        "qttf_method",
        "aqttf",
    ]
    if args.format == "json":
        _emit_json({"rows": rows, "notes": notes, "config": config}, args.out)
    elif args.format == "csv":
        _write_csv(rows, columns, config, args.out)
    else:
        widths = {col: max(len(col), *(len(_table_cell(row[col])) for row in rows)) for col in columns}
        lines = ["  ".join(col.ljust(widths[col]) for col in columns)]
        for row in rows:
            lines.append("  ".join(_table_cell(row[col]).ljust(widths[col]) for col in columns))
        lines.extend(notes)
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def _table_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _cmd_fig1(args) -> int:
    rows = run_fig1(
        dims=_int_list(args.dims),
        mus=_float_list(args.mus),
        ranks=_int_list(args.ranks),
        epsilon=args.epsilon,
        n_poms=args.n_poms,
        n_haar=args.n_haar,
        seed=args.seed,
        memory_budget=args.memory_budget,
    )
    config = {
        "command": "fig1",
        "dims": args.dims,
        "mus": args.mus,
        "ranks": args.ranks,
        "epsilon": args.epsilon,
        "n_poms": args.n_poms,
        "n_haar": args.n_haar,
        "seed": args.seed,
    }
    columns = ["D", "mu", "rank", "epsilon", "halved_rel_err", "ci_lo", "ci_hi", "limit"]
    _write_csv(rows, columns, config, args.out)
    return EXIT_OK


def _cmd_fig2(args) -> int:
    config = {
        "command": "fig2",
        "pom1": str(args.pom1),
        "pom2": str(args.pom2),
        "search": bool(args.search),
        "purity": args.purity,
        "states": args.states,
        "shots": args.shots,
        "trials": args.trials,
        "samples": args.samples,
        "seed": args.seed,
    }
    if args.search:
        if args.dim is None:
            raise _UsageError("--search requires --dim")
        pom1, pom2, info = search_counterexample_pair(
            dim=args.dim,
            m_choices=_int_list(args.m),
            rank=args.rank,
            attempts=args.attempts,
            n_samples=args.samples,
            seed=args.seed,
        )
        save_pom(pom1, args.pom1)
        save_pom(pom2, args.pom2)
        config["search_info"] = info
        print(
            f"found pair after {info['attempts_used']} attempts: "
            f"kappa {info['kappa_1']:.4f} < {info['kappa_2']:.4f} while "
            f"qttf {info['qttf_1']:.4f} > {info['qttf_2']:.4f} "
            f"(gap {info['qttf_gap']:.4f}, combined stderr {info['combined_stderr']:.4f})",
            file=sys.stderr,
        )
    else:
        pom1, pom2 = _load(args.pom1), _load(args.pom2)
    if pom1.dim != pom2.dim:
        raise _UsageError(f"measurements have mixed dimensions {pom1.dim} and {pom2.dim}")
    basis = build_basis(pom1.dim)
    rows = run_fig2_rows(
        [pom1, pom2],
        basis,
        purity=args.purity,
        n_states=args.states,
        n_shots=args.shots,
        n_trials=args.trials,
        n_samples=args.samples,
        seed=args.seed,
    )
    columns = ["label", "m", "kappa_c_tilde", "qttf_mc", "qttf_mc_stderr", "aqttf", "scaled_mse"]
    _write_csv(rows, columns, config, args.out)
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="qttf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pom_parser = sub.add_parser("pom", help="create or transform measurement files")
    pom_sub = pom_parser.add_subparsers(dest="pom_command", required=True, parser_class=_Parser)
    builtin = pom_sub.add_parser("builtin", help="emit a builtin measurement")
    builtin.add_argument("name", choices=sorted(BUILTINS))
    builtin.add_argument("--out", default=None)
    rand = pom_sub.add_parser("random", help="draw a random measurement")
    rand.add_argument("--dim", type=int, required=True)
    rand.add_argument("--m", type=int, required=True, help="number of outcomes")
    rand.add_argument("--rank", type=int, default=1)
    rand.add_argument("--seed", type=int, default=0)
    rand.add_argument("--out", default=None)
    trans = pom_sub.add_parser("transform", help="duplicate outcomes or admix white noise")
    trans.add_argument("input")
    trans.add_argument("--duplicate", type=int, default=None, help="outcome number (1-based)")
    trans.add_argument("--weights", default=None, help="comma-separated split weights")
    trans.add_argument("--epsilon", type=float, default=None, help="white-noise admixture")
    trans.add_argument("--out", default=None)

    qttf_parser = sub.add_parser("qttf", help="evaluate the transfer function")
    qttf_parser.add_argument("pom")
    qttf_parser.add_argument("--method", choices=["auto", "closed", "series", "mc"], default="auto")
    qttf_parser.add_argument("--alpha", type=float, default=1.0)
    qttf_parser.add_argument("--order", type=int, default=2)
    qttf_parser.add_argument("--samples", type=int, default=10000)
    qttf_parser.add_argument("--seed", type=int, default=0)
    qttf_parser.add_argument("--memory-budget", type=int, default=DEFAULT_MEMORY_BUDGET)
    qttf_parser.add_argument("--out", default=None)

    cmp_parser = sub.add_parser("compare", help="tabulate conditioning against accuracy")
    cmp_parser.add_argument("poms", nargs="+")
    cmp_parser.add_argument("--samples", type=int, default=10000)
    cmp_parser.add_argument("--seed", type=int, default=0)
    cmp_parser.add_argument("--format", choices=["table", "json", "csv"], default="table")
    cmp_parser.add_argument("--out", default=None)

    fig1_parser = sub.add_parser("fig1", help="series error sweep over random measurements")
    fig1_parser.add_argument("--dims", default="2", help="dims whose mu*dim**2 are all integral")
    fig1_parser.add_argument("--mus", default="1.25,1.5,2,3", help="outcome counts as mu*dim**2")
    fig1_parser.add_argument("--ranks", default="1")
    fig1_parser.add_argument("--epsilon", type=float, default=0.0)
    fig1_parser.add_argument("--n-poms", type=int, default=50)
    fig1_parser.add_argument("--n-haar", type=int, default=500)
    fig1_parser.add_argument("--seed", type=int, default=0)
    fig1_parser.add_argument("--memory-budget", type=int, default=DEFAULT_MEMORY_BUDGET)
    fig1_parser.add_argument("--out", default=None)

    fig2_parser = sub.add_parser("fig2", help="finite-sample MSE against transfer values")
    fig2_parser.add_argument("pom1")
    fig2_parser.add_argument("pom2")
    fig2_parser.add_argument("--search", action="store_true", help="search for a pair and persist it")
    fig2_parser.add_argument("--dim", type=int, default=None)
    fig2_parser.add_argument("--m", default="6,8", help="outcome counts tried by --search")
    fig2_parser.add_argument("--rank", type=int, default=1)
    fig2_parser.add_argument("--attempts", type=int, default=200)
    fig2_parser.add_argument("--purity", type=float, default=0.99)
    fig2_parser.add_argument("--states", type=int, default=10)
    fig2_parser.add_argument("--shots", type=int, default=10000)
    fig2_parser.add_argument("--trials", type=int, default=50)
    fig2_parser.add_argument("--samples", type=int, default=4000)
    fig2_parser.add_argument("--seed", type=int, default=0)
    fig2_parser.add_argument("--out", default=None)

    return parser


_COMMANDS = {
    "pom": _cmd_pom,
    "qttf": _cmd_qttf,
    "compare": _cmd_compare,
    "fig1": _cmd_fig1,
    "fig2": _cmd_fig2,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PomSchemaError as exc:
        print(f"error: invalid measurement file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotInformationallyCompleteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_IC
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SearchTimeoutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QttfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
