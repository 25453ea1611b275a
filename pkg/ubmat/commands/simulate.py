"""``ubmat simulate``: Monte Carlo studies and synthetic datasets."""

import numpy as np

from ubmat.commands.common import add_output_flags, add_tolerance_flag, emit, tolerances_from_args
from ubmat.core.config import get_settings
from ubmat.core.errors import InputFormatError
from ubmat.repo import read_coordinates, read_model, parse_vector
from ubmat.repo.files import atomic_write_text
from ubmat.schema.simulation import SimulationPlan, StudyReport
from ubmat.service.simulation import run_power_study, run_type1_study, sample_groups, sample_ub_normal


def _statistics_csv(values: np.ndarray) -> str:
    return "replicate,statistic\n" + "".join(f"{i},{v!r}\n" for i, v in enumerate(values.tolist()))


def cmd_study(args) -> int:
    plan_file = read_model(args.plan, SimulationPlan)
    plan = plan_file.to_plan(tolerances_from_args(args), args.workers, args.allow_small_n)
    result = run_power_study(plan) if plan_file.study == "power" else run_type1_study(plan)

    if args.statistics_csv:
        atomic_write_text(args.statistics_csv, _statistics_csv(result.statistics))

    report = StudyReport.from_result(result, plan.alpha)
    human = (
        f"{report.kind} study: rejection rate {report.rejection_rate:.4f} +- {report.standard_error:.4f} "
        f"(95% CI [{report.ci_low:.4f}, {report.ci_high:.4f}]) at critical value {report.critical_value:.6g}\n"
        f"mean statistic {report.mean_statistic:.6g} over {report.replicates} replicates (seed {report.seed})\n"
    )
    if report.predicted_power is not None:
        human += f"predicted power {report.predicted_power:.4f} +- {report.predicted_power_se:.4f}\n"
    emit(args, report, human)
    return 0


def cmd_sample(args) -> int:
    sigma = read_coordinates(args.coords, tolerances_from_args(args))
    mu = parse_vector(args.mu, sigma.p)
    if args.groups:
        sizes = [int(s) for s in args.groups.split(",") if s.strip()]
        data = sample_groups(sigma, np.tile(mu, (len(sizes), 1)), sizes, args.seed)
        rows = [list(map(repr, row)) + [str(label)] for row, label in zip(data.observations.tolist(), data.group_labels)]
    else:
        if args.n is None:
            raise InputFormatError("sample needs --n or --groups")
        data = sample_ub_normal(sigma, mu, args.n, args.seed)
        rows = [list(map(repr, row)) for row in data.observations.tolist()]

    text = "".join(",".join(row) + "\n" for row in rows)
    if args.output:
        atomic_write_text(args.output, text)
    else:
        print(text, end="")
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="Monte Carlo studies and synthetic data")
    actions = parser.add_subparsers(dest="action", required=True)

    study = actions.add_parser("study", help="run a type-I or power study from a plan file")
    study.add_argument("--plan", required=True, metavar="JSON", help="simulation plan")
    study.add_argument("--statistics-csv", metavar="PATH", help="also write per-replicate statistics")
    study.add_argument("--workers", type=int, default=get_settings().workers, help="worker threads")
    study.add_argument("--allow-small-n", action="store_true", help="estimate even when n <= K + K(K+1)/2")
    add_tolerance_flag(study)
    add_output_flags(study)
    study.set_defaults(handler=cmd_study)

    sample = actions.add_parser("sample", help="draw a normal dataset with UB covariance")
    sample.add_argument("--coords", required=True, metavar="JSON", help="covariance coordinates")
    sample.add_argument("--n", type=int, help="number of observations")
    sample.add_argument("--groups", metavar="SIZES", help="group sizes; adds a trailing label column")
    sample.add_argument("--mu", default="0", help="mean vector: inline list, one number, or a CSV file")
    sample.add_argument("--seed", type=int, default=get_settings().seed, help="random seed")
    sample.add_argument("--output", metavar="PATH", help="write the CSV to PATH (atomic) instead of stdout")
    add_tolerance_flag(sample)
    sample.set_defaults(handler=cmd_sample)
