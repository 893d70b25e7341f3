"""
Command-line front end.

    python index.py relabel  --input data.csv --order linear --objective strong-l0-ordinal
    python index.py distance --input data.csv --order dag --edges edges.csv
    python index.py oracle   --input data.csv --objective stages
    python index.py bench    --family half-swap --sizes 4,8,16

Input files hold one `vertex_id,label` row per vertex (`x1,...,xd,label`
for points), optionally preceded by a `labels: a,b,c` line giving the label
order. Labels are numeric when every label parses as a number. Results are
written as `key: value` lines; exit codes are 0 on success, 2 for invalid
input and 3 when the objective does not support the order.
"""
import argparse
import io
import logging
import math
import random
import sys
import time
from dataclasses import dataclass
from typing import Optional

import pandas as pd

from main import configure_logging, settings
from monorelabel.flow import max_isotonic_set
from monorelabel.linear_strong import strong_l0_ordinal, strong_l0inf_linear, strong_l0p_linear
from monorelabel.model import (
    DAG,
    LINEAR,
    POINTS,
    Instance,
    LabelFunction,
    LabelScale,
    ObjectiveOrderError,
    OrderSpec,
    RegressionResult,
    ValidationError,
    instance_from_ranks,
    ranks_of,
    validate,
)
from monorelabel.oracle import BudgetExceeded, Objective, brute_best_regression
from monorelabel.penalized import penalized_linf, penalized_lp
from monorelabel.relabel import l0_regression, strong_l0inf, weak_l00, weak_l01, weak_l02_approx, weak_l0inf
from monorelabel.tables import (
    bench_columnDefs,
    defaultColDef,
    distance_columnDefs,
    oracle_columnDefs,
    result_columnDefs,
)
from monorelabel.violator import build_violator_dag, violating_pairs_dag

logger = logging.getLogger(__name__)

OBJECTIVES = (
    "l0", "weak-l00", "weak-l01", "weak-l0inf", "weak-l02",
    "strong-l0inf", "strong-l0p", "strong-l0-ordinal", "penalized",
)
ORACLE_OBJECTIVES = ("l0", "stages", "weak-l01", "weak-l0inf", "strong-l0p", "strong-l0inf", "penalized")
FAMILIES = ("half-swap", "pairs", "random")

# closures above this size are not materialised by bench
CLOSURE_LIMIT = 2000

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_ORDER = 3


@dataclass(frozen=True)
class JobConfig:
    command: str
    input: Optional[str] = None
    order: str = LINEAR
    edges: Optional[str] = None
    objective: str = "l0"
    p: float = 2
    alpha: float = 1.0
    eps: float = 1e-6
    output: Optional[str] = None
    seed: int = 0
    family: str = "half-swap"
    sizes: tuple = (4, 8, 16, 64)
    labels: int = 10
    timings: bool = False


# ---------------------------------------------------------------------
# Input
# ---------------------------------------------------------------------


def _as_number(token: str):
    try:
        return int(token)
    except ValueError:
        return float(token)


def _numbers(tokens) -> Optional[list]:
    try:
        return [_as_number(t) for t in tokens]
    except ValueError:
        return None


def _read_rows(text: str, source: str) -> pd.DataFrame:
    if not text.strip():
        return pd.DataFrame()
    try:
        frame = pd.read_csv(io.StringIO(text), header=None, dtype=str, skipinitialspace=True, comment="#")
    except (pd.errors.ParserError, ValueError) as err:
        raise ValidationError(f"malformed rows in {source}: {err}") from err
    if frame.isna().any().any():
        raise ValidationError(f"malformed rows in {source}: missing fields")
    return frame.apply(lambda col: col.str.strip())


def _read_text(path: str) -> str:
    try:
        with open(path, mode="r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as err:
        raise ValidationError(f"cannot read {path}: {err}") from err


def _read_edges(path: Optional[str]) -> list:
    if path is None:
        raise ValidationError("a dag order needs an --edges file")
    frame = _read_rows(_read_text(path), path)
    if frame.empty:
        return []
    if frame.shape[1] != 2:
        raise ValidationError(f"edge rows must be u,v; got {frame.shape[1]} fields")
    try:
        return [(int(u), int(v)) for u, v in frame.itertuples(index=False)]
    except ValueError as err:
        raise ValidationError(f"edge ids must be integers: {err}") from err


def read_instance(path: str, order_kind: str = LINEAR, edges: Optional[str] = None) -> Instance:
    lines = _read_text(path).splitlines()
    declared = None
    if lines and lines[0].strip().lower().startswith("labels:"):
        declared = [t.strip() for t in lines[0].split(":", 1)[1].split(",") if t.strip()]
        lines = lines[1:]
    frame = _read_rows("\n".join(lines), path)
    if frame.empty:
        raise ValidationError(f"{path} has no rows")

    tokens = list(frame.iloc[:, -1])
    if order_kind == POINTS:
        if frame.shape[1] < 2:
            raise ValidationError("point rows need at least one coordinate and a label")
        try:
            coords = frame.iloc[:, :-1].astype(float).values.tolist()
        except ValueError as err:
            raise ValidationError(f"coordinates must be numbers: {err}") from err
        order = OrderSpec.points(coords)
    else:
        if frame.shape[1] != 2:
            raise ValidationError(f"rows must be vertex_id,label; got {frame.shape[1]} fields")
        try:
            ids = [int(x) for x in frame.iloc[:, 0]]
        except ValueError as err:
            raise ValidationError(f"vertex ids must be integers: {err}") from err
        if sorted(ids) != list(range(len(ids))):
            raise ValidationError("vertex ids must be 0..n-1, each exactly once")
        tokens = [t for _, t in sorted(zip(ids, tokens))]
        n = len(ids)
        order = OrderSpec.dag(n, _read_edges(edges)) if order_kind == DAG else OrderSpec.linear(n)

    if declared is not None:
        numeric = _numbers(declared)
        if numeric is not None:
            scale = LabelScale(labels=tuple(numeric), numeric_values=tuple(numeric))
            data = _numbers(tokens)
            if data is None:
                raise ValidationError("labels were declared numeric but a row is not")
        else:
            scale = LabelScale(labels=tuple(declared))
            data = tokens
    else:
        data = _numbers(tokens)
        if data is None:
            raise ValidationError("labels are not numeric; declare their order with a 'labels:' line")
        scale = LabelScale.from_numbers(data)
    return validate(order, LabelFunction.from_labels(data, scale), scale)


# ---------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------


def _format_value(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if x.is_integer():
            return str(int(x))
        return repr(x)
    return str(x)


def _format_cell(value) -> str:
    if value is None:
        return defaultColDef["missing"]
    if isinstance(value, (list, tuple)):
        return defaultColDef["separator"].join(_format_value(x) for x in value)
    return _format_value(value)


def render_document(record: dict, column_defs: list) -> str:
    return "".join(f"{col['headerName']}: {_format_cell(record.get(col['field']))}\n" for col in column_defs)


def _labels_of(instance: Instance, g) -> tuple:
    """g as label tokens when it stays on the label grid."""
    ranks = ranks_of(instance, g)
    if ranks is None:
        return tuple(g)
    return tuple(instance.scale.label_of(r) for r in ranks)


def result_record(instance: Instance, result: RegressionResult, objective_name: str) -> dict:
    return {
        "objective_name": objective_name,
        "order": instance.kind,
        "n": instance.n,
        "g": _labels_of(instance, result.g),
        "kept_set": result.kept_set,
        "l0_distance": result.l0_distance,
        "stage_counts": result.stage_counts,
        "p": result.p,
        "lp_error": result.lp_error,
        "objective": result.objective,
        "trim_error": result.trim_error,
        "sum_squares": result.sum_squares,
    }


def _emit(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    with open(output, mode="w", encoding="utf-8") as handle:
        handle.write(text)


# ---------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------


def fit(instance: Instance, config: JobConfig) -> RegressionResult:
    name = config.objective
    if name == "l0":
        return l0_regression(instance)
    if name == "weak-l00":
        return weak_l00(instance)
    if name == "strong-l0-ordinal":
        return strong_l0_ordinal(instance)
    if name == "strong-l0p":
        return strong_l0p_linear(instance, int(config.p) if config.p in (1, 2) else config.p)
    if name == "strong-l0inf":
        return strong_l0inf_linear(instance) if instance.kind == LINEAR else strong_l0inf(instance)
    if name == "penalized":
        if config.p == math.inf:
            return penalized_linf(instance, config.alpha)
        return penalized_lp(instance, config.alpha, int(config.p) if config.p in (1, 2) else config.p)

    kept = l0_regression(instance).kept_set
    if name == "weak-l01":
        return weak_l01(instance, kept)
    if name == "weak-l0inf":
        return weak_l0inf(instance, kept)
    if name == "weak-l02":
        return weak_l02_approx(instance, kept, config.eps)
    raise ValueError(f"unknown objective {name!r}")


def _relabel(config: JobConfig) -> None:
    instance = read_instance(config.input, config.order, config.edges)
    logger.info("relabel %s: %s order, n=%d, %d labels", config.objective, instance.kind, instance.n, instance.scale.size)
    started = time.perf_counter()
    result = fit(instance, config)
    elapsed = time.perf_counter() - started
    text = render_document(result_record(instance, result, config.objective), result_columnDefs)
    if config.timings:
        for key, seconds in sorted({**result.timings, "total_s": elapsed}.items()):
            text += f"timing.{key}: {seconds:.6f}\n"
    _emit(text, config.output)


def _distance(config: JobConfig) -> None:
    instance = read_instance(config.input, config.order, config.edges)
    vdag = build_violator_dag(instance)
    chosen = max_isotonic_set(instance, vdag)
    record = {
        "order": instance.kind,
        "n": instance.n,
        "n_hat": len(vdag.vertices),
        "kept": len(chosen),
        "l0_distance": len(vdag.vertices) - len(chosen),
    }
    _emit(render_document(record, distance_columnDefs), config.output)


def _oracle_objective(instance: Instance, config: JobConfig) -> Objective:
    name = config.objective
    if name in ("l0", "stages"):
        return Objective(name)
    if name in ("weak-l01", "weak-l0inf"):
        kept = l0_regression(instance).kept_set
        return Objective("weak", p=1 if name == "weak-l01" else math.inf, kept=kept)
    if name == "strong-l0p":
        return Objective("strong", p=config.p)
    if name == "strong-l0inf":
        return Objective("strong", p=math.inf)
    if name == "penalized":
        return Objective("penalized", p=config.p, alpha=config.alpha)
    raise ValueError(f"the oracle does not cover {name!r}")


def _oracle(config: JobConfig) -> None:
    instance = read_instance(config.input, config.order, config.edges)
    answer = brute_best_regression(instance, _oracle_objective(instance, config))
    record = {
        "objective_name": config.objective,
        "n": instance.n,
        "value": answer.value,
        "g": _labels_of(instance, answer.g),
    }
    _emit(render_document(record, oracle_columnDefs), config.output)


def family_instance(family: str, n: int, rng: random.Random, labels: int = 10) -> Instance:
    """Generated linear instances: half-swap (high half before low half), pairs (2,1,4,3,...) or random ranks."""
    if family == "half-swap":
        half = n // 2
        ranks = list(range(half + 1, n + 1)) + list(range(1, half + 1))
    elif family == "pairs":
        ranks = [k + 2 if k % 2 == 0 else k for k in range(n)]
    elif family == "random":
        ranks = [rng.randint(1, labels) for _ in range(n)]
    else:
        raise ValueError(f"unknown family {family!r}")
    return instance_from_ranks(ranks, n_labels=max(ranks, default=1))


def bench_rows(config: JobConfig) -> list:
    rng = random.Random(config.seed)
    rows = []
    for n in config.sizes:
        instance = family_instance(config.family, n, rng, config.labels)
        closure = violating_pairs_dag(instance) if n <= CLOSURE_LIMIT else None
        reduction = build_violator_dag(instance)
        result = l0_regression(instance, vdag=reduction)
        started = time.perf_counter()
        strong_l0_ordinal(instance)
        rows.append({
            "family": config.family,
            "n": n,
            "n_hat": len(reduction.vertices),
            "m_closure": closure.m if closure is not None else None,
            "m_reduction": reduction.m,
            "l0_distance": result.l0_distance,
            "flow_s": result.timings["flow_s"],
            "dp_s": time.perf_counter() - started,
        })
        logger.info("bench %s n=%d done", config.family, n)
    return rows


def render_bench(rows: list, timings: bool = False) -> str:
    """Bench table; the wall-clock columns only when `timings` is set."""
    columns = [col for col in bench_columnDefs if timings or not col.get("timing")]
    frame = pd.DataFrame(rows, columns=[col["field"] for col in columns], dtype=object)
    for col in columns:
        if "format" in col:
            frame[col["field"]] = frame[col["field"]].map(col["format"])
    frame = frame.where(frame.notna(), defaultColDef["missing"])
    frame = frame.rename(columns={col["field"]: col["headerName"] for col in columns})
    return frame.to_string(index=False) + "\n"


def _bench(config: JobConfig) -> None:
    _emit(render_bench(bench_rows(config), config.timings), config.output)


# ---------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------


def _parse_p(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"p must be a number or inf, got {text!r}") from None


def _parse_sizes(text: str) -> tuple:
    try:
        sizes = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monorelabel", description="L0 isotonic regression and monotonic relabeling.")
    parser.add_argument("--log-level", default=None, help=f"log level (default {settings.log_level})")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(cmd):
        cmd.add_argument("--input", required=True, help="rows of vertex_id,label (x1,...,xd,label for points)")
        cmd.add_argument("--order", choices=(LINEAR, DAG, POINTS), default=LINEAR)
        cmd.add_argument("--edges", default=None, help="u,v rows for a dag order")
        cmd.add_argument("--output", default=None, help="write the result here instead of stdout")

    relabel = sub.add_parser("relabel", help="fit an isotonic relabeling")
    add_input(relabel)
    relabel.add_argument("--objective", choices=OBJECTIVES, default="l0")
    relabel.add_argument("--p", type=_parse_p, default=2.0)
    relabel.add_argument("--alpha", type=float, default=1.0)
    relabel.add_argument("--eps", type=float, default=1e-6)
    relabel.add_argument("--timings", action="store_true", help="append per-phase timings")

    distance = sub.add_parser("distance", help="distance to monotonicity only")
    add_input(distance)

    oracle = sub.add_parser("oracle", help="exhaustive reference on a small instance")
    add_input(oracle)
    oracle.add_argument("--objective", choices=ORACLE_OBJECTIVES, default="l0")
    oracle.add_argument("--p", type=_parse_p, default=2.0)
    oracle.add_argument("--alpha", type=float, default=1.0)

    bench = sub.add_parser("bench", help="timing table over generated linear instances")
    bench.add_argument("--family", choices=FAMILIES, default="half-swap")
    bench.add_argument("--sizes", type=_parse_sizes, default=(4, 8, 16, 64))
    bench.add_argument("--labels", type=int, default=10)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--output", default=None)
    bench.add_argument("--timings", action="store_true", help="add the flow_s and dp_s columns")
    return parser


def _config(args: argparse.Namespace) -> JobConfig:
    fields = {k: v for k, v in vars(args).items() if k in JobConfig.__dataclass_fields__ and v is not None}
    return JobConfig(**fields)


COMMANDS = {
    "relabel": _relabel,
    "distance": _distance,
    "oracle": _oracle,
    "bench": _bench,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging((args.log_level or settings.log_level).upper())
    config = _config(args)
    try:
        COMMANDS[config.command](config)
    except ObjectiveOrderError as err:
        logger.error("%s", err)
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ORDER
    except (ValidationError, BudgetExceeded, ValueError) as err:
        logger.error("%s", err)
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK
