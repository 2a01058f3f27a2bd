"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 enumeration
budget exceeded.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from .clustering import DEFAULT_BUDGET, brute_force_optimum, lloyd, objective_j, weighted_centroids
from .colour_cube import DEFAULT_SIDE, build_histogram, check_side, quantize
from .errors import BudgetExceededError, ConfigurationError, CubesegError, InvalidInputError
from .genetic import MUTATION_MODES, GaConfig, chromosome_length, run_ga
from .imageio import encode_png, read_image
from .segmentation import segment

log = logging.getLogger("cubeseg")

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_BUDGET = 0, 1, 2, 3
ALGORITHMS = ("ga", "lloyd", "brute")
TRACE_HEADER = "generation,best_so_far_j,gen_best_j,gen_mean_j"


@dataclass
class RunConfig:
    input_path: str = ""
    output_dir: str = ""
    algorithm: str = "ga"
    k: int = 6
    cube_side: int = DEFAULT_SIDE
    population_size: int = 50
    generations: int = 10000
    crossover_rate: float = 0.95
    mutation_rate: float = 0.85
    mutation_mode: str = "chromosome"
    tournament_size: int = 2
    elite_count: int = 1
    seed: int = 0
    max_iter: int = 100
    emit_trace: bool = False
    emit_masks: bool = False

    def validate(self):
        if not self.input_path:
            raise ConfigurationError("input", "an input image is required")
        if not self.output_dir:
            raise ConfigurationError("out-dir", "an output directory is required")
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError("algorithm", f"must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.k < 1:
            raise ConfigurationError("clusters", "must be >= 1")
        try:
            check_side(self.cube_side)
        except ConfigurationError as exc:
            raise ConfigurationError("cube-side", str(exc).split(": ", 1)[1]) from None
        if self.max_iter < 1:
            raise ConfigurationError("max-iter", "must be >= 1")
        self.ga_config()

    def ga_config(self) -> GaConfig:
        flag_names = {
            "k": "clusters", "population_size": "population", "tournament_size": "tournament",
            "elite_count": "elite",
        }
        try:
            return GaConfig(
                k=self.k, population_size=self.population_size, generations=self.generations,
                crossover_rate=self.crossover_rate, mutation_rate=self.mutation_rate,
                mutation_mode=self.mutation_mode, tournament_size=self.tournament_size,
                elite_count=self.elite_count, seed=self.seed,
            )
        except ConfigurationError as exc:
            name = flag_names.get(exc.field, exc.field.replace("_", "-"))
            raise ConfigurationError(name, str(exc).split(": ", 1)[1]) from None


# flag name -> (RunConfig field, type)
OPTIONS = {
    "input": ("input_path", str),
    "out-dir": ("output_dir", str),
    "algorithm": ("algorithm", str),
    "clusters": ("k", int),
    "cube-side": ("cube_side", int),
    "population": ("population_size", int),
    "generations": ("generations", int),
    "crossover-rate": ("crossover_rate", float),
    "mutation-rate": ("mutation_rate", float),
    "mutation-mode": ("mutation_mode", str),
    "tournament": ("tournament_size", int),
    "elite": ("elite_count", int),
    "seed": ("seed", int),
    "max-iter": ("max_iter", int),
    "trace": ("emit_trace", bool),
    "masks": ("emit_masks", bool),
}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _coerce(flag: str, raw):
    _, kind = OPTIONS[flag]
    try:
        return _parse_bool(raw) if kind is bool and isinstance(raw, str) else kind(raw)
    except (TypeError, ValueError):
        raise ConfigurationError(flag, f"cannot parse {raw!r} as {kind.__name__}") from None


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Keys are flag names."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError("config", f"cannot read {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError("config", f"line {lineno} is not key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in OPTIONS:
            raise ConfigurationError(key, f"unknown key in {path}")
        values[key] = _coerce(key, value)
    return values


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError("arguments", message)


def build_parser() -> argparse.ArgumentParser:
    p = _ArgumentParser(prog="cubeseg", description="Segment a colour image by genetic k-means on the quantized RGB cube.")
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--input", help="PNG or binary PPM (P6) image")
    p.add_argument("--out-dir", help="directory for output artifacts")
    p.add_argument("--algorithm", choices=ALGORITHMS)
    p.add_argument("--clusters", type=str, metavar="K")
    p.add_argument("--cube-side", type=str)
    p.add_argument("--population", type=str)
    p.add_argument("--generations", type=str)
    p.add_argument("--crossover-rate", type=str)
    p.add_argument("--mutation-rate", type=str)
    p.add_argument("--mutation-mode", choices=MUTATION_MODES)
    p.add_argument("--tournament", type=str)
    p.add_argument("--elite", type=str)
    p.add_argument("--seed", type=str)
    p.add_argument("--max-iter", type=str, help="Lloyd iteration cap")
    p.add_argument("--trace", action="store_const", const=True, help="write trace.csv (ga only)")
    p.add_argument("--masks", action="store_const", const=True, help="write mask_<i>.png per cluster")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    merged = read_config_file(args.config) if args.config else {}
    for flag in OPTIONS:
        raw = getattr(args, flag.replace("-", "_"))
        if raw is not None:
            merged[flag] = _coerce(flag, raw)
    cfg = RunConfig(**{OPTIONS[flag][0]: value for flag, value in merged.items()})
    cfg.validate()
    return cfg


def format_trace(trace) -> str:
    lines = [TRACE_HEADER]
    lines += [f"{r.generation},{r.best_so_far_j:.6f},{r.gen_best_j:.6f},{r.gen_mean_j:.6f}" for r in trace]
    return "\n".join(lines) + "\n"


def write_trace(trace, path) -> None:
    if not trace:
        raise InvalidInputError("trace is empty")
    _atomic_write(Path(path), format_trace(trace).encode())


def _atomic_write(path: Path, data: bytes) -> None:
    _write_all(path.parent, {path.name: data})


def _write_all(directory: Path, artifacts: dict) -> None:
    """Write every artifact under a temporary name, then rename them all into place."""
    staged = []
    try:
        for name, data in artifacts.items():
            fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{name}.", suffix=".tmp")
            staged.append((tmp, directory / name))
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
        for tmp, final in staged:
            os.replace(tmp, final)
    except BaseException:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def format_report(items) -> str:
    return "".join(f"{key}={_fmt(value)}\n" for key, value in items)


def execute(cfg: RunConfig):
    """Run the configured algorithm; return ``(artifacts, report_items, duration)``.

    Nothing is written to disk here.
    """
    image = read_image(cfg.input_path)
    started = time.perf_counter()
    hist = build_histogram(image)
    q = quantize(hist, cfg.cube_side)
    n = len(q)
    trace = None
    if cfg.algorithm == "ga":
        result = run_ga(q, cfg.ga_config())
        assignment, trace = result.best_assignment, result.trace
    elif cfg.algorithm == "lloyd":
        if cfg.k > n:
            raise ConfigurationError("clusters", f"k={cfg.k} exceeds the {n} occupied subcubes")
        assignment = lloyd(q, cfg.k, seed=cfg.seed, max_iter=cfg.max_iter).assignment
    else:
        assignment, _ = brute_force_optimum(q, cfg.k, budget=DEFAULT_BUDGET)
    model = weighted_centroids(q, assignment)
    report = objective_j(q, assignment)
    seg = segment(image, q, assignment, model)
    duration = time.perf_counter() - started

    artifacts = {"segmented.png": encode_png(seg.rendered)}
    if cfg.emit_masks:
        for i in range(cfg.k):
            artifacts[f"mask_{i}.png"] = encode_png(seg.mask_image(i))
    if cfg.emit_trace:
        if trace is None:
            log.warning("--trace only applies to the ga algorithm; no trace written")
        else:
            artifacts["trace.csv"] = format_trace(trace).encode()

    items = [
        ("input", cfg.input_path),
        ("algorithm", cfg.algorithm),
        ("clusters", cfg.k),
        ("cube_side", cfg.cube_side),
        ("pixel_count", hist.source_pixel_count),
        ("distinct_colours", len(hist)),
        ("occupied_subcubes", n),
        ("chromosome_length", chromosome_length(n, cfg.k)),
        ("final_j", report.j),
    ]
    if cfg.algorithm == "ga":
        items += [
            ("population", cfg.population_size),
            ("generations", cfg.generations),
            ("crossover_rate", cfg.crossover_rate),
            ("mutation_rate", cfg.mutation_rate),
            ("mutation_mode", cfg.mutation_mode),
            ("tournament", cfg.tournament_size),
            ("elite", cfg.elite_count),
        ]
    elif cfg.algorithm == "lloyd":
        items.append(("max_iter", cfg.max_iter))
    items.append(("seed", cfg.seed))
    for i, st in enumerate(seg.stats):
        items.append((f"cluster_{i}_pixels", st.pixel_count))
        mean = "none" if st.mean_colour is None else " ".join(f"{v:.6f}" for v in st.mean_colour)
        items.append((f"cluster_{i}_mean", mean))
        items.append((f"cluster_{i}_j", report.per_cluster[i]))
    return artifacts, items, duration


def run(cfg: RunConfig) -> int:
    try:
        artifacts, items, duration = execute(cfg)
    except OSError as exc:
        print(f"error: cannot read input {cfg.input_path}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except InvalidInputError as exc:
        print(f"error: invalid input {cfg.input_path}: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigurationError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceededError as exc:
        print(f"error: {exc}; use --algorithm ga or --algorithm lloyd", file=sys.stderr)
        return EXIT_BUDGET
    artifacts["report.txt"] = format_report(items).encode()

    out = Path(cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        _write_all(out, artifacts)
    except OSError as exc:
        print(f"error: cannot write to {out}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    final_j = dict(items)["final_j"]
    print(f"J={final_j:.6f} duration_seconds={duration:.3f} outputs={out}")
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    logging.basicConfig(level=logging.DEBUG if "-v" in argv or "--verbose" in argv else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(argv)
    except ConfigurationError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CubesegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
