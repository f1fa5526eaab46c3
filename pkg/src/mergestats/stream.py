"""CSV stream ingestion with a mergeable running summary.

A feeder process replays a delimited text file over a TCP socket as
newline-terminated UTF-8 records; connection close means end of stream.
The consumer groups parsed values into fixed-size batches, summarizes each
batch, and merges it into a running summary.  It can also recompute the
statistic from scratch over everything seen so far at every batch
boundary, which is exactly the cost the merge path avoids; running both at
once measures the gap and cross-checks the algebra.

Timing covers aggregation only: records are parsed once, outside the
clocks, for both paths.
"""

from __future__ import annotations

import random
import socket
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timedelta
from importlib import resources
from pathlib import Path
from statistics import median
from typing import Iterable, Iterator, Sequence

from .bench import BenchRecord
from .costmodel import UnitCosts, calibrate_unit_costs, predict_variance_times
from .summaries import MomentSummary, merge_population, summarize

__all__ = [
    "StreamConfig",
    "RecordSchema",
    "IngestReport",
    "MalformedLineError",
    "parse_record",
    "ingest",
    "serve_feed",
    "grid_search",
    "generate_synthetic_stream",
    "sample_stream_path",
    "UCI_FIELDS",
]

UCI_FIELDS = (
    "Date",
    "Time",
    "Global_active_power",
    "Global_reactive_power",
    "Voltage",
    "Global_intensity",
    "Sub_metering_1",
    "Sub_metering_2",
    "Sub_metering_3",
)

_MODES = ("pka", "direct", "both")
_SOURCE_KINDS = ("file", "listen")
_ERROR_POLICIES = ("abort", "skip")


class MalformedLineError(ValueError):
    """A record that cannot be parsed, with its 1-based line number."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


@dataclass(frozen=True)
class StreamConfig:
    """Where to read records from and how to aggregate them.

    ``source`` is a file path when ``source_kind`` is "file", or a
    host:port listen address when it is "listen".  Socket streams carry no
    header row, so ``header`` must supply the field layout for them; file
    streams take the layout from their first line.
    """

    source: str
    column: str
    delimiter: str = ";"
    missing_token: str = "?"
    batch_size: int = 200
    mode: str = "pka"
    source_kind: str = "file"
    header: str | None = None
    on_error: str = "abort"

    def __post_init__(self) -> None:
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        if self.source_kind not in _SOURCE_KINDS:
            raise ValueError(f"source_kind must be one of {_SOURCE_KINDS}")
        if self.on_error not in _ERROR_POLICIES:
            raise ValueError(f"on_error must be one of {_ERROR_POLICIES}")


@dataclass(frozen=True)
class RecordSchema:
    """Field layout of a record stream plus the selected column."""

    fields: tuple[str, ...]
    column_index: int
    delimiter: str
    missing_token: str

    @classmethod
    def from_header(cls, header_line: str, config: StreamConfig) -> "RecordSchema":
        fields = tuple(header_line.rstrip("\r\n").split(config.delimiter))
        if config.column not in fields:
            raise ValueError(f"column {config.column!r} not found in header {fields}")
        return cls(
            fields=fields,
            column_index=fields.index(config.column),
            delimiter=config.delimiter,
            missing_token=config.missing_token,
        )


@dataclass(frozen=True)
class IngestReport:
    """Counts, totals, and the final summary of one ingestion run."""

    records_read: int
    records_missing: int
    batches: int
    running_summary: MomentSummary
    t_pka_total: float
    t_direct_total: float
    max_rel_deviation: float
    truncated: bool = False


def parse_record(line: str, schema: RecordSchema, line_no: int = 0) -> float | None:
    """Extract the configured column from one record line.

    Returns None for the missing token; raises :class:`MalformedLineError`
    for a wrong field count or an unparseable number.
    """
    fields = line.split(schema.delimiter)
    if len(fields) != len(schema.fields):
        raise MalformedLineError(line_no, f"expected {len(schema.fields)} fields, got {len(fields)}")
    raw = fields[schema.column_index]
    if raw == schema.missing_token:
        return None
    try:
        return float(raw)
    except ValueError:
        raise MalformedLineError(line_no, f"cannot parse {raw!r} as a number") from None


def _parse_address(address: str) -> tuple[str, int]:
    host, _, port = address.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"address must look like host:port, got {address!r}")
    return host, int(port)


def _consume(
    lines: Iterable[str],
    schema: RecordSchema,
    config: StreamConfig,
    first_line_no: int,
    truncation_errors: tuple[type[BaseException], ...] = (),
) -> IngestReport:
    do_pka = config.mode in ("pka", "both")
    do_direct = config.mode in ("direct", "both")

    running = MomentSummary()
    direct_summary = MomentSummary()
    retained: list[float] = []
    pending: list[float] = []
    records_read = records_missing = batches = 0
    t_pka = t_direct = 0.0
    max_rel_dev = 0.0
    truncated = False

    def flush() -> None:
        nonlocal running, direct_summary, batches, t_pka, t_direct, max_rel_dev
        if not pending:
            return
        batches += 1
        if do_pka:
            t0 = time.perf_counter()
            running = merge_population(running, summarize(pending))
            t_pka += time.perf_counter() - t0
        if do_direct:
            retained.extend(pending)
            t0 = time.perf_counter()
            direct_summary = summarize(retained)
            t_direct += time.perf_counter() - t0
        if do_pka and do_direct:
            reference = direct_summary.population_variance()
            gap = abs(running.population_variance() - reference) / max(abs(reference), 1e-12)
            max_rel_dev = max(max_rel_dev, gap)
        pending.clear()

    try:
        for line_no, raw in enumerate(lines, start=first_line_no):
            line = raw.rstrip("\r\n")
            try:
                value = parse_record(line, schema, line_no)
            except MalformedLineError:
                if config.on_error == "skip":
                    continue
                raise
            records_read += 1
            if value is None:
                records_missing += 1
                continue
            pending.append(value)
            if len(pending) == config.batch_size:
                flush()
    except truncation_errors:
        truncated = True
    flush()

    return IngestReport(
        records_read=records_read,
        records_missing=records_missing,
        batches=batches,
        running_summary=running if do_pka else direct_summary,
        t_pka_total=t_pka,
        t_direct_total=t_direct,
        max_rel_deviation=max_rel_dev,
        truncated=truncated,
    )


def _socket_lines(address: str) -> Iterator[str]:
    host, port = _parse_address(address)
    with socket.create_server((host, port)) as server:
        conn, _ = server.accept()
        with conn, conn.makefile("r", encoding="utf-8", newline="") as stream:
            yield from stream


def ingest(config: StreamConfig) -> IngestReport:
    """Consume the configured source and return the final report.

    A lost socket connection yields a partial report flagged truncated;
    a cleanly closed connection is a normal end of stream.
    """
    if config.source_kind == "file":
        with open(config.source, encoding="utf-8") as stream:
            header = stream.readline()
            if not header:
                raise ValueError(f"{config.source}: empty source, no header row")
            schema = RecordSchema.from_header(header, config)
            return _consume(stream, schema, config, first_line_no=2)

    if config.header is None:
        raise ValueError("socket sources carry no header row; config.header must supply one")
    schema = RecordSchema.from_header(config.header, config)
    return _consume(
        _socket_lines(config.source),
        schema,
        config,
        first_line_no=1,
        truncation_errors=(ConnectionError, TimeoutError),
    )


def serve_feed(source_file: str | Path, address: str, rate: float | None = None) -> int:
    """Replay a file's data records (header stripped) to a consumer socket.

    Records are sent as newline-terminated UTF-8 lines, optionally paced at
    ``rate`` records per second; the connection is closed at end of file to
    signal end of stream.  Returns the number of records sent.
    """
    if rate is not None and rate <= 0:
        raise ValueError("rate must be positive")
    host, port = _parse_address(address)
    lines = Path(source_file).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{source_file}: empty source file")
    records = lines[1:]
    start = time.monotonic()
    with socket.create_connection((host, port)) as conn:
        for i, line in enumerate(records):
            if rate is not None:
                delay = start + i / rate - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
            conn.sendall((line + "\n").encode("utf-8"))
    return len(records)


def _load_values(config: StreamConfig) -> list[float]:
    if config.source_kind != "file":
        raise ValueError("grid search needs a file source")
    values: list[float] = []
    with open(config.source, encoding="utf-8") as stream:
        header = stream.readline()
        if not header:
            raise ValueError(f"{config.source}: empty source, no header row")
        schema = RecordSchema.from_header(header, config)
        for line_no, raw in enumerate(stream, start=2):
            try:
                value = parse_record(raw.rstrip("\r\n"), schema, line_no)
            except MalformedLineError:
                if config.on_error == "skip":
                    continue
                raise
            if value is not None:
                values.append(value)
    return values


def grid_search(
    config: StreamConfig,
    batch_sizes: Sequence[int],
    prior_sizes: Sequence[int],
    *,
    costs: UnitCosts | None = None,
    trials: int = 5,
) -> list[BenchRecord]:
    """Time merge versus recompute over (prior_size, batch_size) cells.

    For each cell the first ``prior_size`` parsed values form a prebuilt
    summary; timed are (a) summarizing the next ``batch_size`` values and
    merging them in, and (b) a two-pass recomputation over all
    prior_size + batch_size values.  Cells the source is too short for are
    skipped with a warning.  Rows reuse the benchmark CSV schema.
    """
    if not batch_sizes or not prior_sizes:
        raise ValueError("batch_sizes and prior_sizes must be nonempty")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    values = _load_values(config)
    if costs is None:
        costs = calibrate_unit_costs(3, 10_000)

    records: list[BenchRecord] = []
    for prior_n in prior_sizes:
        for batch_n in batch_sizes:
            if prior_n < 1 or batch_n < 1:
                raise ValueError("grid sizes must be at least 1")
            if prior_n + batch_n > len(values):
                print(
                    f"[grid] skipping prior={prior_n} batch={batch_n}: "
                    f"source has only {len(values)} valid records",
                    file=sys.stderr,
                )
                continue
            prior_values = values[:prior_n]
            batch_values = values[prior_n : prior_n + batch_n]
            all_values = values[: prior_n + batch_n]
            prior = summarize(prior_values)

            direct_times: list[float] = []
            pka_times: list[float] = []
            value_direct = value_pka = 0.0
            for trial in range(trials + 1):
                t0 = time.perf_counter()
                value_direct = summarize(all_values).population_variance()
                t1 = time.perf_counter()
                t2 = time.perf_counter()
                value_pka = merge_population(prior, summarize(batch_values)).population_variance()
                t3 = time.perf_counter()
                if trial > 0:
                    direct_times.append(t1 - t0)
                    pka_times.append(t3 - t2)

            gap = abs(value_direct - value_pka) / max(abs(value_direct), 1e-12)
            if gap > 1e-9:
                raise RuntimeError(
                    f"paths disagree at prior={prior_n}, batch={batch_n}: "
                    f"{value_direct!r} vs {value_pka!r}"
                )
            model = predict_variance_times(prior_n, batch_n, costs)
            records.append(
                BenchRecord(
                    n1=prior_n,
                    n2=batch_n,
                    t_direct_measured=median(direct_times),
                    t_pka_measured=median(pka_times),
                    t_direct_model=model.t_direct,
                    t_pka_model=model.t_pka,
                    value_direct=value_direct,
                    value_pka=value_pka,
                )
            )
    return records


def generate_synthetic_stream(
    path: str | Path,
    n_records: int,
    seed: int = 8086,
    *,
    missing_rate: float = 0.0,
    delimiter: str = ";",
    missing_token: str = "?",
) -> Path:
    """Write a deterministic household-power style CSV and return its path.

    The layout matches the common per-minute consumption format: a header
    of nine semicolon-separated fields, date/time first, then seven numeric
    measurements; rows drawn as missing carry the missing token in every
    measurement column.
    """
    if n_records < 0:
        raise ValueError("n_records must be nonnegative")
    if not 0.0 <= missing_rate <= 1.0:
        raise ValueError("missing_rate must be within [0, 1]")
    rng = random.Random(seed)
    stamp = datetime(2006, 12, 16, 17, 24)
    rows = [delimiter.join(UCI_FIELDS)]
    for _ in range(n_records):
        date = f"{stamp.day}/{stamp.month}/{stamp.year}"
        clock = stamp.strftime("%H:%M:%S")
        if rng.random() < missing_rate:
            measurements = [missing_token] * 7
        else:
            active = abs(rng.gauss(1.2, 1.1))
            measurements = [
                f"{active:.3f}",
                f"{abs(rng.gauss(0.12, 0.11)):.3f}",
                f"{rng.gauss(240.0, 3.3):.3f}",
                f"{active * 4.2:.3f}",
                f"{rng.uniform(0.0, 2.0):.3f}",
                f"{rng.uniform(0.0, 2.0):.3f}",
                f"{rng.uniform(0.0, 19.0):.3f}",
            ]
        rows.append(delimiter.join([date, clock] + measurements))
        stamp += timedelta(minutes=1)
    target = Path(path)
    target.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return target


def sample_stream_path() -> Path:
    """Path of the bundled 1000-record household-power sample."""
    return Path(str(resources.files("mergestats").joinpath("data/household_sample.csv")))
