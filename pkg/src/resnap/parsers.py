"""Readers for XES (XML) and delimited-text event logs.

Both readers produce the same kind of validated :class:`EventLog`:

* events lacking a resource are dropped and counted,
* timestamps are normalised to UTC (naive values are taken as UTC),
* gzip-compressed input is detected by its magic bytes and decompressed
  transparently,
* equal timestamps keep their source-file order.

Only the XES subset actually used here is read: per event the
``concept:name`` (activity), ``org:resource`` and ``time:timestamp``
attributes, plus the trace-level ``concept:name`` as the case id.
"""
from __future__ import annotations

import csv
import gzip
import io
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import BinaryIO

from .errors import ConfigError, EmptyLogError, ParseError, ValidationError
from .eventlog import Event, EventLog, build_event_log

_GZIP_MAGIC = b"\x1f\x8b"


@dataclass(frozen=True)
class CsvMapping:
    """Column mapping for delimited-text logs.

    ``timestamp_format`` is a strptime pattern; when None, timestamps are
    read as ISO-8601.
    """

    case: str
    activity: str
    resource: str
    timestamp: str
    timestamp_format: str | None = None
    delimiter: str = ","


def _open_binary(source: bytes | str | Path | BinaryIO) -> BinaryIO:
    """Return a binary stream over the source, decompressing gzip if present.

    Files and gzip members are streamed rather than loaded whole, so
    multi-million-event logs parse within bounded memory.
    """
    if isinstance(source, (str, Path)):
        handle = open(source, "rb")
        magic = handle.read(2)
        handle.seek(0)
        if magic == _GZIP_MAGIC:
            return gzip.open(handle)
        return handle
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
        if data[:2] == _GZIP_MAGIC:
            return gzip.open(io.BytesIO(data))
        return io.BytesIO(data)
    head = source.read(2)
    data = head + source.read()
    if head == _GZIP_MAGIC:
        return gzip.open(io.BytesIO(data))
    return io.BytesIO(data)


def _parse_timestamp_iso(value: str) -> datetime:
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        # some exporters emit more than 6 fractional-second digits
        trimmed = re.sub(r"(\.\d{6})\d+", r"\1", text)
        ts = datetime.fromisoformat(trimmed)
    return _to_utc(ts)


def _to_utc(ts: datetime) -> datetime:
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _localname(tag: str) -> str:
    return tag.rpartition("}")[2]


def _xes_attributes(elem: ET.Element) -> dict[str, str]:
    attrs: dict[str, str] = {}
    for child in elem:
        if _localname(child.tag) in ("string", "date", "int", "float", "boolean"):
            key = child.get("key")
            value = child.get("value")
            if key is not None and value is not None and key not in attrs:
                attrs[key] = value
    return attrs


def parse_xes(source: bytes | str | Path | BinaryIO) -> EventLog:
    """Parse an XES document into an :class:`EventLog`.

    Raises :class:`ParseError` with line/column on malformed XML,
    :class:`ValidationError` naming the trace when an event lacks an
    activity or timestamp, and :class:`EmptyLogError` when the document
    has no traces.
    """
    stream = _open_binary(source)
    raw_events: list[Event] = []
    pending: list[dict[str, str]] = []
    n_traces = 0
    file_order = 0
    in_trace = False
    try:
        for event_kind, elem in ET.iterparse(stream, events=("start", "end")):
            tag = _localname(elem.tag)
            if event_kind == "start":
                if tag == "trace":
                    in_trace = True
                continue
            if tag == "event" and in_trace:
                pending.append(_xes_attributes(elem))
                elem.clear()
            elif tag == "trace":
                in_trace = False
                n_traces += 1
                case_id = _xes_attributes(elem).get("concept:name") or f"trace-{n_traces}"
                for attrs in pending:
                    activity = attrs.get("concept:name", "")
                    if not activity:
                        raise ValidationError(
                            f"event without concept:name in trace '{case_id}'"
                        )
                    ts_text = attrs.get("time:timestamp")
                    if ts_text is None:
                        raise ValidationError(
                            f"event without time:timestamp in trace '{case_id}'"
                        )
                    try:
                        ts = _parse_timestamp_iso(ts_text)
                    except ValueError as exc:
                        raise ValidationError(
                            f"unreadable timestamp {ts_text!r} in trace '{case_id}'"
                        ) from exc
                    raw_events.append(
                        Event(
                            case_id=case_id,
                            activity=activity,
                            resource=attrs.get("org:resource") or None,
                            timestamp=ts,
                            file_order=file_order,
                        )
                    )
                    file_order += 1
                pending.clear()
                elem.clear()
    except ET.ParseError as exc:
        line, column = exc.position
        raise ParseError(f"malformed XML at line {line}, column {column}: {exc.msg}") from exc
    if n_traces == 0:
        raise EmptyLogError("XES document contains no traces")
    if not raw_events:
        raise EmptyLogError("XES document contains no events")
    return build_event_log(raw_events)


def parse_csv(source: bytes | str | Path | BinaryIO, mapping: CsvMapping) -> EventLog:
    """Parse a delimited-text log into an :class:`EventLog`.

    The first row must be a header containing every mapped column. Data
    rows are numbered from 1 in error messages. Raises
    :class:`ConfigError` when a mapped column is missing and
    :class:`ValidationError` with the row number on bad cell values.
    """
    stream = _open_binary(source)
    text = io.TextIOWrapper(stream, encoding="utf-8-sig", newline="")
    reader = csv.DictReader(text, delimiter=mapping.delimiter)
    if not reader.fieldnames:
        raise ConfigError("CSV input has no header row")
    missing = [
        col
        for col in (mapping.case, mapping.activity, mapping.resource, mapping.timestamp)
        if col not in reader.fieldnames
    ]
    if missing:
        raise ConfigError(f"CSV header is missing mapped columns: {', '.join(missing)}")

    raw_events: list[Event] = []
    for row_no, row in enumerate(reader, start=1):
        case_id = (row.get(mapping.case) or "").strip()
        activity = (row.get(mapping.activity) or "").strip()
        resource = (row.get(mapping.resource) or "").strip() or None
        ts_text = (row.get(mapping.timestamp) or "").strip()
        if not case_id:
            raise ValidationError(f"empty case id in row {row_no}")
        if not activity:
            raise ValidationError(f"empty activity in row {row_no}")
        try:
            if mapping.timestamp_format is None:
                ts = _parse_timestamp_iso(ts_text)
            else:
                ts = _to_utc(datetime.strptime(ts_text, mapping.timestamp_format))
        except ValueError as exc:
            raise ValidationError(
                f"timestamp {ts_text!r} does not match the expected format in row {row_no}"
            ) from exc
        raw_events.append(
            Event(
                case_id=case_id,
                activity=activity,
                resource=resource,
                timestamp=ts,
                file_order=row_no - 1,
            )
        )
    if not raw_events:
        raise EmptyLogError("CSV input contains no data rows")
    return build_event_log(raw_events)
