"""Prefix dataset construction over the resource view.

Each eligible resource contributes exactly one sample: the first L
activities of its chronological sequence as the prefix and the activity
at position L+1 as the prediction target. A resource is eligible for
length L when its sequence holds at least L+1 activities, so a target
always exists.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigError, ValidationError
from .eventlog import EventLog, ResourceView

DEFAULT_PREFIX_CANDIDATES = (5, 10, 20, 50, 100, 200, 500, 1000, 1500, 2000, 3000)


@dataclass(frozen=True)
class LabelEncoder:
    """Bijection between activity strings and dense integer ids.

    Ids follow lexicographic activity order, so the lowest id always
    belongs to the lexicographically smallest label. Labels appended
    later via :meth:`with_extra` receive the next free id.
    """

    classes: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index = {label: i for i, label in enumerate(self.classes)}
        if len(index) != len(self.classes):
            raise ValidationError("encoder labels must be unique")
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.classes)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def encode(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValidationError(f"unknown activity label {label!r}") from None

    def decode(self, label_id: int) -> str:
        try:
            return self.classes[label_id]
        except IndexError:
            raise ValidationError(f"unknown activity id {label_id}") from None

    def with_extra(self, label: str) -> "LabelEncoder":
        """Return a copy with ``label`` appended under the next free id."""
        if label in self._index:
            return self
        return LabelEncoder(self.classes + (label,))


@dataclass(frozen=True)
class PrefixSample:
    resource_id: str
    prefix: tuple[int, ...]
    target: int


@dataclass(frozen=True)
class PrefixDataset:
    prefix_length: int
    samples: tuple[PrefixSample, ...]
    encoder: LabelEncoder


def fit_label_encoder(log: EventLog) -> LabelEncoder:
    """Fit one encoder over the full log alphabet so every split shares it."""
    return LabelEncoder(tuple(sorted(log.activity_alphabet)))


def eligible_resources(view: ResourceView, prefix_length: int) -> list[str]:
    """Resources with at least prefix_length + 1 activities, in sorted order."""
    if prefix_length < 1:
        raise ValidationError("prefix length must be at least 1")
    return [
        rid
        for rid in sorted(view.sequences)
        if len(view.sequences[rid]) >= prefix_length + 1
    ]


def build_prefix_dataset(
    view: ResourceView, prefix_length: int, encoder: LabelEncoder
) -> PrefixDataset:
    """One sample per eligible resource: first L activities plus the next one."""
    resources = eligible_resources(view, prefix_length)
    if not resources:
        raise ValidationError(
            f"no resource has {prefix_length + 1} or more activities; "
            "shorten the prefix grid"
        )
    samples = []
    for rid in resources:
        seq = view.sequences[rid]
        prefix = tuple(encoder.encode(a) for a in seq[:prefix_length])
        samples.append(
            PrefixSample(resource_id=rid, prefix=prefix, target=encoder.encode(seq[prefix_length]))
        )
    return PrefixDataset(prefix_length=prefix_length, samples=tuple(samples), encoder=encoder)


def prefix_grid(
    view: ResourceView,
    candidate_lengths: Sequence[int],
    min_resources: int = 100,
) -> list[int]:
    """Longest ascending head of candidates keeping enough eligible resources.

    Candidates after the first one whose eligible-resource count drops
    below ``min_resources`` are discarded.
    """
    if not candidate_lengths:
        raise ConfigError("candidate prefix lengths must be non-empty")
    if any(length < 1 for length in candidate_lengths):
        raise ConfigError("candidate prefix lengths must be positive")
    if any(a >= b for a, b in zip(candidate_lengths, candidate_lengths[1:])):
        raise ConfigError("candidate prefix lengths must be strictly ascending")
    kept: list[int] = []
    for length in candidate_lengths:
        if len(eligible_resources(view, length)) < min_resources:
            break
        kept.append(length)
    return kept


def prefix_dataset_to_csv(ds: PrefixDataset, path: str | Path) -> None:
    """Write a columnar CSV: resource_id, a_1..a_L, target (decoded labels)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["resource_id"]
            + [f"a_{i}" for i in range(1, ds.prefix_length + 1)]
            + ["target"]
        )
        for sample in ds.samples:
            writer.writerow(
                [sample.resource_id]
                + [ds.encoder.decode(a) for a in sample.prefix]
                + [ds.encoder.decode(sample.target)]
            )
