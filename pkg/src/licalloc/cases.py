"""Bundled case-study corpora and their expected outcomes.

Four two-or-three license scenarios exercise the divergence between the
baseline and the label-filtered allocator; two further fixtures cover the
all-candidates-lossy prompt and a mixed-branch sublicense used by the
labelling tests.  Timestamps are fixed so the fixtures never depend on a
wall clock: every window ends at MONTH_END and every request happens before
it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .model import (
    CP,
    Action,
    Count,
    DateTime,
    License,
    LicenseSet,
    Permission,
    Request,
    SubLicense,
)

MONTH_END = 1735689599
REQUEST_AT = 1735600000


def _perm(action: Action, content: str) -> Permission:
    return Permission(action, content)


@dataclass(frozen=True)
class CaseStudy:
    id: str
    title: str
    licenses: LicenseSet
    request: Request
    expected: Mapping[str, str]  # algorithm -> license id


def _case_once_before_month_end() -> CaseStudy:
    # license-1 dies entirely on first use (single charge over two songs);
    # license-2 just counts down from ten.
    licenses = LicenseSet(
        [
            License(
                "license-1",
                [
                    SubLicense(
                        "sl-1",
                        constraints=[Count(1), DateTime(end=MONTH_END)],
                        cps=[CP("cp-1", permissions=[_perm(Action.PLAY, "song-a"), _perm(Action.PLAY, "song-b")])],
                    )
                ],
            ),
            License(
                "license-2",
                [
                    SubLicense(
                        "sl-1",
                        constraints=[Count(10)],
                        cps=[CP("cp-1", permissions=[_perm(Action.PLAY, "song-a"), _perm(Action.PLAY, "song-c")])],
                    )
                ],
            ),
        ]
    )
    return CaseStudy(
        id="deadline-vs-counter",
        title="play A or B once before month end / play A or C ten times",
        licenses=licenses,
        request=Request(Action.PLAY, "song-a", at=REQUEST_AT),
        expected={"proposed": "license-2", "oma": "license-1"},
    )


def _shared_counter_vs_dated_licenses() -> LicenseSet:
    # license-1: ten uses in total across both rights, the play right also dated;
    # license-2: dated as a whole, with a three-use play right.
    return LicenseSet(
        [
            License(
                "license-1",
                [
                    SubLicense(
                        "sl-1",
                        constraints=[Count(10)],
                        cps=[
                            CP("cp-display", permissions=[_perm(Action.DISPLAY, "content-1")]),
                            CP(
                                "cp-play",
                                constraints=[DateTime(end=MONTH_END)],
                                permissions=[_perm(Action.PLAY, "content-2")],
                            ),
                        ],
                    )
                ],
            ),
            License(
                "license-2",
                [
                    SubLicense(
                        "sl-1",
                        constraints=[DateTime(end=MONTH_END)],
                        cps=[
                            CP(
                                "cp-play",
                                constraints=[Count(3)],
                                permissions=[_perm(Action.PLAY, "content-2")],
                            ),
                            CP("cp-display", permissions=[_perm(Action.DISPLAY, "content-1")]),
                        ],
                    )
                ],
            ),
        ]
    )


def _case_display_content1() -> CaseStudy:
    return CaseStudy(
        id="shared-counter-display",
        title="total-of-ten display/play vs dated three-use play; display request",
        licenses=_shared_counter_vs_dated_licenses(),
        request=Request(Action.DISPLAY, "content-1", at=REQUEST_AT),
        expected={"proposed": "license-2", "oma": "license-2"},
    )


def _case_play_content2() -> CaseStudy:
    return CaseStudy(
        id="shared-counter-play",
        title="total-of-ten display/play vs dated three-use play; play request",
        licenses=_shared_counter_vs_dated_licenses(),
        request=Request(Action.PLAY, "content-2", at=REQUEST_AT),
        expected={"proposed": "license-2", "oma": "license-2"},
    )


def _case_three_licenses() -> CaseStudy:
    licenses = LicenseSet(
        [
            License(
                "license-1",
                [
                    SubLicense(
                        "sl-1",
                        constraints=[Count(10)],
                        cps=[
                            CP("cp-display", permissions=[_perm(Action.DISPLAY, "content-1")]),
                            CP("cp-play", permissions=[_perm(Action.PLAY, "content-2")]),
                        ],
                    )
                ],
            ),
            License(
                "license-2",
                [
                    SubLicense(
                        "sl-1",
                        constraints=[Count(3)],
                        cps=[
                            CP("cp-play", permissions=[_perm(Action.PLAY, "content-2")]),
                            CP("cp-display", permissions=[_perm(Action.DISPLAY, "content-1")]),
                        ],
                    )
                ],
            ),
            License(
                "license-3",
                [
                    SubLicense(
                        "sl-1",
                        constraints=[Count(1), DateTime(end=MONTH_END)],
                        cps=[
                            CP(
                                "cp-1",
                                permissions=[
                                    _perm(Action.PLAY, "content-2"),
                                    _perm(Action.PLAY, "content-3"),
                                ],
                            )
                        ],
                    )
                ],
            ),
        ]
    )
    return CaseStudy(
        id="single-charge-deadline-third",
        title="two counters vs a single-charge dated license; play request",
        licenses=licenses,
        request=Request(Action.PLAY, "content-2", at=REQUEST_AT),
        expected={"proposed": "license-1", "oma": "license-3"},
    )


def case_studies() -> tuple[CaseStudy, ...]:
    return (
        _case_once_before_month_end(),
        _case_display_content1(),
        _case_play_content2(),
        _case_three_licenses(),
    )


def all_lossy_licenses() -> LicenseSet:
    """Two single-charge licenses sharing song A: any choice loses something."""
    return LicenseSet(
        [
            License(
                "license-1",
                [
                    SubLicense(
                        "sl-1",
                        constraints=[Count(1)],
                        cps=[CP("cp-1", permissions=[_perm(Action.PLAY, "song-a"), _perm(Action.PLAY, "song-b")])],
                    )
                ],
            ),
            License(
                "license-2",
                [
                    SubLicense(
                        "sl-1",
                        constraints=[Count(1)],
                        cps=[
                            CP(
                                "cp-1",
                                permissions=[
                                    _perm(Action.PLAY, "song-a"),
                                    _perm(Action.PLAY, "song-c"),
                                    _perm(Action.PLAY, "song-d"),
                                ],
                            )
                        ],
                    )
                ],
            ),
        ]
    )


def mixed_branch_license() -> License:
    """Single-charge dated sublicense over a ten-use two-song cp and a one-use print cp."""
    return License(
        "license-1",
        [
            SubLicense(
                "sl-1",
                constraints=[Count(1), DateTime(end=MONTH_END)],
                cps=[
                    CP(
                        "cp-1",
                        constraints=[Count(10)],
                        permissions=[_perm(Action.PLAY, "song-a"), _perm(Action.PLAY, "song-b")],
                    ),
                    CP(
                        "cp-2",
                        constraints=[Count(1)],
                        permissions=[_perm(Action.PRINT, "document-c")],
                    ),
                ],
            )
        ],
    )
