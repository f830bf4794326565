import pytest
from hypothesis import given
from hypothesis import strategies as st

from licalloc.model import (
    CP,
    Action,
    Count,
    DateTime,
    License,
    LicenseSet,
    Permission,
    Request,
    SubLicense,
    matches,
    sat_cp,
    sat_license,
    sat_set,
    sat_sublicense,
)

from conftest import perm


def test_matches_identity():
    assert matches(perm("play", "a"), Request(Action.PLAY, "a", at=0))


def test_matches_action_mismatch():
    assert not matches(perm("play", "a"), Request(Action.DISPLAY, "a", at=0))


def test_matches_content_mismatch():
    assert not matches(perm("play", "b"), Request(Action.PLAY, "a", at=0))


def test_sat_cp_two_songs():
    cp = CP("cp-1", permissions=[perm("play", "song-a"), perm("play", "song-b")])
    assert sat_cp(cp, Request(Action.PLAY, "song-a", at=0))
    assert not sat_cp(CP("cp-2", permissions=[perm("play", "song-c")]), Request(Action.PLAY, "song-a", at=0))
    assert sat_cp(CP("cp-3", permissions=[perm("display", "c1")]), Request(Action.DISPLAY, "c1", at=0))


def test_sat_lifts_on_case_fixture(deadline_case):
    licenses = deadline_case.licenses
    assert sat_license(licenses.license("license-2"), Request(Action.PLAY, "song-a", at=0))
    assert not sat_set(LicenseSet([]), Request(Action.PLAY, "song-a", at=0))
    # exhaustive scan over both permission lists: song-d appears nowhere
    present = {
        p
        for lic in licenses
        for sl in lic.sublicenses
        for cp in sl.cps
        for p in cp.permissions
    }
    assert perm("play", "song-d") not in present
    assert not sat_set(licenses, Request(Action.PLAY, "song-d", at=0))


def test_request_validation():
    with pytest.raises(ValueError):
        Request(Action.PLAY, "a", at=-1)
    with pytest.raises(ValueError):
        Request(Action.PLAY, "a", at=0, usage_duration=-5)


def test_constraint_validation():
    with pytest.raises(ValueError):
        Count(0)
    with pytest.raises(ValueError):
        DateTime()
    with pytest.raises(ValueError):
        DateTime(start=10, end=5)
    DateTime(end=5)  # one bound is enough


def test_tree_invariants():
    with pytest.raises(ValueError):
        CP("cp-1", permissions=[])
    with pytest.raises(ValueError):
        SubLicense("sl-1", cps=[])
    with pytest.raises(ValueError):
        License("l-1", sublicenses=[])
    cp = CP("cp-1", permissions=[perm("play", "a")])
    with pytest.raises(ValueError):
        SubLicense("sl-1", cps=[cp, cp])
    lic = License("l-1", [SubLicense("sl-1", cps=[cp])])
    with pytest.raises(ValueError):
        LicenseSet([lic, lic])


actions = st.sampled_from(list(Action))
contents = st.sampled_from(["a", "b", "c"])
permissions = st.builds(Permission, actions, contents)


@st.composite
def license_sets(draw):
    n_lic = draw(st.integers(1, 3))
    out = []
    for i in range(n_lic):
        subs = []
        for j in range(draw(st.integers(1, 2))):
            cps = []
            for k in range(draw(st.integers(1, 2))):
                perms = draw(st.lists(permissions, min_size=1, max_size=3, unique=True))
                cps.append(CP(f"cp-{k}", permissions=perms))
            subs.append(SubLicense(f"sl-{j}", cps=cps))
        out.append(License(f"license-{i}", subs))
    return LicenseSet(out)


@given(license_sets(), permissions)
def test_sat_levels_are_existential_lifts(licenses, p):
    request = Request(p.action, p.content, at=0)
    assert sat_set(licenses, request) == any(sat_license(l, request) for l in licenses)
    for lic in licenses:
        assert sat_license(lic, request) == any(sat_sublicense(sl, request) for sl in lic.sublicenses)
        for sl in lic.sublicenses:
            assert sat_sublicense(sl, request) == any(sat_cp(cp, request) for cp in sl.cps)
