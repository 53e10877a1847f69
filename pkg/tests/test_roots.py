"""Contour counting, subdivision root finding and stability classification."""

import numpy as np
import pytest

from ddewave import CharMatrixEvaluator, catalog, roots
from ddewave.roots import (CircleContour, MultiplierSet, RectContour,
                           RootRecord, SearchRegion)


def test_winding_counts_on_known_disks(lw_bundle):
    """det Delta = 1 - z e^{-z}: root pair nearest the origin lies at
    0.3181 +- 1.3372i, so small disks around/away from it count 1/0."""
    _, ev, _ = lw_bundle
    z0 = 0.3181315052047642 + 1.3372357014306893j
    assert roots.winding_count(ev, CircleContour(z0, 0.3)) == 1
    # radius 3 also reaches the conjugate root but not the next branch pair
    assert roots.winding_count(ev, CircleContour(z0, 3.0)) == 2
    assert roots.winding_count(ev, CircleContour(5.0 + 0.0j, 0.5)) == 0
    assert roots.winding_count(ev, RectContour(-1 - 2j, 1 + 2j)) == 2


def test_winding_deviation_telemetry(lw_bundle):
    _, ev, mset = lw_bundle
    assert mset.winding_deviations  # populated
    assert max(mset.winding_deviations) < 1e-3


def test_contour_dilation_retry_on_root():
    """A contour passing numerically through a root must be dilated, not
    fail: the trivial problem has its only root exactly at z = 1."""
    b = catalog.make("trivial")
    ev = CharMatrixEvaluator(b.coeffs, tol=1e-10, radius=3.0)
    count = roots.winding_count(ev, CircleContour(0.0 + 0.0j, 1.0))
    assert count == 1


def test_find_all_counts_and_completeness(lw_bundle):
    _, _, mset = lw_bundle
    assert mset.total_count == sum(r.multiplicity for r in mset.roots)
    assert mset.total_count == 6
    # sorted by descending multiplier modulus
    mods = [abs(r.mu) for r in mset.roots]
    assert mods == sorted(mods, reverse=True)


def test_find_all_rectangle_region(lw_bundle):
    _, ev, _ = lw_bundle
    region = SearchRegion.rectangle(-1.0 - 2.0j, 1.5 + 2.0j, mu_min=0.05)
    mset = roots.find_all(ev, region)
    assert mset.total_count == 2
    zs = sorted((r.z for r in mset.roots), key=lambda z: z.imag)
    assert abs(zs[0] - (0.3181315052047642 - 1.3372357014306893j)) < 1e-9
    assert abs(zs[1] - (0.3181315052047642 + 1.3372357014306893j)) < 1e-9


def test_double_root_multiplicity(block_double_bundle):
    _, _, mset = block_double_bundle
    assert len(mset.roots) == 1
    assert mset.roots[0].multiplicity == 2
    assert abs(mset.roots[0].z - 0.5) < 1e-6


def test_trivial_root_identified(stuart_bundle):
    _, _, mset = stuart_bundle
    assert mset.trivial_root is not None
    assert abs(mset.trivial_root.z - 1.0) < 1e-9


def _mk_mset(records, trivial_index=None):
    region = SearchRegion.disk(0.05)
    return MultiplierSet(
        roots=records, region=region,
        total_count=sum(r.multiplicity for r in records),
        trivial_root=records[trivial_index] if trivial_index is not None else None)


def _rec(z, m=1):
    return RootRecord(z=z, multiplicity=m, newton_residual=0.0)


def test_classify_stable():
    mset = _mk_mset([_rec(1.0 + 0j), _rec(2.0 + 0j)], trivial_index=0)
    v = roots.classify(mset)
    assert v.classification == "stable"
    assert v.trivial_simple
    assert abs(v.margin - np.log(2.0)) < 1e-12


def test_classify_unstable_with_witness():
    mset = _mk_mset([_rec(1.0 + 0j), _rec(0.5 + 0j), _rec(3.0 + 0j)],
                    trivial_index=0)
    v = roots.classify(mset)
    assert v.classification == "unstable"
    assert abs(v.witness.mu - 2.0) < 1e-12


def test_classify_inconclusive_on_unit_circle():
    mset = _mk_mset([_rec(1.0 + 0j), _rec(1.0j)], trivial_index=0)
    v = roots.classify(mset)
    assert v.classification == "inconclusive"


def test_classify_inconclusive_without_trivial_root():
    mset = _mk_mset([_rec(2.0 + 0j)], trivial_index=0)  # not near z=1
    v = roots.classify(mset)
    assert v.classification == "inconclusive"
    assert v.warnings


def test_classify_degenerate_trivial_root():
    mset = _mk_mset([_rec(1.0 + 0j, m=2), _rec(2.0 + 0j)], trivial_index=0)
    v = roots.classify(mset)
    assert v.classification == "inconclusive"
    assert not v.trivial_simple


def test_classify_without_trivial_expectation():
    mset = _mk_mset([_rec(0.5 + 0j)], trivial_index=0)
    v = roots.classify(mset, expect_trivial=False)
    assert v.classification == "unstable"  # mu = 2
    stable = _mk_mset([_rec(2.0 + 0j)], trivial_index=0)
    assert roots.classify(stable, expect_trivial=False).classification == "stable"


def test_search_region_validation():
    with pytest.raises(ValueError):
        SearchRegion.disk(mu_min=0.0)
    with pytest.raises(ValueError):
        SearchRegion.disk(mu_min=1.5)


def test_find_all_deterministic(lw_bundle):
    b, _, mset = lw_bundle
    ev2 = CharMatrixEvaluator(b.coeffs, tol=1e-10, radius=22.0)
    mset2 = roots.find_all(ev2, roots.SearchRegion.disk(0.05))
    assert [r.z for r in mset.roots] == [r.z for r in mset2.roots]
    assert [r.multiplicity for r in mset.roots] == \
        [r.multiplicity for r in mset2.roots]
