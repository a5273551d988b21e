import itertools
import math

import pytest
from hypothesis import given, strategies as st

from kleinrefl.spectral import (
    VOL_S2,
    VOL_S3,
    li_yau_slack,
    sphere_volume,
    verify_sphere_saturation,
    volume_bound_chain,
)

PI = math.pi
positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


class TestSlack:
    def test_round_sphere_saturates(self):
        assert li_yau_slack(2, 4 * PI, 2, 4 * PI).slack == pytest.approx(0, abs=1e-12)

    @pytest.mark.parametrize("m", [2, 3, 5])
    def test_zero_eigenvalue(self, m):
        chk = li_yau_slack(0, 7.0, m, 3.0)
        assert chk.slack == pytest.approx(m * 3.0 ** (2 / m)) and chk.holds

    def test_bound_chain_is_tight(self):
        assert li_yau_slack(0.75, 64 * PI**2, 3, 8 * PI**2).slack == pytest.approx(0, abs=1e-12)

    def test_fields(self):
        chk = li_yau_slack(1.5, 2.0, 3, 4.0)
        assert (chk.lambda1, chk.vol, chk.dim_m, chk.conf_vol) == (1.5, 2.0, 3, 4.0)
        assert chk.slack == 3 * 4.0 ** (2 / 3) - 1.5 * 2.0 ** (2 / 3)

    @pytest.mark.parametrize("args", [(-1, 1, 2, 1), (1, 0, 2, 1), (1, 1, 2, 0), (1, 1, 1, 1), (1, 1, 2.5, 1)])
    def test_domain_errors(self, args):
        with pytest.raises(ValueError):
            li_yau_slack(*args)

    @given(positive, positive, st.integers(2, 6), positive, positive)
    def test_scale_invariance(self, lam, vol, m, vc, c):
        base = li_yau_slack(lam, vol, m, vc).slack
        scaled = li_yau_slack(lam / c**2, c**m * vol, m, vc).slack
        assert scaled == pytest.approx(base, rel=1e-9, abs=1e-9 * (abs(lam * vol ** (2 / m)) + 1))

    @given(positive, positive, st.integers(2, 6), positive, st.integers(2, 10))
    def test_degree_bound_adds_slack(self, lam, vol, m, vc, d):
        assert li_yau_slack(lam, vol, m, d * vc).slack > li_yau_slack(lam, vol, m, vc).slack

    def test_sphere_volumes(self):
        assert sphere_volume(2) == pytest.approx(VOL_S2)
        assert sphere_volume(3) == pytest.approx(VOL_S3)


class TestChain:
    def test_default_is_64_pi_squared(self):
        chain = volume_bound_chain()
        assert chain.vol_bound == pytest.approx(64 * PI**2, rel=1e-12)
        assert chain.vc_bound == pytest.approx(8 * PI**2, rel=1e-15)
        assert chain.vol_bound == pytest.approx(631.6546816697189, rel=1e-12)

    def test_ramanujan_variant(self):
        assert volume_bound_chain(1.0).vol_bound == pytest.approx(3**1.5 * 8 * PI**2, rel=1e-12)

    def test_index_one(self):
        # vol_bound = (3 / lambda)^(3/2) * index * Vol(S^3) is linear in the index
        assert volume_bound_chain(0.75, VOL_S3, 1).vol_bound == pytest.approx(16 * PI**2, rel=1e-12)
        assert volume_bound_chain(0.75, VOL_S3, 4).vol_bound / volume_bound_chain(0.75, VOL_S3, 1).vol_bound == pytest.approx(4)

    def test_invariant(self):
        c = volume_bound_chain(0.6, 11.0, 3)
        assert c.vc_bound == 33.0
        assert c.vol_bound == pytest.approx((3 * 33.0 ** (2 / 3) / 0.6) ** 1.5, rel=1e-14)

    @pytest.mark.parametrize("args", [(0, 1, 1), (1, -1, 1), (1, 1, 0), (1, 1, 1.5)])
    def test_domain_errors(self, args):
        with pytest.raises(ValueError):
            volume_bound_chain(*args)

    def test_monotone(self):
        lams = [0.25, 0.5, 0.75, 1.0, 2.0]
        vcs = [1.0, VOL_S3, 50.0]
        idx = [1, 2, 4, 8]
        for lam, vc, i in itertools.product(lams, vcs, idx):
            b = volume_bound_chain(lam, vc, i).vol_bound
            assert volume_bound_chain(lam * 1.1, vc, i).vol_bound < b
            assert volume_bound_chain(lam, vc * 1.1, i).vol_bound > b
            assert volume_bound_chain(lam, vc, i + 1).vol_bound > b


class TestSaturation:
    def test_depth5(self):
        chk = verify_sphere_saturation(5)
        assert abs(chk.slack) <= 0.05 * 8 * PI
        assert chk.holds_within(0.05 * 8 * PI)
        assert chk.dim_m == 2 and chk.conf_vol == VOL_S2

    def test_refinement_shrinks_slack(self):
        assert abs(verify_sphere_saturation(2).slack) > abs(verify_sphere_saturation(5).slack)

    def test_inflated_conformal_volume(self):
        base = verify_sphere_saturation(3)
        inflated = verify_sphere_saturation(3, conf_vol=8 * PI)
        assert inflated.slack > 0
        assert inflated.slack - base.slack == pytest.approx(2 * (8 * PI - 4 * PI), rel=1e-12)
