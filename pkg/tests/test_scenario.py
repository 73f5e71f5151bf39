import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dbsplan.channel import pairwise_2d
from dbsplan.scenario import (PcpConfig, ScenarioFormatError, format_scenario,
                              generate_pcp_scenario, load_scenario, parse_scenario,
                              place_mbs_corners, save_scenario)


def test_corner_gateways():
    gw = place_mbs_corners(10_000, 4, 30)
    assert [(g.x, g.y) for g in gw] == [(0, 0), (0, 10_000), (10_000, 0), (10_000, 10_000)]
    assert all(g.h == 30 for g in gw)


@pytest.mark.parametrize("side", [1.0, 250.0, 10_000.0])
def test_corner_distances(side):
    xy = np.array([(g.x, g.y) for g in place_mbs_corners(side, 4, 0)])
    d = np.sort(pairwise_2d(xy)[np.triu_indices(4, 1)])
    assert np.allclose(d, [side] * 4 + [side * math.sqrt(2)] * 2)


def test_single_and_other_gateway_counts():
    assert [(g.x, g.y) for g in place_mbs_corners(10_000, 1, 30)] == [(0, 0)]
    gw = place_mbs_corners(1000, 6, 30)
    xy = {(g.x, g.y) for g in gw}
    assert len(xy) == 6
    for x, y in xy:
        assert x in (0, 1000) or y in (0, 1000)
    with pytest.raises(ValueError):
        place_mbs_corners(1000, 0, 30)


def test_zero_scatter_single_parent():
    cfg = PcpConfig(fixed_parents=((5000.0, 5000.0),), parent_intensity=0,
                    daughters_per_parent=5, daughter_scatter=0, poisson_daughters=False)
    s = generate_pcp_scenario(cfg)
    assert len(s.nodes) == 5
    assert all((n.x, n.y) == (5000.0, 5000.0) for n in s.nodes)


def test_determinism_and_bytes():
    a = generate_pcp_scenario(PcpConfig(seed=42))
    b = generate_pcp_scenario(PcpConfig(seed=42))
    assert a == b
    assert format_scenario(a) == format_scenario(b)
    assert generate_pcp_scenario(PcpConfig(seed=43)) != a


@settings(max_examples=30)
@given(st.integers(0, 2**63 - 1))
def test_nodes_inside_area_with_positive_load(seed):
    s = generate_pcp_scenario(PcpConfig(seed=seed, area_side=3000, parent_intensity=1.0,
                                        daughter_scatter=800))
    xy = s.gn_positions
    assert len(xy) > 0
    assert np.all((xy >= 0) & (xy <= 3000))
    assert np.all(s.gn_loads == 20.0)


def test_empty_instances_are_redrawn():
    # a tiny parent intensity almost always yields zero parents on the first draw
    s = generate_pcp_scenario(PcpConfig(seed=3, parent_intensity=1e-3))
    assert len(s.nodes) > 0
    assert s == generate_pcp_scenario(PcpConfig(seed=3, parent_intensity=1e-3))


def test_instance_size_tail_mass():
    """Fraction of seeds with 50 <= U <= 400 against the compound-Poisson value."""
    from scipy.stats import poisson
    mu_p, mu_d = 8.0, 25.0
    ks = np.arange(0, 60)
    # P(U in [50, 400]) = sum_k P(K=k) P(Poisson(k mu_d) in [50, 400])
    p = sum(poisson.pmf(k, mu_p) * (poisson.cdf(400, k * mu_d) - poisson.cdf(49, k * mu_d))
            for k in ks)
    n = 1000
    sizes = [len(generate_pcp_scenario(PcpConfig(seed=s)).nodes) for s in range(n)]
    frac = np.mean([(50 <= u <= 400) for u in sizes])
    # the redraw rule only removes U = 0 outcomes, which are outside the band anyway
    p_nonempty = p / (1 - math.exp(-mu_p) - sum(
        poisson.pmf(k, mu_p) * math.exp(-k * mu_d) for k in range(1, 60)))
    band = 4 * math.sqrt(p_nonempty * (1 - p_nonempty) / n)
    assert abs(frac - p_nonempty) <= band


def test_load_override():
    s = generate_pcp_scenario(PcpConfig(seed=1, load_override=((0, 55.0),)))
    assert s.nodes[0].load == 55.0
    assert s.nodes[1].load == 20.0


def test_round_trip(tmp_path):
    s = generate_pcp_scenario(PcpConfig(seed=9, load_override=((2, 33.5),)))
    save_scenario(s, tmp_path / "s.txt")
    assert load_scenario(tmp_path / "s.txt") == s


def test_truncated_file_is_rejected(tmp_path):
    text = format_scenario(generate_pcp_scenario(PcpConfig(seed=5)))
    cut = "\n".join(text.splitlines()[:-3]) + "\n"
    with pytest.raises(ScenarioFormatError):
        parse_scenario(cut)


def test_negative_load_names_node():
    text = format_scenario(generate_pcp_scenario(PcpConfig(seed=5)))
    lines = text.splitlines()
    i = next(k for k, ln in enumerate(lines) if ln.startswith("gn ") and " id=7 " in ln + " ")
    lines[i] = lines[i].replace("load=20", "load=-4")
    with pytest.raises(ScenarioFormatError) as err:
        parse_scenario("\n".join(lines) + "\n")
    assert "7" in str(err.value)
    assert err.value.line == i + 1


def test_unknown_field_rejected():
    text = format_scenario(generate_pcp_scenario(PcpConfig(seed=5)))
    lines = text.splitlines()
    lines[1] += " colour=red"
    with pytest.raises(ScenarioFormatError) as err:
        parse_scenario("\n".join(lines))
    assert err.value.field == "colour"


def test_config_validation():
    with pytest.raises(ValueError):
        PcpConfig(load_per_gn=0)
    with pytest.raises(ValueError):
        PcpConfig(mbs_count=0)
    with pytest.raises(ValueError):
        PcpConfig(daughters_per_parent=-1)
