import numpy as np
import pytest

from sspcast import (
    ChronologyError,
    Profile,
    ValidationError,
    build_depth_schedule,
    format_month,
    parse_month,
    read_layered_csv,
    read_series_csv,
    write_layered_csv,
    write_series_csv,
)


def test_month_parse_format_round_trip():
    assert parse_month("2017-01") == 2017 * 12
    assert parse_month("2021-12") == 2021 * 12 + 11
    assert format_month(parse_month("2021-10")) == "2021-10"
    for m in range(2016 * 12, 2023 * 12):
        assert parse_month(format_month(m)) == m


def test_month_parse_errors():
    for bad in ("2017-13", "2017-00", "201701", "17-01", "2017-1", "x"):
        with pytest.raises(ValidationError):
            parse_month(bad)


def _demo_profiles(n_months=3):
    rng = np.random.default_rng(11)
    depths = np.array([0.0, 50.0, 100.0])
    out = []
    for i in range(n_months):
        speeds = np.round(1500.0 + rng.uniform(-5, 5, 3), 6)
        out.append(Profile(parse_month("2019-01") + i, depths, speeds))
    return out


def test_series_csv_round_trip_bit_exact(tmp_path):
    profiles = _demo_profiles()
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    write_series_csv(profiles, p1)
    back = read_series_csv(p1)
    assert [b.month for b in back] == [p.month for p in profiles]
    write_series_csv(back, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_series_csv_reports_line_numbers(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("month,depth_m,speed_mps\n2019-01,0.0,1500.0\n2019-01,ten,1500.0\n")
    with pytest.raises(ValidationError, match=":3"):
        read_series_csv(path)


def test_series_csv_duplicate_month_fatal(tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text(
        "month,depth_m,speed_mps\n"
        "2019-01,0.0,1500.0\n2019-01,50.0,1500.0\n"
        "2019-02,0.0,1500.0\n2019-02,50.0,1500.0\n"
        "2019-01,0.0,1500.0\n2019-01,50.0,1500.0\n"
    )
    with pytest.raises(ChronologyError, match="2019-01"):
        read_series_csv(path)


def test_series_csv_rejects_empty_and_bad_header(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ValidationError):
        read_series_csv(empty)
    wrong = tmp_path / "wrong.csv"
    wrong.write_text("a,b,c\n")
    with pytest.raises(ValidationError, match="header"):
        read_series_csv(wrong)


def test_layered_csv_round_trip(tmp_path):
    sched = build_depth_schedule([0, 100, 500])
    vec = np.array([1512.123456, 1490.5, 1488.0])
    path = tmp_path / "layered.csv"
    write_layered_csv(vec, sched, path)
    depths, speeds = read_layered_csv(path)
    assert np.array_equal(depths, sched.levels)
    assert np.allclose(speeds, vec, atol=1e-6)
    with pytest.raises(ValidationError):
        write_layered_csv(vec[:2], sched, path)
