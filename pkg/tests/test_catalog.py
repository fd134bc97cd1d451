import numpy as np
import pytest

from conftest import ALL_ENTRIES, build
from metriclie.algebra import lie_algebra_violations
from metriclie.catalog import (
    ParamOutOfRange,
    UnknownEntry,
    catalog_list,
    get_entry,
    resolve_params,
    verify_table_entry,
)


def test_names_are_unique_and_grouped():
    entries = catalog_list()
    assert len({e.name for e in entries}) == len(entries)
    assert {e.group for e in entries} == {"family", "kahler", "reducible", "irreducible"}


def test_describe():
    d = get_entry("aff_x_aff").describe()
    assert d["name"] == "aff_x_aff" and d["group"] == "reducible"
    assert d["params"]["s"]["constraint"] == "0 < s <= 1"
    assert d["params"]["t"]["default"] == 1.0


def test_unknown_entry():
    with pytest.raises(UnknownEntry):
        get_entry("d5")


@pytest.mark.parametrize(
    "name,params",
    [
        ("aff_x_aff", {"s": 2.0}),
        ("aff_x_aff", {"s": 0.0}),
        ("d4lambda", {"lambda": 0.25}),
        ("d4p", {"c": 0.0}),
        ("d4.2", {"t": -1.0}),
        ("d4.2", {"t": float("nan")}),
        ("abelian", {"n": 2.5}),
        ("h3", {"t": 1.0}),
        ("aff", {"x": "y"}),
        ("d4half", {"c": "big"}),
    ],
)
def test_parameter_checks(name, params):
    with pytest.raises(ParamOutOfRange):
        build(name, **params)


def test_integer_parameter_is_int():
    vals = resolve_params(get_entry("abelian"), {"n": 3.0})
    assert vals == {"n": 3} and isinstance(vals["n"], int)
    assert build("abelian", n=3).mla.dim == 3


def test_keyword_and_dict_params_agree():
    from metriclie.catalog import catalog_build

    a = catalog_build("aff_x_aff", {"s": 0.5})
    b = catalog_build("aff_x_aff", s=0.5)
    assert np.array_equal(a.mla.gram, b.mla.gram)


@pytest.mark.parametrize("name", ALL_ENTRIES)
def test_every_entry_verifies(name):
    rep = verify_table_entry(name)
    assert rep.ok, rep.to_dict()
    assert rep.to_dict()["ok"] is True


@pytest.mark.parametrize("name", ALL_ENTRIES)
def test_every_entry_is_a_lie_algebra_at_t4(name):
    params = {"t": 4.0} if "t" in get_entry(name).defaults() else {}
    b = build(name, **params)
    assert not lie_algebra_violations(b.mla.algebra)
    assert verify_table_entry(name, params).ok


@pytest.mark.parametrize("name", [e.name for e in catalog_list() if e.group == "kahler"])
def test_kahler_structures_square_to_minus_one(name):
    rep = verify_table_entry(name)
    assert rep.complex_residuals
    assert all(r < 1e-12 for r in rep.complex_residuals.values())


def test_equal_angles_still_verify():
    # H = J is parallel too; the dimension does not depend on H
    rep = verify_table_entry("R2_x_aff", {"a1": 1, "a2": 1})
    assert rep.ok and rep.parallel_dim == 2


@pytest.mark.parametrize("lam", [0.5, 1.0, 3.0])
def test_d4p_family_parameter(lam):
    rep = verify_table_entry("d4p", {"lambda": lam, "c": -2})
    assert rep.ok and rep.parallel_dim == 1


def test_algebra_keys():
    assert build("kahler_d4.2").algebra_key == build("d4.2").algebra_key
    assert build("kahler_r_e2").algebra_key == build("R_x_e2").algebra_key
    assert build("d4half").algebra_key != build("d4.2").algebra_key
    assert build("kahler_d4p", delta=2).algebra_key == build("d4p", **{"lambda": 1}).algebra_key
