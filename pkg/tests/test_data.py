"""Delimited-file ingestion and typed column parsing."""

from __future__ import annotations

import json

import numpy as np
import pytest

from joininfer.catalog import TypeTag, load_manifest
from joininfer.data import file_digest, load_all, load_table
from joininfer.errors import DataAccessError


@pytest.fixture()
def shop(tmp_path):
    (tmp_path / "orders.csv").write_text(
        "order_id,amount,placed_on,rush,note\n"
        "1,10.5,2024-01-02,true,first\n"
        "2,,2024-01-03,false,\n"
        "3,xx,bad-date,maybe,third\n",
        encoding="utf-8",
    )
    manifest = {
        "database_name": "shop",
        "tables": [
            {
                "name": "orders",
                "columns": [
                    {"name": "order_id", "type": "integer-unsigned"},
                    {"name": "amount", "type": "decimal"},
                    {"name": "placed_on", "type": "date"},
                    {"name": "rush", "type": "boolean"},
                    {"name": "note", "type": "text"},
                ],
                "data_source": "orders.csv",
            }
        ],
    }
    p = tmp_path / "manifest.json"
    p.write_text(json.dumps(manifest), encoding="utf-8")
    return load_manifest(p)


class TestLoadTable:
    def test_types_and_nulls(self, shop):
        t = load_table(shop, shop.table("orders"))
        ids = t.columns["order_id"]
        assert ids.values.dtype.kind == "f"
        assert ids.non_null().tolist() == [1.0, 2.0, 3.0]

        amount = t.columns["amount"]
        # empty field is NULL; "xx" is a parse error treated as NULL
        assert amount.null_count + amount.error_count == 2
        assert amount.non_null().tolist() == [10.5]

        placed = t.columns["placed_on"]
        assert placed.values.dtype.kind == "M"
        assert placed.error_count == 1

        rush = t.columns["rush"]
        assert rush.non_null().tolist() == [1.0, 0.0]

        note = t.columns["note"]
        assert note.non_null().tolist() == ["first", "third"]

    def test_missing_file(self, shop, tmp_path):
        decl = shop.table("orders")
        decl.data_source = "ghost.csv"
        with pytest.raises(DataAccessError):
            load_table(shop, decl)

    def test_load_all(self, shop):
        tables = load_all(shop)
        assert set(tables) == {"orders"}
        assert tables["orders"].row_count == 3


class TestFileDigest:
    def test_stable_and_content_sensitive(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("a,b\n1,2\n", encoding="utf-8")
        d1 = file_digest(p)
        assert d1 == file_digest(p)
        p.write_text("a,b\n1,3\n", encoding="utf-8")
        assert file_digest(p) != d1


class TestBenchmarkIngestion:
    def test_row_counts(self, tpch_manifest):
        tables = load_all(tpch_manifest)
        assert tables["region"].row_count == 5
        assert tables["nation"].row_count == 25
        assert tables["supplier"].row_count == 100
        assert tables["part"].row_count == 2000
        assert tables["customer"].row_count == 1500
        assert tables["orders"].row_count == 15000
        assert tables["partsupp"].row_count == 8000

    def test_no_parse_errors(self, tpch_manifest):
        tables = load_all(tpch_manifest)
        for t in tables.values():
            for c in t.columns.values():
                assert c.error_count == 0, (t.name, c.column)
