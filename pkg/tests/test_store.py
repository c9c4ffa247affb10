"""Results store backends, batching, reopening and CSV export."""

import struct
from datetime import datetime, timedelta

import numpy as np
import pandas as pd
import pytest

from src.store import (
    CSV_COLUMNS,
    FileStore,
    LayoutFrozenError,
    MemoryStore,
    ResultKey,
    ResultLayout,
    StoreConfig,
    StoreConfigError,
    StoreError,
    UnknownResultError,
    export_csv,
    make_store,
    open_store,
    result_frame,
)

T0 = datetime(2024, 1, 1)
POWER = ResultKey("ED", "variable", "ActivePower")
PRICE = ResultKey("ED", "dual", "CopperPlateBalance")
UNITS = ("Alta", "Brighton", "Park City", "Solitude", "Sundance")


def layouts():
    return [
        ResultLayout(POWER, UNITS, horizon_steps=2, realized_steps=1, resolution=3600),
        ResultLayout(PRICE, ("system",), horizon_steps=2, realized_steps=1, resolution=3600),
    ]


def matrix(seed, shape=(2, 5)):
    return np.random.default_rng(seed).normal(size=shape) * 1e3


def fill(store, hours=3):
    store.register_layout(layouts())
    written = {}
    for h in range(hours):
        at = T0 + timedelta(hours=h)
        written[at] = matrix(h)
        store.write_result(POWER, at, written[at])
        store.write_result(PRICE, at, matrix(100 + h, (2, 1)))
    return written


@pytest.fixture(params=["memory", "file"])
def store(request, tmp_path):
    if request.param == "memory":
        return MemoryStore()
    return FileStore(tmp_path / "results.opsim", StoreConfig(write_batch_min=4096))


class TestResultStore:
    def test_read_back_bit_exact(self, store):
        written = fill(store)
        for at, values in written.items():
            read = store.read_result(POWER, at)
            assert read.tobytes() == values.tobytes()
            assert not read.flags.writeable
        assert store.execution_times(POWER) == sorted(written)
        assert store.keys() == [PRICE, POWER]
        store.close()

    def test_rejects_bad_writes(self, store):
        fill(store, hours=1)
        with pytest.raises(StoreError, match="does not match"):
            store.write_result(POWER, T0 + timedelta(hours=5), np.zeros((2, 4)))
        with pytest.raises(StoreError, match="already holds a result"):
            store.write_result(POWER, T0, matrix(0))
        with pytest.raises(UnknownResultError):
            store.write_result(ResultKey("UC", "variable", "OnStatus"), T0, matrix(0))
        with pytest.raises(UnknownResultError):
            store.read_result(POWER, T0 + timedelta(hours=9))
        store.close()

    def test_layout_freezes_after_first_write(self, store):
        fill(store, hours=1)
        store.register_layout(layouts())
        with pytest.raises(LayoutFrozenError):
            store.register_layout([ResultLayout(ResultKey("UC", "variable", "OnStatus"), UNITS, 48, 24)])
        store.close()

    def test_changed_layout_before_writes(self, store):
        store.register_layout(layouts())
        with pytest.raises(StoreError, match="already registered differently"):
            store.register_layout([ResultLayout(POWER, UNITS, horizon_steps=3, realized_steps=1)])

    def test_read_cache(self, store):
        fill(store)
        store.read_result(POWER, T0)
        store.read_result(POWER, T0)
        assert (store.stats.hits, store.stats.misses) == (1, 1)
        store.close()

    def test_closed_store_refuses_writes(self, store):
        fill(store, hours=1)
        with store:
            pass
        assert store.closed
        with pytest.raises(StoreError, match="closed"):
            store.write_result(POWER, T0 + timedelta(hours=1), matrix(1))
        store.close()


class TestFileStore:
    def test_small_writes_stay_buffered(self, tmp_path):
        store = FileStore(tmp_path / "results.opsim", StoreConfig(write_batch_min=4096, compress=False))
        fill(store, hours=2)
        assert store.stats.flushes == 0
        assert store.buffered_bytes == 2 * (80 + 16)
        assert store.read_result(POWER, T0).tobytes() == matrix(0).tobytes()
        store.close()
        assert store.stats.flushes == 1
        assert (tmp_path / "results.opsim").stat().st_size == store.stats.bytes_written

    def test_batches_reach_threshold(self, tmp_path):
        store = FileStore(tmp_path / "results.opsim", StoreConfig(write_batch_min=4096, compress=False))
        store.register_layout([ResultLayout(POWER, UNITS, horizon_steps=48, realized_steps=24)])
        for h in range(5):
            store.write_result(POWER, T0 + timedelta(hours=h), matrix(h, (48, 5)))
        # 1920 bytes per matrix: the third write crosses 4096.
        assert store.stats.flushes == 1
        assert store.stats.write_sizes[0] == 8 + 3 * 1920
        assert store.read_result(POWER, T0 + timedelta(hours=1)).tobytes() == matrix(1, (48, 5)).tobytes()
        store.close()
        assert all(size >= 4096 for size in store.stats.write_sizes[:-1])

    def test_reopen(self, tmp_path):
        path = tmp_path / "results.opsim"
        with FileStore(path) as store:
            written = fill(store)
        reader = open_store(path)
        assert reader.keys() == [PRICE, POWER]
        assert reader.layout(POWER).components == UNITS
        for at, values in written.items():
            assert reader.read_result(POWER, at).tobytes() == values.tobytes()
        with pytest.raises(StoreError, match="read-only"):
            reader.write_result(POWER, T0 + timedelta(hours=10), matrix(0))
        reader.close()

    def test_identical_writes_give_identical_files(self, tmp_path):
        for name in ("a", "b"):
            with FileStore(tmp_path / name / "results.opsim") as store:
                fill(store)
        assert (tmp_path / "a" / "results.opsim").read_bytes() == (tmp_path / "b" / "results.opsim").read_bytes()

    def test_unclean_files(self, tmp_path):
        foreign = tmp_path / "foreign.opsim"
        foreign.write_bytes(b"not a store at all, just some bytes")
        with pytest.raises(StoreError, match="not an opsim results store"):
            open_store(foreign)
        truncated = tmp_path / "truncated.opsim"
        truncated.write_bytes(b"OPSIMRS1" + b"\0" * 64 + struct.pack("<QQ8s", 0, 0, b"XXXXXXXX"))
        with pytest.raises(StoreError, match="missing footer"):
            open_store(truncated)
        with pytest.raises(StoreError):
            open_store(tmp_path / "absent.opsim")

    def test_make_store(self, tmp_path):
        assert isinstance(make_store(StoreConfig(backend="memory"), tmp_path), MemoryStore)
        store = make_store(StoreConfig(), tmp_path)
        assert store.path == tmp_path / "store" / "results.opsim"


class TestExport:
    def test_frame_rows(self):
        store = MemoryStore()
        fill(store, hours=2)
        frame = result_frame(store, POWER)
        assert list(frame.columns) == CSV_COLUMNS
        assert len(frame) == 2 * 2 * 5
        assert frame["realized_flag"].sum() == 10
        realized = result_frame(store, POWER, include_lookahead=False)
        assert realized["horizon_step"].unique().tolist() == [1]
        assert realized["component"].tolist()[:5] == list(UNITS)

    def test_csv_keeps_full_precision(self, tmp_path):
        store = MemoryStore()
        written = fill(store, hours=2)
        path = export_csv(store, POWER, tmp_path / "out" / "power.csv")
        frame = pd.read_csv(path)
        assert frame["execution_time"].tolist()[0] == "2024-01-01T00:00:00"
        assert frame["value"].to_numpy()[:5].tolist() == written[T0][0].tolist()

    def test_empty_result(self):
        store = MemoryStore()
        store.register_layout(layouts())
        assert result_frame(store, POWER).empty


class TestKeysAndConfig:
    def test_result_key(self):
        assert POWER.path == "ED/variable/ActivePower"
        assert ResultKey.from_path(POWER.path) == POWER
        with pytest.raises(ValueError):
            ResultKey("ED", "guess", "ActivePower")
        with pytest.raises(ValueError):
            ResultKey("ED", "variable", "a/b")

    def test_layout_axes(self):
        with pytest.raises(ValueError):
            ResultLayout(POWER, UNITS, horizon_steps=2, realized_steps=3)
        with pytest.raises(ValueError):
            ResultLayout(POWER, ("a", "a"), horizon_steps=2, realized_steps=1)

    def test_store_config(self):
        assert StoreConfig.from_mapping({"compress": False, "extra": 1}).compress is False
        with pytest.raises(StoreConfigError, match="at least 4096"):
            StoreConfig(write_batch_min=1024)
        with pytest.raises(StoreConfigError):
            StoreConfig(backend="s3")
