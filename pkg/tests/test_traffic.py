import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairsched.traffic import (Packet, UserQueue, generate_arrivals,
                               queue_delay, serve)


def make_queues(n):
    return [UserQueue(u) for u in range(n)]


class TestArrivals:
    def test_table_values(self):
        # 850 bytes every 6 ms: 6800 bits at n = 0, 6, 12, ...
        queues = make_queues(2)
        for n in range(13):
            generate_arrivals(queues, n, 850, 6e-3, 1e-3)
        for q in queues:
            assert len(q) == 3
            assert all(p.size_bits == 6800 for p in q.packets)
            assert [p.arrival_tti for p in q.packets] == [0, 6, 12]

    def test_off_epoch(self):
        queues = make_queues(1)
        generate_arrivals(queues, 3, 850, 6e-3, 1e-3)
        assert len(queues[0]) == 0

    def test_count_after_60ms(self):
        queues = make_queues(4)
        for n in range(60):
            generate_arrivals(queues, n, 850, 6e-3, 1e-3)
        assert all(len(q) == 10 for q in queues)

    def test_phases(self):
        queues = make_queues(2)
        generate_arrivals(queues, 2, 100, 6e-3, 1e-3, phases=[0, 2])
        assert len(queues[0]) == 0 and len(queues[1]) == 1

    def test_zero_size_no_packets(self):
        queues = make_queues(1)
        generate_arrivals(queues, 0, 0, 6e-3, 1e-3)
        assert len(queues[0]) == 0

    def test_non_multiple_period_rejected(self):
        with pytest.raises(ValueError):
            generate_arrivals(make_queues(1), 0, 100, 2.5e-3, 1e-3)


class TestQueueDelay:
    def test_empty(self):
        assert queue_delay(UserQueue(0), 100, 1e-3) == 0.0

    def test_single_packet(self):
        q = UserQueue(0)
        q.push(6800, 5)
        assert queue_delay(q, 10, 1e-3) == pytest.approx(5e-3)

    def test_sum_of_ages(self):
        q = UserQueue(0)
        q.push(100, 3)
        q.push(100, 7)
        assert queue_delay(q, 10, 1e-3) == pytest.approx(10e-3)

    def test_growth_without_service(self):
        q = UserQueue(0)
        q.push(100, 0)
        q.push(100, 0)
        w5 = queue_delay(q, 5, 1e-3)
        w6 = queue_delay(q, 6, 1e-3)
        assert w6 - w5 == pytest.approx(2 * 1e-3)


class TestServe:
    def test_zero_tb(self):
        q = UserQueue(0)
        q.push(500, 0)
        delivered, departed = serve(q, 0, True)
        assert delivered == 0 and departed == [] and len(q) == 1

    def test_segmentation(self):
        q = UserQueue(0)
        q.push(6800, 0)
        q.push(6800, 6)
        delivered, departed = serve(q, 10_000, True)
        assert delivered == 10_000
        assert departed == [(0, 6800)]
        assert len(q) == 1
        assert q.packets[0].remaining_bits == 3600
        assert q.packets[0].arrival_tti == 6  # delay keeps original arrival

    def test_block_error_leaves_queue(self):
        q = UserQueue(0)
        q.push(500, 0)
        delivered, departed = serve(q, 1000, False)
        assert delivered == 0 and departed == []
        assert q.packets[0].remaining_bits == 500

    def test_negative_tb_rejected(self):
        with pytest.raises(ValueError):
            serve(UserQueue(0), -1, True)

    @settings(max_examples=100)
    @given(st.lists(st.integers(min_value=0, max_value=5000), min_size=1,
                    max_size=30))
    def test_conservation_and_order(self, tb_sizes):
        q = UserQueue(0)
        n = 0
        rng = np.random.default_rng(0)
        for i, tb in enumerate(tb_sizes):
            generate_arrivals([q], i, 100, 2e-3, 1e-3)
            serve(q, tb, bool(rng.random() < 0.9))
        assert q.bits_arrived == q.bits_delivered + q.bits_queued
        arrivals = [p.arrival_tti for p in q.packets]
        assert arrivals == sorted(arrivals)


def test_packet_invariant():
    with pytest.raises(ValueError):
        Packet(100, 0, 0)
    with pytest.raises(ValueError):
        Packet(100, 0, 101)
