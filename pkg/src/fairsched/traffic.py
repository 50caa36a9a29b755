"""CBR traffic source and per-user transmission queues.

Every user receives a fixed-size packet on a fixed period; packets wait in
an unbounded FIFO and are segmented against the transport block the
scheduler grants. The queue delay of a user is the sum of the ages of all
packets still stored, which the queue tracks in O(1) via an arrival-time
aggregate.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


@dataclass
class Packet:
    size_bits: int
    arrival_tti: int
    remaining_bits: int

    def __post_init__(self):
        if not 0 < self.remaining_bits <= self.size_bits:
            raise ValueError("remaining_bits must be in (0, size_bits]")


@dataclass
class UserQueue:
    """Unbounded FIFO of packets for one user.

    `arrival_sum` mirrors the sum of arrival TTIs of queued packets so the
    aggregate queue delay never needs a full scan. A partially served
    packet keeps its original arrival TTI: delay accrues until the packet
    fully departs.
    """

    user_id: int
    packets: deque = field(default_factory=deque)
    arrival_sum: int = 0
    bits_arrived: int = 0
    bits_delivered: int = 0

    def __len__(self) -> int:
        return len(self.packets)

    @property
    def bits_queued(self) -> int:
        return sum(p.remaining_bits for p in self.packets)

    def push(self, size_bits: int, n: int) -> None:
        self.packets.append(Packet(size_bits, n, size_bits))
        self.arrival_sum += n
        self.bits_arrived += size_bits


def generate_arrivals(queues: list[UserQueue], n: int, s_cbr: int,
                      t_cbr: float, tti: float,
                      phases: list[int] | None = None) -> None:
    """Append one packet of 8*s_cbr bits to every queue whose arrival epoch
    matches TTI n. t_cbr must be an integer multiple of the TTI."""
    period = round(t_cbr / tti)
    if abs(period * tti - t_cbr) > 1e-9 * tti or period < 1:
        raise ValueError(f"t_cbr={t_cbr} is not an integer multiple of tti={tti}")
    size_bits = 8 * s_cbr
    if size_bits <= 0:
        return
    for i, q in enumerate(queues):
        phase = phases[i] if phases is not None else 0
        if n % period == phase:
            q.push(size_bits, n)


def queue_delay(queue: UserQueue, n: int, tti: float) -> float:
    """Sum of the ages (in seconds) of every packet stored in the queue."""
    return (len(queue.packets) * n - queue.arrival_sum) * tti


def serve(queue: UserQueue, tb_bits: int,
          success: bool) -> tuple[int, list[tuple[int, int]]]:
    """Drain up to tb_bits from the queue head.

    A failed transport block (success=False) leaves the queue untouched:
    the data stays at the head for the next TTI. A partially served head
    packet shrinks but stays queued. Returns (delivered bits, list of
    (arrival_tti, size_bits) for packets that fully departed, for
    sojourn-time bookkeeping).
    """
    if tb_bits < 0:
        raise ValueError("tb_bits must be >= 0")
    if not success or tb_bits == 0:
        return 0, []
    delivered = 0
    departed: list[tuple[int, int]] = []
    remaining = tb_bits
    while remaining > 0 and queue.packets:
        head = queue.packets[0]
        if head.remaining_bits <= remaining:
            remaining -= head.remaining_bits
            delivered += head.remaining_bits
            queue.packets.popleft()
            queue.arrival_sum -= head.arrival_tti
            departed.append((head.arrival_tti, head.size_bits))
        else:
            head.remaining_bits -= remaining
            delivered += remaining
            remaining = 0
    queue.bits_delivered += delivered
    return delivered, departed
