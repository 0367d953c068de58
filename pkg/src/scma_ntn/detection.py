"""Downlink multiuser detection at a single receiver.

All layers reach a receiver through the same channel vector, so detection
is joint over the M^J codeword tuples.  Two detectors are provided: an
exhaustive maximum-likelihood search (the oracle) and an iterative max-log
message passing algorithm (MPA) over the sparse factor graph, which is the
workhorse for Monte Carlo sweeps.  Both operate on batches for speed.
"""

from dataclasses import dataclass

import numpy as np

from .codebook import CodebookSet

__all__ = [
    "ReceivedSignal",
    "DetectionResult",
    "MlDetector",
    "MpaDetector",
    "ml_detect",
    "mpa_detect",
    "count_bit_errors",
    "indices_to_bits",
    "MAX_JOINT_TUPLES",
]

MAX_JOINT_TUPLES = 17_000_000


@dataclass(frozen=True)
class ReceivedSignal:
    """One received vector with its effective channel and noise level."""

    y: np.ndarray
    channel: np.ndarray
    n0: float

    def __post_init__(self):
        if np.asarray(self.y).shape != np.asarray(self.channel).shape:
            raise ValueError("y and channel must have matching length K")
        if self.n0 <= 0:
            raise ValueError("noise level must be positive")


@dataclass(frozen=True)
class DetectionResult:
    """Per-user codeword index decisions and the corresponding bits."""

    indices: np.ndarray
    bits: np.ndarray


def indices_to_bits(indices: np.ndarray, m_order: int) -> np.ndarray:
    """Natural-labeling bits of codeword indices, MSB first, concatenated."""
    bits_per = int(np.log2(m_order))
    indices = np.asarray(indices)
    shifts = np.arange(bits_per - 1, -1, -1)
    return ((indices[..., None] >> shifts) & 1).reshape(*indices.shape[:-1], -1)


def count_bit_errors(tx_bits, rx_bits) -> int:
    """Hamming distance between two equal-length bit arrays."""
    tx_bits = np.asarray(tx_bits)
    rx_bits = np.asarray(rx_bits)
    if tx_bits.shape != rx_bits.shape:
        raise ValueError("bit arrays must have equal length")
    return int(np.sum(tx_bits != rx_bits))


class MlDetector:
    """Exhaustive joint ML detection over all M^J codeword tuples.

    Tuple t encodes (m_1, ..., m_J) in mixed radix with user 1 most
    significant; argmin ties resolve to the lowest t.
    """

    def __init__(self, cbs: CodebookSet):
        j, k, m = cbs.codebooks.shape
        if m**j > MAX_JOINT_TUPLES:
            raise ValueError(f"M^J = {m**j} exceeds the enumerable guard {MAX_JOINT_TUPLES}")
        self.m_order = m
        self.j_users = j
        table = np.zeros((1, k), dtype=complex)
        for l in range(j):
            table = (table[:, None, :] + cbs.codebooks[l].T[None, :, :]).reshape(-1, k)
        self.table = table.T.copy()  # (K, M^J)

    def detect_batch(self, y: np.ndarray, channel: np.ndarray) -> np.ndarray:
        """Joint decisions for a batch: (B, K) inputs -> (B, J) indices.

        ||y - h s||^2 expands to const - 2 Re(<conj(y) h, s>) + <|h|^2, |s|^2>,
        so the search is two matrix products against the tuple table.
        """
        y = np.atleast_2d(y)
        channel = np.atleast_2d(channel)
        best_idx = np.zeros(y.shape[0], dtype=np.int64)
        table2 = self.table.real**2 + self.table.imag**2
        step = max(1, (1 << 25) // max(1, self.table.shape[1]))
        for lo in range(0, y.shape[0], step):
            hi = min(lo + step, y.shape[0])
            u = np.conj(y[lo:hi]) * channel[lo:hi]
            w = channel[lo:hi].real**2 + channel[lo:hi].imag**2
            cost = w @ table2 - 2.0 * (u @ self.table).real
            best_idx[lo:hi] = np.argmin(cost, axis=1)
        return self._unpack(best_idx)

    def _unpack(self, joint: np.ndarray) -> np.ndarray:
        out = np.zeros((joint.size, self.j_users), dtype=np.int64)
        rem = joint.copy()
        for l in range(self.j_users - 1, -1, -1):
            out[:, l] = rem % self.m_order
            rem //= self.m_order
        return out


class MpaDetector:
    """Max-log message passing over the factor graph.

    Works in the negative log domain (min-sum), which is underflow-free;
    messages are normalized to min zero each pass.  iterations = 0 degrades
    to per-user single-layer demapping that ignores interference.
    """

    def __init__(self, cbs: CodebookSet, iterations: int = 8):
        if iterations < 0:
            raise ValueError("iterations must be >= 0")
        self.iterations = iterations
        self.m_order = cbs.dims.m_order
        self.j_users, self.k_resources, _ = cbs.codebooks.shape
        self.codebooks = cbs.codebooks
        self.rn_users = cbs.collision_sets()
        self.user_edges = [[] for _ in range(self.j_users)]  # (k, position in rn_users[k])
        for k, users in enumerate(self.rn_users):
            for pos, l in enumerate(users):
                self.user_edges[l].append((k, pos))
        # Per-RN local superpositions over the M^{d_k} collision hypotheses,
        # first colliding user on the leading axis.
        self.local = []
        for k, users in enumerate(self.rn_users):
            d = len(users)
            tab = np.zeros((self.m_order,) * d, dtype=complex) if d else np.zeros((), dtype=complex)
            for i, l in enumerate(users):
                shape = [1] * d
                shape[i] = self.m_order
                tab = tab + self.codebooks[l, k, :].reshape(shape)
            self.local.append(tab)

    def detect_batch(self, y: np.ndarray, channel: np.ndarray, n0: float) -> np.ndarray:
        y = np.atleast_2d(y)
        channel = np.atleast_2d(channel)
        if self.iterations == 0:
            return self._single_user_batch(y, channel)
        # Chunk for cache locality; message tensors grow as B * M^d_k.
        step = 2048
        if y.shape[0] <= step:
            return self._detect_chunk(y, channel, n0)
        return np.concatenate(
            [
                self._detect_chunk(y[lo : lo + step], channel[lo : lo + step], n0)
                for lo in range(0, y.shape[0], step)
            ]
        )

    def _detect_chunk(self, y: np.ndarray, channel: np.ndarray, n0: float) -> np.ndarray:
        b = y.shape[0]
        m = self.m_order
        cost = []
        for k, users in enumerate(self.rn_users):
            resid = y[:, k].reshape((b,) + (1,) * len(users)) - channel[:, k].reshape(
                (b,) + (1,) * len(users)
            ) * self.local[k][None, ...]
            cost.append((resid.real**2 + resid.imag**2) / n0)
        rn_msg = [[np.zeros((b, m)) for _ in users] for users in self.rn_users]
        user_msg = [[np.zeros((b, m)) for _ in users] for users in self.rn_users]
        for _ in range(self.iterations):
            for k, users in enumerate(self.rn_users):
                d = len(users)
                total = cost[k]
                for i in range(d):
                    shape = [b] + [1] * d
                    shape[1 + i] = m
                    total = total + user_msg[k][i].reshape(shape)
                for i in range(d):
                    axes = tuple(a for a in range(1, d + 1) if a != i + 1)
                    mins = total.min(axis=axes) if axes else total
                    rn_msg[k][i] = mins - user_msg[k][i]
            for l in range(self.j_users):
                edges = self.user_edges[l]
                incoming = [rn_msg[k][pos] for k, pos in edges]
                full = np.sum(incoming, axis=0)
                for (k, pos), msg in zip(edges, incoming):
                    ext = full - msg
                    user_msg[k][pos] = ext - ext.min(axis=1, keepdims=True)
        decisions = np.zeros((b, self.j_users), dtype=np.int64)
        for l in range(self.j_users):
            belief = np.sum([rn_msg[k][pos] for k, pos in self.user_edges[l]], axis=0)
            decisions[:, l] = np.argmin(belief, axis=1)
        return decisions

    def _single_user_batch(self, y: np.ndarray, channel: np.ndarray) -> np.ndarray:
        b = y.shape[0]
        decisions = np.zeros((b, self.j_users), dtype=np.int64)
        for l in range(self.j_users):
            ks = [k for k, _ in self.user_edges[l]]
            resid = y[:, ks, None] - channel[:, ks, None] * self.codebooks[l, ks, :][None, :, :]
            belief = np.sum(resid.real**2 + resid.imag**2, axis=1)
            decisions[:, l] = np.argmin(belief, axis=1)
        return decisions


def ml_detect(sig: ReceivedSignal, cbs: CodebookSet) -> DetectionResult:
    """One-shot exhaustive ML detection; see MlDetector for batched use."""
    det = MlDetector(cbs)
    idx = det.detect_batch(sig.y[None, :], sig.channel[None, :])[0]
    return DetectionResult(indices=idx, bits=indices_to_bits(idx, cbs.dims.m_order))


def mpa_detect(sig: ReceivedSignal, cbs: CodebookSet, iterations: int = 8) -> DetectionResult:
    """One-shot max-log MPA detection; see MpaDetector for batched use."""
    det = MpaDetector(cbs, iterations=iterations)
    idx = det.detect_batch(sig.y[None, :], sig.channel[None, :], sig.n0)[0]
    return DetectionResult(indices=idx, bits=indices_to_bits(idx, cbs.dims.m_order))
