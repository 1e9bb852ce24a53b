"""Graph-temporal state encoder.

Per slot, a two-layer graph convolution over the normalized adjacency turns
node features into embeddings; the last W flattened embeddings form a
sliding window that a 1-D convolution across the time axis (then layer
normalization over channels, then ReLU) compresses into one fixed-size
vector.  With kernel size k >= W and no padding the convolution output has
temporal length 1, which is squeezed away; windows shorter than the kernel
are left-padded by repeating the oldest entry.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import nn


@dataclass(frozen=True)
class EncoderConfig:
    feature_dim: int = 12
    gcn_hidden: int = 32
    gcn_out: int = 16
    window: int = 3
    kernel: int = 3
    channels: int = 128

    def __post_init__(self) -> None:
        for name in ("feature_dim", "gcn_hidden", "gcn_out", "window", "kernel", "channels"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.kernel < self.window:
            raise ValueError("temporal kernel size must be at least the window size")


def normalized_adjacency(edges, node_count: int, dtype=torch.float64) -> torch.Tensor:
    """D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I."""
    a = torch.eye(node_count, dtype=dtype)
    for i, j in edges:
        a[i, j] = 1.0
        a[j, i] = 1.0
    deg = a.sum(dim=1)
    # one rounding step instead of two: integer degree products keep the
    # small hand-checkable cases bit-exact
    return a / torch.sqrt(deg[:, None] * deg[None, :])


def gcn_forward(adj: torch.Tensor, x: torch.Tensor, w1: torch.Tensor, w2: torch.Tensor) -> torch.Tensor:
    """H = ReLU(A_hat ReLU(A_hat X W1) W2); no bias terms."""
    return torch.relu(adj @ torch.relu(adj @ x @ w1) @ w2)


class WindowBuffer:
    """FIFO of the last `capacity` flattened embeddings, one per rollout.

    The first push pre-fills the whole buffer, so `stacked()` is always full
    length; later pushes discard exactly the oldest entry.
    """

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._entries: deque[torch.Tensor] = deque(maxlen=capacity)

    def push(self, vec: torch.Tensor) -> None:
        if not self._entries:
            for _ in range(self.capacity):
                self._entries.append(vec)
        else:
            self._entries.append(vec)

    def __len__(self) -> int:
        return len(self._entries)

    def stacked(self) -> torch.Tensor:
        if not self._entries:
            raise ValueError("window buffer is empty; push an embedding first")
        return torch.stack(tuple(self._entries), dim=0)  # (W, D), oldest first

    def clear(self) -> None:
        self._entries.clear()


class GateEncoder(nn.Module):
    """GCN per slot plus temporal convolution over the window, end to end."""

    def __init__(self, max_nodes: int, config: EncoderConfig | None = None) -> None:
        super().__init__()
        self.config = config or EncoderConfig()
        self.max_nodes = max_nodes
        c = self.config
        self.w1 = nn.Parameter(torch.empty(c.feature_dim, c.gcn_hidden))
        self.w2 = nn.Parameter(torch.empty(c.gcn_hidden, c.gcn_out))
        nn.init.kaiming_uniform_(self.w1, a=math.sqrt(5))
        nn.init.kaiming_uniform_(self.w2, a=math.sqrt(5))
        self.conv = nn.Conv1d(max_nodes * c.gcn_out, c.channels, c.kernel)
        self.norm = nn.LayerNorm(c.channels)

    @property
    def flat_dim(self) -> int:
        return self.max_nodes * self.config.gcn_out

    def node_embeddings(self, adj: torch.Tensor, x: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        """Batched GCN: adj (B,N,N), x (B,N,d), mask (B,N) -> (B,N,gcn_out)."""
        h = gcn_forward(adj, x, self.w1, self.w2)
        return h * mask.unsqueeze(-1)

    def flat_embeddings(self, adj: torch.Tensor, x: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        return self.node_embeddings(adj, x, mask).flatten(start_dim=-2)

    def conv_preactivation(self, windows: torch.Tensor) -> torch.Tensor:
        """Temporal convolution output before normalization, (B, C)."""
        if windows.dim() == 2:
            windows = windows.unsqueeze(0)
        seq = windows.transpose(1, 2)  # (B, D, W), oldest first
        short = self.config.kernel - seq.shape[-1]
        if short > 0:
            seq = F.pad(seq, (short, 0), mode="replicate")
        out = self.conv(seq)
        if out.shape[-1] != 1:
            raise ValueError("temporal convolution must collapse the window to length 1")
        return out.squeeze(-1)

    def encode(self, windows: torch.Tensor) -> torch.Tensor:
        """(B, W, D) or (W, D) window of flat embeddings -> (B, C) or (C,)."""
        single = windows.dim() == 2
        z = torch.relu(self.norm(self.conv_preactivation(windows)))
        return z.squeeze(0) if single else z


def window_indices(num_slots: int, window: int) -> torch.Tensor:
    """(T, W) gather indices; clamping at 0 reproduces the pre-fill rule."""
    base = torch.arange(num_slots).unsqueeze(1) + torch.arange(-(window - 1), 1).unsqueeze(0)
    return base.clamp(min=0)
