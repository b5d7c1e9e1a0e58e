from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Declared output sizes; "external" hashes carry their own length.
ALGORITHM_BITS = {
    "blockhash": 256,
    "colourhash": 44,
    "pdq": 256,
    "phash": 64,
    "wavehash": 64,
}
EXTERNAL = "external"


@dataclass(frozen=True)
class BitHash:
    """Fixed-length bit string, most significant bit first.

    ``value`` holds the bits as an unsigned integer whose top bit is bit 0.
    """

    algo: str
    length: int
    value: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("hash length must be positive")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"value does not fit in {self.length} bits")
        declared = ALGORITHM_BITS.get(self.algo)
        if declared is not None and declared != self.length:
            raise ValueError(f"{self.algo} hashes are {declared} bits, got {self.length}")

    @classmethod
    def from_bits(cls, algo: str, bits) -> "BitHash":
        bits = np.asarray(bits, dtype=bool).ravel()
        value = int.from_bytes(np.packbits(bits).tobytes(), "big")
        value >>= (-len(bits)) % 8
        return cls(algo, len(bits), value)

    @classmethod
    def from_hex(cls, algo: str, text: str, length: int) -> "BitHash":
        text = text.strip().lower()
        if len(text) != hex_width(length):
            raise ValueError(f"expected {hex_width(length)} hex digits for {length} bits, got {len(text)}")
        return cls(algo, length, int(text, 16))

    @property
    def bits(self) -> np.ndarray:
        nbytes = (self.length + 7) // 8
        raw = np.frombuffer((self.value << (nbytes * 8 - self.length)).to_bytes(nbytes, "big"), dtype=np.uint8)
        return np.unpackbits(raw)[: self.length].astype(bool)

    def hex(self) -> str:
        return format(self.value, f"0{hex_width(self.length)}x")

    def __len__(self) -> int:
        return self.length

    def __str__(self) -> str:
        return self.hex()


def hex_width(length: int) -> int:
    return -(-length // 4)
