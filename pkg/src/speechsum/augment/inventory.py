"""Phoneme inventory: 39 stress-free ARPAbet symbols plus specials.

Id layout is fixed for serialization stability: <pad>=0, <unk>=1,
word boundary <wb>=2, then the ARPAbet symbols in canonical order,
42 ids in total by default.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigurationError, RangeError

ARPABET = (
    "AA", "AE", "AH", "AO", "AW", "AY", "B", "CH", "D", "DH",
    "EH", "ER", "EY", "F", "G", "HH", "IH", "IY", "JH", "K",
    "L", "M", "N", "NG", "OW", "OY", "P", "R", "S", "T",
    "UH", "UW", "V", "W", "Y", "Z", "ZH",
    "TH", "SH",
)

PAD_NAME, UNK_NAME, WB_NAME = "<pad>", "<unk>", "<wb>"


@dataclass(frozen=True)
class PhonemeInventory:
    names: tuple[str, ...] = field(default=(PAD_NAME, UNK_NAME, WB_NAME) + tuple(sorted(ARPABET)))

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise ConfigurationError("phoneme inventory contains duplicate names")

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def pad_id(self) -> int:
        return self.names.index(PAD_NAME)

    @property
    def unk_id(self) -> int:
        return self.names.index(UNK_NAME)

    @property
    def wb_id(self) -> int:
        return self.names.index(WB_NAME)

    def id_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise RangeError(f"phoneme {name!r} not in inventory") from None

    def name_of(self, pid: int) -> str:
        if pid < 0 or pid >= len(self.names):
            raise RangeError(f"phoneme id {pid} outside inventory of size {len(self.names)}")
        return self.names[pid]


DEFAULT_INVENTORY = PhonemeInventory()
