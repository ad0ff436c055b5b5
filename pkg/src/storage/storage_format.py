from enum import Enum


class StorageFormat(str, Enum):
    """On-disk format of a result table."""

    CSV = "csv"
    JSON = "json"

    @property
    def suffix(self) -> str:
        return f".{self.value}"

    @classmethod
    def resolve(cls, value: "StorageFormat | str") -> "StorageFormat":
        """
        Accept a member or its case-insensitive name.

        Raises:
            ValueError: If the value names no supported format.
        """
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            supported = ", ".join(f.value for f in cls)
            raise ValueError(f"Invalid storage format '{value}'. Supported formats are: {supported}.") from None
